#include "radsr/radar_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"

namespace radsr {

namespace {

constexpr double kGaitSpeedLimit = 6.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, double power)
      : rng_(seed), dist_(0.0, std::sqrt(power / 2.0)), enabled_(power > 0.0) {}

  cplx next() {
    if (!enabled_) return {0.0, 0.0};
    const double re = dist_(rng_);
    const double im = dist_(rng_);
    return {re, im};
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_;
  bool enabled_;
};

}  // namespace

std::string shape_str(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

std::size_t CwRadarConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * pulse_repetition_frequency_hz));
}

void CwRadarConfig::validate() const {
  require(finite_positive(carrier_frequency_hz), "carrier frequency must be positive");
  require(finite_positive(pulse_repetition_frequency_hz), "pulse repetition frequency must be positive");
  require(finite_positive(duration_s), "duration must be positive");
  require(std::isfinite(noise_power) && noise_power >= 0.0, "noise power must be non-negative");
}

double GaitModel::max_speed() const {
  double limb = 0.0;
  for (const auto& s : scatterers) {
    const double peak = s.harmonic == 0 ? std::abs(s.modulation_mps * std::sin(s.phase_rad))
                                        : std::abs(s.modulation_mps);
    limb = std::max(limb, peak);
  }
  return std::abs(bulk_velocity()) + limb;
}

double GaitModel::velocity(std::size_t k, double t) const {
  const auto& s = scatterers.at(k);
  if (s.harmonic == 0) return bulk_velocity() + s.modulation_mps * std::sin(s.phase_rad);
  const double omega = 2.0 * kPi * s.harmonic * cadence_hz;
  return bulk_velocity() + s.modulation_mps * std::sin(omega * t + s.phase_rad);
}

double GaitModel::displacement(std::size_t k, double t) const {
  const auto& s = scatterers.at(k);
  double d = bulk_velocity() * t;
  if (s.harmonic == 0) {
    d += s.modulation_mps * std::sin(s.phase_rad) * t;
  } else {
    const double omega = 2.0 * kPi * s.harmonic * cadence_hz;
    d += s.modulation_mps / omega * (std::cos(s.phase_rad) - std::cos(omega * t + s.phase_rad));
  }
  return d;
}

void GaitModel::validate() const {
  require(finite_positive(cadence_hz), "gait cadence must be positive");
  require(std::isfinite(torso_speed_mps), "torso speed must be finite");
  for (std::size_t k = 0; k < scatterers.size(); ++k) {
    const auto& s = scatterers[k];
    require(std::isfinite(s.amplitude) && s.amplitude >= 0.0,
            "scatterer " + std::to_string(k) + ": amplitude must be non-negative");
    require(std::isfinite(s.modulation_mps) && std::isfinite(s.phase_rad),
            "scatterer " + std::to_string(k) + ": non-finite parameter");
    require(s.harmonic >= 0, "scatterer " + std::to_string(k) + ": negative harmonic index");
  }
  std::ostringstream msg;
  msg << "gait max speed " << max_speed() << " m/s must stay below " << kGaitSpeedLimit << " m/s";
  require(max_speed() < kGaitSpeedLimit, msg.str());
}

IqSeries simulate_gait_iq(const CwRadarConfig& config, const GaitModel& gait) {
  config.validate();
  gait.validate();
  const double v_max = kSpeedOfLight * config.pulse_repetition_frequency_hz /
                       (4.0 * config.carrier_frequency_hz);
  if (gait.max_speed() >= v_max) {
    std::ostringstream msg;
    msg << "gait max speed " << gait.max_speed() << " m/s aliases at f_p="
        << config.pulse_repetition_frequency_hz << " Hz (v_max " << v_max << " m/s)";
    throw std::invalid_argument(msg.str());
  }

  const std::size_t n = config.sample_count();
  const double fp = config.pulse_repetition_frequency_hz;
  const double k_phase = 4.0 * kPi / config.wavelength();

  IqSeries out;
  out.samples.assign(n, cplx{});
  out.sample_rate_hz = fp;
  out.shape = {n};
  out.provenance = "gait seed=" + std::to_string(config.rng_seed);

  for (std::size_t k = 0; k < gait.scatterers.size(); ++k) {
    const double a = gait.scatterers[k].amplitude;
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fp;
      out.samples[i] += std::polar(a, k_phase * gait.displacement(k, t));
    }
  }

  NoiseSource noise(config.rng_seed, config.noise_power);
  for (auto& s : out.samples) s += noise.next();
  return out;
}

UlaConfig UlaConfig::with_half_wavelength_spacing(double carrier_hz, double bandwidth_hz,
                                                  std::size_t n_rx) {
  UlaConfig c;
  c.carrier_frequency_hz = carrier_hz;
  c.bandwidth_hz = bandwidth_hz;
  c.n_rx_elements = n_rx;
  c.element_spacing_m = c.wavelength() / 2.0;
  return c;
}

double UlaConfig::beat_frequency_hz(double range_m) const {
  return 2.0 * bandwidth_hz * range_m / (kSpeedOfLight * chirp_duration_s);
}

double UlaConfig::max_unambiguous_range_m() const {
  return static_cast<double>(samples_per_chirp) * kSpeedOfLight / (2.0 * bandwidth_hz);
}

void UlaConfig::validate() const {
  require(finite_positive(carrier_frequency_hz), "carrier frequency must be positive");
  require(finite_positive(bandwidth_hz), "bandwidth must be positive");
  require(finite_positive(chirp_duration_s), "chirp duration must be positive");
  require(n_rx_elements >= 2, "ULA needs at least 2 receive elements");
  require(n_chirps >= 1, "ULA needs at least one chirp");
  require(samples_per_chirp >= 2 && std::has_single_bit(samples_per_chirp),
          "samples per chirp must be a power of two");
  require(std::abs(element_spacing_m - wavelength() / 2.0) <= 1e-12 * wavelength(),
          "element spacing must be lambda/2");
  require(std::isfinite(noise_power) && noise_power >= 0.0, "noise power must be non-negative");
}

void Scene::validate(const UlaConfig& config) const {
  const double r_max = config.max_unambiguous_range_m();
  for (std::size_t k = 0; k < scatterers.size(); ++k) {
    const auto& s = scatterers[k];
    std::ostringstream msg;
    msg << "scatterer " << k << " (range " << s.range_m << " m, azimuth " << s.azimuth_rad
        << " rad)";
    if (!(std::isfinite(s.range_m) && s.range_m >= 0.0 && s.range_m < r_max)) {
      msg << " is beyond the unambiguous range " << r_max << " m";
      throw std::invalid_argument(msg.str());
    }
    if (!(std::abs(s.azimuth_rad) < kPi / 2.0)) {
      msg << " has |azimuth| >= pi/2";
      throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(s.reflectivity)) {
      msg << " has non-finite reflectivity";
      throw std::invalid_argument(msg.str());
    }
  }
}

IqSeries simulate_ula_iq(const UlaConfig& config, const Scene& scene) {
  config.validate();
  scene.validate(config);

  const std::size_t ne = config.n_rx_elements;
  const std::size_t nc = config.n_chirps;
  const std::size_t ns = config.samples_per_chirp;
  const double fs = config.fast_time_rate_hz();
  const double spacing = config.element_spacing_m / config.wavelength();

  IqSeries out;
  out.samples.assign(ne * nc * ns, cplx{});
  out.sample_rate_hz = fs;
  out.shape = {ne, nc, ns};
  out.provenance = "ula seed=" + std::to_string(config.rng_seed);

  // Canonical summation order so the cube does not depend on scatterer order.
  auto ordered = scene.scatterers;
  std::sort(ordered.begin(), ordered.end(), [](const PointScatterer& a, const PointScatterer& b) {
    return std::tie(a.range_m, a.azimuth_rad, a.reflectivity) <
           std::tie(b.range_m, b.azimuth_rad, b.reflectivity);
  });

  // Static scene: every chirp sees the same beat signal.
  std::vector<cplx> chirp(ne * ns, cplx{});
  for (const auto& s : ordered) {
    const double fb = config.beat_frequency_hz(s.range_m);
    for (std::size_t e = 0; e < ne; ++e) {
      const double spatial = 2.0 * kPi * spacing * static_cast<double>(e) * std::sin(s.azimuth_rad);
      for (std::size_t i = 0; i < ns; ++i) {
        const double t = static_cast<double>(i) / fs;
        chirp[e * ns + i] += std::polar(s.reflectivity, 2.0 * kPi * fb * t + spatial);
      }
    }
  }

  NoiseSource noise(config.rng_seed, config.noise_power);
  for (std::size_t e = 0; e < ne; ++e)
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t i = 0; i < ns; ++i)
        out.samples[(e * nc + c) * ns + i] = chirp[e * ns + i] + noise.next();
  return out;
}

IqSeries decimate(const IqSeries& iq, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("decimation factor must be positive");
  if (iq.size() % factor != 0)
    throw std::invalid_argument("decimation factor " + std::to_string(factor) +
                                " does not divide sample count " + std::to_string(iq.size()));
  IqSeries out;
  out.samples.reserve(iq.size() / factor);
  for (std::size_t i = 0; i < iq.size(); i += factor) out.samples.push_back(iq.samples[i]);
  out.sample_rate_hz = iq.sample_rate_hz / static_cast<double>(factor);
  out.shape = {out.samples.size()};
  out.provenance = iq.provenance + " decimate=" + std::to_string(factor);
  return out;
}

void write_iq(const IqSeries& iq, const std::filesystem::path& base) {
  auto bin_path = base;
  bin_path += ".bin";
  auto json_path = base;
  json_path += ".json";

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + bin_path.string());
  for (const auto& s : iq.samples) {
    detail::put_f64_le(bin, s.real());
    detail::put_f64_le(bin, s.imag());
  }

  nlohmann::json sidecar = {{"sample_rate_hz", iq.sample_rate_hz},
                            {"shape", iq.shape.empty() ? std::vector<std::size_t>{iq.size()} : iq.shape},
                            {"provenance", iq.provenance}};
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << sidecar.dump(2) << "\n";
}

IqSeries read_iq(const std::filesystem::path& base) {
  auto bin_path = base;
  bin_path += ".bin";
  auto json_path = base;
  json_path += ".json";

  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot read " + json_path.string());
  const auto sidecar = nlohmann::json::parse(js);

  IqSeries iq;
  iq.sample_rate_hz = sidecar.at("sample_rate_hz").get<double>();
  iq.shape = sidecar.at("shape").get<std::vector<std::size_t>>();
  iq.provenance = sidecar.value("provenance", "");
  std::size_t n = 1;
  for (auto d : iq.shape) n *= d;

  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + bin_path.string());
  iq.samples.resize(n);
  for (auto& s : iq.samples) {
    const double re = detail::get_f64_le(bin);
    const double im = detail::get_f64_le(bin);
    s = {re, im};
  }
  return iq;
}

}  // namespace radsr
