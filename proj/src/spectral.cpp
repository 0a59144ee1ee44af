#include "radsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace radsr {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double to_db(double magnitude) { return 20.0 * std::log10(magnitude + kDbEpsilon); }

}  // namespace

std::size_t StftParams::hop() const {
  const double h = static_cast<double>(window_size) * (1.0 - overlap_fraction);
  return static_cast<std::size_t>(std::llround(h));
}

void StftParams::validate() const {
  require(window_size >= 2, "STFT window size must be >= 2");
  require(overlap_fraction >= 0.0 && overlap_fraction < 1.0, "STFT overlap must lie in [0, 1)");
  const double h = static_cast<double>(window_size) * (1.0 - overlap_fraction);
  require(std::abs(h - std::round(h)) < 1e-9 && std::round(h) >= 1.0,
          "STFT hop w*(1-overlap) must be a positive integer");
  require(std::isfinite(gaussian_sigma) && gaussian_sigma >= 0.0, "Gaussian sigma must be >= 0");
}

std::vector<double> gaussian_window(std::size_t size, double sigma) {
  std::vector<double> w(size);
  const double center = (static_cast<double>(size) - 1.0) / 2.0;
  for (std::size_t n = 0; n < size; ++n) {
    const double z = (static_cast<double>(n) - center) / sigma;
    w[n] = std::exp(-0.5 * z * z);
  }
  return w;
}

std::size_t stft_frame_count(std::size_t length, std::size_t window, std::size_t hop) {
  if (length < window || hop == 0) return 0;
  return (length - window) / hop + 1;
}

std::string to_string(AxisKind kind) {
  switch (kind) {
    case AxisKind::time: return "time";
    case AxisKind::range: return "range";
    case AxisKind::velocity: return "velocity";
    case AxisKind::azimuth: return "azimuth";
  }
  return "time";
}

AxisKind axis_kind_from_string(const std::string& s) {
  if (s == "time") return AxisKind::time;
  if (s == "range") return AxisKind::range;
  if (s == "velocity") return AxisKind::velocity;
  if (s == "azimuth") return AxisKind::azimuth;
  throw std::invalid_argument("unknown axis kind '" + s + "'");
}

VelocityBudget velocity_budget(double carrier_hz, double prf_hz, std::size_t window_size) {
  require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "carrier frequency must be positive");
  require(std::isfinite(prf_hz) && prf_hz > 0.0, "pulse repetition frequency must be positive");
  require(window_size > 0, "window size must be positive");
  VelocityBudget b;
  b.v_max_mps = kSpeedOfLight * prf_hz / (4.0 * carrier_hz);
  b.v_res_mps = 2.0 * b.v_max_mps / static_cast<double>(window_size);
  return b;
}

double TimeFrequency::bin_frequency_hz(std::size_t bin) const {
  const double offset = static_cast<double>(bin) - static_cast<double>(bins / 2);
  return offset * sample_rate_hz / static_cast<double>(bins);
}

double TimeFrequency::frame_center_s(std::size_t frame) const {
  const double center = static_cast<double>(frame * hop) + (static_cast<double>(bins) - 1.0) / 2.0;
  return center / sample_rate_hz;
}

TimeFrequency stft(const IqSeries& iq, const StftParams& params) {
  params.validate();
  const std::size_t w = params.window_size;
  if (iq.size() < w) {
    std::ostringstream msg;
    msg << "series of " << iq.size() << " samples is shorter than the STFT window " << w;
    throw std::invalid_argument(msg.str());
  }
  const std::size_t hop = params.hop();
  const auto window = gaussian_window(w, params.sigma());

  TimeFrequency tf;
  tf.frames = stft_frame_count(iq.size(), w, hop);
  tf.bins = w;
  tf.hop = hop;
  tf.sample_rate_hz = iq.sample_rate_hz;
  tf.data.resize(tf.frames * w);

  const std::size_t half = w / 2;
  std::vector<cplx> buf(w);
  for (std::size_t f = 0; f < tf.frames; ++f) {
    const std::size_t offset = f * hop;
    for (std::size_t n = 0; n < w; ++n) buf[n] = iq.samples[offset + n] * window[n];
    detail::fft_forward(buf);
    cplx* row = tf.data.data() + f * w;
    for (std::size_t j = 0; j < w; ++j) row[j] = buf[(j + w - half) % w];
  }
  return tf;
}

Spectrum2D micro_doppler(const IqSeries& iq, const StftParams& params, double carrier_hz,
                         std::optional<double> crop_to_mps) {
  const auto budget = velocity_budget(carrier_hz, iq.sample_rate_hz, params.window_size);
  std::size_t first = 0;
  std::size_t count = params.window_size;
  const std::size_t half = params.window_size / 2;
  if (crop_to_mps) {
    const double crop = *crop_to_mps;
    if (!(crop > 0.0) || crop > budget.v_max_mps * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "crop band +/-" << crop << " m/s exceeds v_max " << budget.v_max_mps << " m/s";
      throw std::invalid_argument(msg.str());
    }
    const auto k = static_cast<std::size_t>(std::floor(crop / budget.v_res_mps + 1e-9));
    first = half - std::min(k, half);
    count = 2 * std::min(k, half);
  }

  const auto tf = stft(iq, params);
  Spectrum2D s;
  s.values = Plane(tf.frames, count);
  for (std::size_t f = 0; f < tf.frames; ++f)
    for (std::size_t j = 0; j < count; ++j) s.values(f, j) = to_db(std::abs(tf(f, first + j)));

  const double v_per_hz = kSpeedOfLight / (2.0 * carrier_hz);
  s.in_db = true;
  s.axis0 = {AxisKind::time, tf.frame_center_s(0), static_cast<double>(tf.hop) / iq.sample_rate_hz, "s"};
  s.axis1 = {AxisKind::velocity, tf.bin_frequency_hz(first) * v_per_hz, budget.v_res_mps, "m/s"};
  s.provenance = iq.provenance;
  return s;
}

Spectrum2D range_azimuth(const IqSeries& cube, const UlaConfig& config, std::size_t angle_fft_size, bool hann_taper) {
  config.validate();
  const std::size_t ne = config.n_rx_elements;
  const std::size_t nc = config.n_chirps;
  const std::size_t ns = config.samples_per_chirp;
  const std::vector<std::size_t> expected{ne, nc, ns};
  if (cube.shape != expected || cube.size() != ne * nc * ns) {
    std::ostringstream msg;
    msg << "IQ cube shape [";
    for (std::size_t i = 0; i < cube.shape.size(); ++i) msg << (i ? "," : "") << cube.shape[i];
    msg << "] does not match config shape [" << ne << "," << nc << "," << ns << "]";
    throw std::invalid_argument(msg.str());
  }
  require(angle_fft_size >= ne, "angle FFT size must be >= number of elements");

  const auto taper = [hann_taper](std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (hann_taper)
      for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    return w;
  };
  const auto w_range = taper(ns);
  // the periodic window would zero element 0; shift by half a sample instead
  std::vector<double> w_angle(ne, 1.0);
  if (hann_taper)
    for (std::size_t e = 0; e < ne; ++e)
      w_angle[e] = 0.5 - 0.5 * std::cos(2.0 * kPi * (static_cast<double>(e) + 0.5) / static_cast<double>(ne));

  // range profile per element, averaged over chirps
  std::vector<cplx> profile(ne * ns, cplx{});
  std::vector<cplx> buf(ns);
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t i = 0; i < ns; ++i) buf[i] = cube.at(e, c, i) * w_range[i];
      detail::fft_forward(buf);
      for (std::size_t k = 0; k < ns; ++k) profile[e * ns + k] += buf[k];
    }
    for (std::size_t k = 0; k < ns; ++k) profile[e * ns + k] /= static_cast<double>(nc);
  }

  const std::size_t na = angle_fft_size;
  const std::size_t half = na / 2;
  Spectrum2D s;
  s.values = Plane(ns, na);
  std::vector<cplx> angle(na);
  for (std::size_t k = 0; k < ns; ++k) {
    std::fill(angle.begin(), angle.end(), cplx{});
    for (std::size_t e = 0; e < ne; ++e) angle[e] = profile[e * ns + k] * w_angle[e];
    detail::fft_forward(angle);
    for (std::size_t j = 0; j < na; ++j) s.values(k, j) = to_db(std::abs(angle[(j + na - half) % na]));
  }

  const double sin_step = config.wavelength() / (static_cast<double>(na) * config.element_spacing_m);
  s.in_db = true;
  s.axis0 = {AxisKind::range, 0.0, kSpeedOfLight / (2.0 * config.bandwidth_hz), "m"};
  s.axis1 = {AxisKind::azimuth, -static_cast<double>(half) * sin_step, sin_step, "sin(az)"};
  s.provenance = cube.provenance;
  return s;
}

double azimuth_rad(const Spectrum2D& map, std::size_t col) {
  return std::asin(std::clamp(map.axis1.at(col), -1.0, 1.0));
}

UlaBudget ula_budget(const UlaConfig& config, double theta_rad) {
  require(std::isfinite(config.bandwidth_hz) && config.bandwidth_hz > 0.0, "bandwidth must be positive");
  require(config.n_rx_elements >= 1, "element count must be positive");
  require(config.element_spacing_m > 0.0, "element spacing must be positive");
  if (!(std::abs(theta_rad) < kPi / 2.0))
    throw std::invalid_argument("|theta| must be below pi/2 for the azimuth resolution");
  UlaBudget b;
  b.range_res_m = kSpeedOfLight / (2.0 * config.bandwidth_hz);
  b.azimuth_res_rad = 0.89 * config.wavelength() /
                      (static_cast<double>(config.n_rx_elements) * config.element_spacing_m *
                       std::cos(theta_rad));
  return b;
}

Plane resize_bilinear(const Plane& p, std::size_t out_rows, std::size_t out_cols) {
  if (out_rows < 2 || out_cols < 2)
    throw std::invalid_argument("resize target " + shape_str(out_rows, out_cols) + " is degenerate");
  if (p.rows == 0 || p.cols == 0) throw std::invalid_argument("cannot resize an empty plane");

  auto coords = [](std::size_t in, std::size_t out) {
    std::vector<std::pair<std::size_t, double>> c(out);
    for (std::size_t i = 0; i < out; ++i) {
      if (in == 1) {
        c[i] = {0, 0.0};
        continue;
      }
      const double y = static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
      auto i0 = std::min(static_cast<std::size_t>(std::floor(y)), in - 1);
      c[i] = {i0, y - static_cast<double>(i0)};
    }
    return c;
  };
  const auto rc = coords(p.rows, out_rows);
  const auto cc = coords(p.cols, out_cols);

  Plane out(out_rows, out_cols);
  for (std::size_t i = 0; i < out_rows; ++i) {
    const auto [r0, fy] = rc[i];
    const std::size_t r1 = std::min(r0 + 1, p.rows - 1);
    for (std::size_t j = 0; j < out_cols; ++j) {
      const auto [c0, fx] = cc[j];
      const std::size_t c1 = std::min(c0 + 1, p.cols - 1);
      const double top = p(r0, c0) + fx * (p(r0, c1) - p(r0, c0));
      const double bottom = p(r1, c0) + fx * (p(r1, c1) - p(r1, c0));
      out(i, j) = top + fy * (bottom - top);
    }
  }
  return out;
}

Spectrum2D resize_bilinear(const Spectrum2D& s, std::size_t out_rows, std::size_t out_cols) {
  Spectrum2D out = s;
  out.values = resize_bilinear(s.values, out_rows, out_cols);
  if (s.rows() > 1)
    out.axis0.step = s.axis0.step * static_cast<double>(s.rows() - 1) / static_cast<double>(out_rows - 1);
  if (s.cols() > 1)
    out.axis1.step = s.axis1.step * static_cast<double>(s.cols() - 1) / static_cast<double>(out_cols - 1);
  return out;
}

Spectrum2D slice_rows(const Spectrum2D& s, std::size_t begin, std::size_t end) {
  if (begin >= end || end > s.rows())
    throw std::invalid_argument("row slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                ") outside " + std::to_string(s.rows()) + " rows");
  Spectrum2D out = s;
  out.values = Plane(end - begin, s.cols());
  std::copy(s.values.data.begin() + static_cast<std::ptrdiff_t>(begin * s.cols()),
            s.values.data.begin() + static_cast<std::ptrdiff_t>(end * s.cols()), out.values.data.begin());
  out.axis0.start = s.axis0.at(begin);
  return out;
}

namespace {

// Fractional index of physical coordinate x on an axis, and the bracketing pair.
std::pair<std::size_t, double> bracket(const Axis& a, std::size_t n, double x) {
  const double f = (x - a.start) / a.step;
  if (n == 1 || f <= 0.0) return {0, 0.0};
  if (f >= static_cast<double>(n - 1)) return {n - 2, 1.0};
  const auto i = static_cast<std::size_t>(std::floor(f));
  return {i, f - static_cast<double>(i)};
}

}  // namespace

Spectrum2D resample_to_grid(const Spectrum2D& s, const Axis& rows_axis, std::size_t rows, const Axis& cols_axis,
                            std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("resample target " + shape_str(rows, cols) + " is empty");
  if (s.rows() == 0 || s.cols() == 0) throw std::invalid_argument("cannot resample an empty spectrum");
  if (!(s.axis0.step > 0.0) || !(s.axis1.step > 0.0) || !(rows_axis.step > 0.0) || !(cols_axis.step > 0.0))
    throw std::invalid_argument("resample axes need positive steps");

  auto to_power = [&](double v) { return s.in_db ? std::pow(10.0, v / 10.0) : v * v; };

  // columns: per input row, power integrated over each output cell (mean
  // power per input bin times bins per cell), so maps with different bin
  // widths land on the same level
  const double bins_per_cell = cols_axis.step / s.axis1.step;
  Plane by_col(s.rows(), cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const double c = cols_axis.at(j);
    const double lo = c - cols_axis.step / 2.0, hi = c + cols_axis.step / 2.0;
    const double f_lo = std::ceil((lo - s.axis1.start) / s.axis1.step - 1e-9);
    const double f_hi = std::ceil((hi - s.axis1.start) / s.axis1.step - 1e-9);
    const auto b = static_cast<std::ptrdiff_t>(std::max(f_lo, 0.0));
    const auto e = static_cast<std::ptrdiff_t>(std::min(f_hi, static_cast<double>(s.cols())));
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double p = 0.0;
      if (e > b) {
        for (auto k = b; k < e; ++k) p += to_power(s.values(r, static_cast<std::size_t>(k)));
        p /= static_cast<double>(e - b);
      } else {
        const auto [k, f] = bracket(s.axis1, s.cols(), c);
        const std::size_t k1 = std::min(k + 1, s.cols() - 1);
        p = to_power(s.values(r, k)) * (1.0 - f) + to_power(s.values(r, k1)) * f;
      }
      by_col(r, j) = p * bins_per_cell;
    }
  }

  Spectrum2D out;
  out.values = Plane(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto [k, f] = bracket(s.axis0, s.rows(), rows_axis.at(i));
    const std::size_t k1 = std::min(k + 1, s.rows() - 1);
    for (std::size_t j = 0; j < cols; ++j) {
      const double p = by_col(k, j) * (1.0 - f) + by_col(k1, j) * f;
      out.values(i, j) = s.in_db ? 10.0 * std::log10(p + kDbEpsilon * kDbEpsilon) : std::sqrt(p);
    }
  }
  out.in_db = s.in_db;
  out.axis0 = rows_axis;
  out.axis1 = cols_axis;
  out.axis0.kind = s.axis0.kind;
  out.axis1.kind = s.axis1.kind;
  out.axis0.unit = s.axis0.unit;
  out.axis1.unit = s.axis1.unit;
  out.provenance = s.provenance;
  return out;
}

std::uint16_t quantize_u16(double value, double db_floor, double db_ceil) {
  const double scaled = (value - db_floor) / (db_ceil - db_floor) * 65535.0;
  const double q = std::floor(scaled + 0.5);
  return static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
}

double dequantize_u16(std::uint16_t q, double db_floor, double db_ceil) {
  return db_floor + static_cast<double>(q) / 65535.0 * (db_ceil - db_floor);
}

Image16 to_u16_image(const Spectrum2D& s, double db_floor, double db_ceil) {
  if (!(std::isfinite(db_floor) && std::isfinite(db_ceil) && db_floor < db_ceil)) {
    std::ostringstream msg;
    msg << "image range floor " << db_floor << " must be below ceil " << db_ceil;
    throw std::invalid_argument(msg.str());
  }
  Image16 img;
  img.rows = s.rows();
  img.cols = s.cols();
  img.pixels.resize(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (!std::isfinite(s.values.data[i])) throw std::invalid_argument("spectrum has non-finite values");
    img.pixels[i] = quantize_u16(s.values.data[i], db_floor, db_ceil);
  }
  img.db_floor = db_floor;
  img.db_ceil = db_ceil;
  img.axis0 = s.axis0;
  img.axis1 = s.axis1;
  img.provenance = s.provenance;
  return img;
}

Plane dequantize(const Image16& img) {
  Plane p(img.rows, img.cols);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    p.data[i] = dequantize_u16(img.pixels[i], img.db_floor, img.db_ceil);
  return p;
}

Spectrum2D to_spectrum(const Image16& img) {
  Spectrum2D s;
  s.values = dequantize(img);
  s.in_db = true;
  s.axis0 = img.axis0;
  s.axis1 = img.axis1;
  s.provenance = img.provenance;
  return s;
}

}  // namespace radsr
