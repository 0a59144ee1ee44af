#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radsr/common.hpp"

namespace radsr {

/// Continuous-wave radar observing a walking target. The IQ stream is sampled
/// at the pulse repetition frequency.
struct CwRadarConfig {
  double carrier_frequency_hz = 25e9;
  double pulse_repetition_frequency_hz = 8e3;
  double duration_s = 1.0;
  double noise_power = 0.01;  // linear, relative to a unit-amplitude scatterer (20 dB SNR)
  std::uint64_t rng_seed = 0;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
  std::size_t sample_count() const;
  void validate() const;
};

/// One point scatterer of the gait model. Radial velocity is
/// modulation_mps * sin(2*pi*harmonic*cadence*t + phase_rad); harmonic 0 gives
/// the constant velocity modulation_mps * sin(phase_rad).
struct GaitScatterer {
  double amplitude = 1.0;
  double modulation_mps = 0.0;
  double phase_rad = 0.0;
  int harmonic = 1;
};

struct GaitModel {
  double torso_speed_mps = 0.0;
  double cadence_hz = 1.0;
  std::vector<GaitScatterer> scatterers;
  bool bulk_removed = true;  // treadmill: torso velocity centered at 0

  double bulk_velocity() const { return bulk_removed ? 0.0 : torso_speed_mps; }
  /// Upper bound of any scatterer's instantaneous radial speed.
  double max_speed() const;
  double velocity(std::size_t scatterer, double t) const;
  /// Closed-form integral of velocity(scatterer, .) over [0, t].
  double displacement(std::size_t scatterer, double t) const;
  void validate() const;
};

/// Uniform linear array FMCW radar. Use with_half_wavelength_spacing() to get
/// the d = lambda/2 geometry the model requires.
struct UlaConfig {
  double carrier_frequency_hz = 77e9;
  double bandwidth_hz = 3.6e9;
  std::size_t n_rx_elements = 8;
  double element_spacing_m = 0.0;
  double chirp_duration_s = 100e-6;
  std::size_t samples_per_chirp = 256;
  std::size_t n_chirps = 4;
  double noise_power = 0.0;
  std::uint64_t rng_seed = 0;

  static UlaConfig with_half_wavelength_spacing(double carrier_hz, double bandwidth_hz,
                                                std::size_t n_rx);

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
  double fast_time_rate_hz() const {
    return static_cast<double>(samples_per_chirp) / chirp_duration_s;
  }
  double beat_frequency_hz(double range_m) const;
  double max_unambiguous_range_m() const;
  void validate() const;
};

struct PointScatterer {
  double range_m = 0.0;
  double azimuth_rad = 0.0;
  double reflectivity = 1.0;
};

struct Scene {
  std::vector<PointScatterer> scatterers;
  void validate(const UlaConfig& config) const;
};

/// Complex baseband samples. `shape` is {n} for a time series and
/// {elements, chirps, samples} for a ULA cube (row-major).
struct IqSeries {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;
  std::vector<std::size_t> shape;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
  const cplx& at(std::size_t element, std::size_t chirp, std::size_t sample) const {
    return samples[(element * shape[1] + chirp) * shape[2] + sample];
  }
};

IqSeries simulate_gait_iq(const CwRadarConfig& config, const GaitModel& gait);
IqSeries simulate_ula_iq(const UlaConfig& config, const Scene& scene);
IqSeries decimate(const IqSeries& iq, std::size_t factor);

/// Writes `<base>.bin` (little-endian interleaved float64 re/im) and
/// `<base>.json` ({sample_rate_hz, shape, provenance}).
void write_iq(const IqSeries& iq, const std::filesystem::path& base);
IqSeries read_iq(const std::filesystem::path& base);

}  // namespace radsr
