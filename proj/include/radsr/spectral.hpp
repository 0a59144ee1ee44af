#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "radsr/common.hpp"
#include "radsr/radar_sim.hpp"

namespace radsr {

struct StftParams {
  std::size_t window_size = 512;
  double overlap_fraction = 0.75;
  double gaussian_sigma = 0.0;  // samples; 0 selects window_size / 6

  double sigma() const {
    return gaussian_sigma > 0.0 ? gaussian_sigma : static_cast<double>(window_size) / 6.0;
  }
  std::size_t hop() const;
  void validate() const;
};

std::vector<double> gaussian_window(std::size_t size, double sigma);

/// Number of full frames of `window` samples at `hop` spacing.
std::size_t stft_frame_count(std::size_t length, std::size_t window, std::size_t hop);

enum class AxisKind { time, range, velocity, azimuth };

std::string to_string(AxisKind kind);
AxisKind axis_kind_from_string(const std::string& s);

struct Axis {
  AxisKind kind = AxisKind::time;
  double start = 0.0;
  double step = 1.0;
  std::string unit;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
};

/// Real 2D map. Rows run along axis0 (time or range), columns along axis1
/// (velocity or azimuth).
struct Spectrum2D {
  Plane values;
  bool in_db = true;
  Axis axis0;
  Axis axis1;
  std::string provenance;

  std::size_t rows() const { return values.rows; }
  std::size_t cols() const { return values.cols; }
};

struct VelocityBudget {
  double v_max_mps = 0.0;
  double v_res_mps = 0.0;
};

VelocityBudget velocity_budget(double carrier_hz, double prf_hz, std::size_t window_size);

/// Complex STFT, one row per frame, fft-shifted columns (0 Hz at column w/2).
struct TimeFrequency {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::size_t hop = 0;
  double sample_rate_hz = 0.0;
  std::vector<cplx> data;

  const cplx& operator()(std::size_t frame, std::size_t bin) const { return data[frame * bins + bin]; }
  /// Doppler frequency of a shifted bin.
  double bin_frequency_hz(std::size_t bin) const;
  double frame_center_s(std::size_t frame) const;
};

TimeFrequency stft(const IqSeries& iq, const StftParams& params);

inline constexpr double kDbEpsilon = 1e-12;

Spectrum2D micro_doppler(const IqSeries& iq, const StftParams& params, double carrier_hz,
                         std::optional<double> crop_to_mps = std::nullopt);

/// Range FFT per element, coherent average over chirps, zero-padded angle FFT.
/// Columns are uniform in sin(azimuth); see azimuth_rad(). With `hann_taper`
/// both FFTs see a periodic Hann window, trading mainlobe width for sidelobes
/// near -31 dB instead of -13 dB.
Spectrum2D range_azimuth(const IqSeries& cube, const UlaConfig& config,
                         std::size_t angle_fft_size = 64, bool hann_taper = false);

double azimuth_rad(const Spectrum2D& range_azimuth_map, std::size_t col);

struct UlaBudget {
  double range_res_m = 0.0;
  double azimuth_res_rad = 0.0;
};

UlaBudget ula_budget(const UlaConfig& config, double theta_rad);

Spectrum2D resize_bilinear(const Spectrum2D& s, std::size_t out_rows, std::size_t out_cols);
Plane resize_bilinear(const Plane& p, std::size_t out_rows, std::size_t out_cols);

/// Rows [begin, end) of a spectrum, axis0 start shifted accordingly.
Spectrum2D slice_rows(const Spectrum2D& s, std::size_t begin, std::size_t end);

/// Resamples a dB spectrum onto the cell centres of a uniform physical grid.
/// Along axis1 each output cell integrates the linear power over its width:
/// the mean power of the input bins whose centres it contains (linear
/// interpolation when it contains none) times the bins per cell;
/// along axis0 values are linearly interpolated, clamped at the ends.
Spectrum2D resample_to_grid(const Spectrum2D& s, const Axis& rows_axis, std::size_t rows, const Axis& cols_axis,
                            std::size_t cols);

/// Single-channel 16-bit image with the affine map needed to recover dB values.
struct Image16 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> pixels;
  double db_floor = 0.0;
  double db_ceil = 1.0;
  Axis axis0;
  Axis axis1;
  std::string provenance;

  std::uint16_t operator()(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

Image16 to_u16_image(const Spectrum2D& s, double db_floor, double db_ceil);
std::uint16_t quantize_u16(double value, double db_floor, double db_ceil);
double dequantize_u16(std::uint16_t q, double db_floor, double db_ceil);
/// Dequantized values as a plane.
Plane dequantize(const Image16& img);
Spectrum2D to_spectrum(const Image16& img);

}  // namespace radsr
