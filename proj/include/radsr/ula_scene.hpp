#pragma once

#include <cstdint>
#include <vector>

#include "radsr/radar_sim.hpp"
#include "radsr/spectral.hpp"

namespace radsr {

/// Three point targets like the edges of a three-step stair: 8 cm apart in
/// range and 16 degrees apart in azimuth.
Scene stair_scene();

/// B = 1.2 GHz, N = 4 and B = 3.6 GHz, N = 8 at 77 GHz, d = lambda/2.
UlaConfig ula_low_config(std::uint64_t seed = 0);
UlaConfig ula_high_config(std::uint64_t seed = 0);

/// Region of interest around the stair: [range_lo, range_hi) metres.
inline constexpr double kStairRangeLo = 1.6;
inline constexpr double kStairRangeHi = 2.6;

/// Range-azimuth map of `scene`, rows restricted to the region of interest.
Spectrum2D stair_map(const UlaConfig& config, const Scene& scene, bool hann_taper = true, std::size_t angle_fft_size = 64);

/// `map` on the demo grid: `rows` range cells over the region of interest
/// (linear interpolation), its own azimuth columns, values relative to the
/// map's peak and quantized over [-dynamic_range_db, 0] dB.
Image16 stair_image(const Spectrum2D& map, std::size_t rows = 64, double dynamic_range_db = 40.0);

struct Peak {
  std::size_t row = 0;
  std::size_t col = 0;
  double value_db = 0.0;
};

/// 2D local-max oracle: a cell is a peak when it is at least
/// (global max - threshold_db) and strictly above each of its existing
/// 8 neighbours.
std::vector<Peak> find_peaks(const Spectrum2D& map, double threshold_db = 10.0);

}  // namespace radsr
