#include "radsr/ula_scene.hpp"

#include <algorithm>
#include <cmath>

namespace radsr {

namespace {

constexpr double kDeg = kPi / 180.0;
constexpr double kNoisePower = 1e-4;

}  // namespace

Scene stair_scene() {
  return Scene{{{2.00, -16.0 * kDeg, 1.0}, {2.08, 0.0, 1.0}, {2.16, 16.0 * kDeg, 1.0}}};
}

UlaConfig ula_low_config(std::uint64_t seed) {
  auto c = UlaConfig::with_half_wavelength_spacing(77e9, 1.2e9, 4);
  c.noise_power = kNoisePower;
  c.rng_seed = seed;
  return c;
}

UlaConfig ula_high_config(std::uint64_t seed) {
  auto c = UlaConfig::with_half_wavelength_spacing(77e9, 3.6e9, 8);
  c.noise_power = kNoisePower;
  c.rng_seed = seed;
  return c;
}

Spectrum2D stair_map(const UlaConfig& config, const Scene& scene, bool hann_taper, std::size_t angle_fft_size) {
  const auto full = range_azimuth(simulate_ula_iq(config, scene), config, angle_fft_size, hann_taper);
  const double step = full.axis0.step;
  const auto begin = static_cast<std::size_t>(std::ceil(kStairRangeLo / step));
  const auto end = std::min(full.rows(), static_cast<std::size_t>(std::ceil(kStairRangeHi / step)));
  return slice_rows(full, begin, end);
}

Image16 stair_image(const Spectrum2D& map, std::size_t rows, double dynamic_range_db) {
  const double step = (kStairRangeHi - kStairRangeLo) / static_cast<double>(rows);
  const Axis range_axis{AxisKind::range, kStairRangeLo + step / 2.0, step, map.axis0.unit};
  Spectrum2D g = resample_to_grid(map, range_axis, rows, map.axis1, map.cols());
  const double top = *std::max_element(g.values.data.begin(), g.values.data.end());
  for (double& x : g.values.data) x -= top;
  return to_u16_image(g, -dynamic_range_db, 0.0);
}

std::vector<Peak> find_peaks(const Spectrum2D& map, double threshold_db) {
  const auto& v = map.values;
  double top = -std::numeric_limits<double>::infinity();
  for (double x : v.data) top = std::max(top, x);
  std::vector<Peak> peaks;
  for (std::size_t r = 0; r < v.rows; ++r)
    for (std::size_t c = 0; c < v.cols; ++c) {
      const double x = v(r, c);
      if (x < top - threshold_db) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
          const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
          if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(v.rows) || cc >= static_cast<std::ptrdiff_t>(v.cols))
            continue;
          if (!(x > v(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)))) {
            is_max = false;
            break;
          }
        }
      if (is_max) peaks.push_back({r, c, x});
    }
  return peaks;
}

}  // namespace radsr
