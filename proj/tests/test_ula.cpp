#include <doctest.h>

#include <cmath>

#include "radsr/ula_scene.hpp"

using namespace radsr;

namespace {

Spectrum2D map_of(std::size_t rows, std::size_t cols, double fill) {
  Spectrum2D s;
  s.values = Plane(rows, cols, fill);
  s.axis0 = {AxisKind::range, 0.0, 1.0, "m"};
  s.axis1 = {AxisKind::azimuth, 0.0, 1.0, "sin(az)"};
  return s;
}

void bump(Spectrum2D& s, double r0, double c0, double height_db) {
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t c = 0; c < s.cols(); ++c) {
      const double d2 = (r - r0) * (r - r0) + (c - c0) * (c - c0);
      s.values(r, c) = std::max(s.values(r, c), height_db - d2);
    }
}

}  // namespace

TEST_CASE("local-max oracle on hand-built maps") {
  auto s = map_of(20, 20, -100.0);
  bump(s, 5, 5, 0.0);
  bump(s, 14, 12, -3.0);
  auto peaks = find_peaks(s);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].row == 5);
  CHECK(peaks[0].col == 5);
  CHECK(peaks[1].row == 14);
  CHECK(peaks[1].col == 12);

  bump(s, 10, 2, -11.0);  // below the -10 dB threshold
  CHECK(find_peaks(s).size() == 2);
  CHECK(find_peaks(s, 12.0).size() == 3);

  // a corner maximum only compares against existing neighbours
  auto e = map_of(6, 6, -50.0);
  bump(e, 0, 0, 0.0);
  peaks = find_peaks(e);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].row == 0);
  CHECK(peaks[0].col == 0);

  // plateaus have no strict maximum
  CHECK(find_peaks(map_of(5, 5, 1.0)).empty());
  auto p = map_of(5, 5, -40.0);
  p.values(2, 2) = p.values(2, 3) = 0.0;
  CHECK(find_peaks(p).empty());
}

TEST_CASE("Hann taper keeps a lone scatterer on its grid cell") {
  auto cfg = UlaConfig::with_half_wavelength_spacing(77e9, 3.6e9, 8);
  const auto plain = range_azimuth(simulate_ula_iq(cfg, Scene{{{5.0, 0.0, 1.0}}}), cfg);
  const auto tapered = range_azimuth(simulate_ula_iq(cfg, Scene{{{5.0, 0.0, 1.0}}}), cfg, 64, true);
  const auto pp = find_peaks(plain, 25.0);
  const auto pt = find_peaks(tapered, 25.0);
  REQUIRE(pt.size() == 1);
  CHECK(pt[0].row == static_cast<std::size_t>(std::lround(5.0 / ula_budget(cfg, 0).range_res_m)));
  CHECK(pt[0].col == 32);
  // rectangular weighting shows sidelobes above -25 dB, Hann does not
  CHECK(pp.size() > 1);
}

TEST_CASE("stair scene separations sit between the two parametrizations' budgets") {
  const auto sc = stair_scene().scatterers;
  REQUIRE(sc.size() == 3);
  for (int p = 0; p < 2; ++p) {
    const auto cfg = p ? ula_high_config() : ula_low_config();
    const auto b = ula_budget(cfg, 0.0);
    for (std::size_t i = 0; i + 1 < sc.size(); ++i) {
      const double dr = sc[i + 1].range_m - sc[i].range_m;
      const double da = sc[i + 1].azimuth_rad - sc[i].azimuth_rad;
      if (p) {
        CHECK(dr > b.range_res_m);
        CHECK(da > b.azimuth_res_rad);
      } else {
        CHECK(dr < b.range_res_m);
        CHECK(da < b.azimuth_res_rad);
      }
    }
  }
}

TEST_CASE("stair scene: high-res resolves three peaks, low-res merges") {
  for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 20190515ULL}) {
    const auto hi = stair_map(ula_high_config(seed), stair_scene());
    const auto lo = stair_map(ula_low_config(seed), stair_scene());
    const auto ph = find_peaks(hi);
    CHECK(ph.size() == 3);
    CHECK(find_peaks(lo).size() < 3);
    // each high-res peak lands within one grid cell of a scatterer
    for (const auto& pk : ph) {
      bool near = false;
      for (const auto& s : stair_scene().scatterers)
        near |= std::abs(hi.axis0.at(pk.row) - s.range_m) <= hi.axis0.step &&
                std::abs(hi.axis1.at(pk.col) - std::sin(s.azimuth_rad)) <= hi.axis1.step;
      CHECK(near);
    }
  }
  const auto m = stair_map(ula_high_config(), stair_scene());
  CHECK(m.axis0.at(0) >= kStairRangeLo);
  CHECK(m.axis0.at(m.rows() - 1) < kStairRangeHi);
}
