#pragma once

#include <cstddef>

#include "radsr/common.hpp"

namespace radsr {

/// Mean local SSIM over all fully contained Gaussian windows, with
/// C1 = (0.01 L)^2 and C2 = (0.03 L)^2 for L = dynamic_range.
double ssim(const Plane& a, const Plane& b, double dynamic_range, std::size_t window = 11, double sigma = 1.5);

/// Mean universal quality index over all fully contained box windows.
/// Windows that are constant on both sides score 1 when equal and 0 otherwise.
double uqi(const Plane& a, const Plane& b, std::size_t window = 8);

struct PsnrResult {
  double db = 0.0;
  bool infinite = false;  // identical images
};

/// 10 log10(peak^2 / MSE).
PsnrResult psnr(const Plane& a, const Plane& b, double peak);

}  // namespace radsr
