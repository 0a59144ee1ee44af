#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace radsr {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

/// Dense row-major real matrix. Used for spectra, images and metric inputs.
struct Plane {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Plane& o) const { return rows == o.rows && cols == o.cols; }
};

std::string shape_str(std::size_t rows, std::size_t cols);

/// SplitMix64 finaliser over (seed, stream); used to derive independent
/// per-subject, per-network and per-epoch seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace radsr
