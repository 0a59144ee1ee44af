#include "radsr/metrics.hpp"

#include <cmath>
#include <limits>

namespace radsr {

namespace {

void check_pair(const Plane& a, const Plane& b, std::size_t window, const char* metric) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(metric) + ": shape mismatch " + shape_str(a.rows, a.cols) + " vs " +
                                shape_str(b.rows, b.cols));
  if (window == 0 || a.rows < window || a.cols < window)
    throw std::invalid_argument(std::string(metric) + ": image " + shape_str(a.rows, a.cols) +
                                " is smaller than the " + std::to_string(window) + "x" + std::to_string(window) +
                                " window");
}

struct WindowStats {
  double mu_a, mu_b, var_a, var_b, cov;
};

// Weighted first and centred second moments of one window; `w` sums to 1.
WindowStats window_stats(const Plane& a, const Plane& b, std::size_t r0, std::size_t c0, std::size_t k,
                         const std::vector<double>& w) {
  WindowStats s{0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double g = w[i * k + j];
      s.mu_a += g * a(r0 + i, c0 + j);
      s.mu_b += g * b(r0 + i, c0 + j);
    }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double g = w[i * k + j];
      const double da = a(r0 + i, c0 + j) - s.mu_a;
      const double db = b(r0 + i, c0 + j) - s.mu_b;
      s.var_a += g * da * da;
      s.var_b += g * db * db;
      s.cov += g * (da * db);
    }
  return s;
}

std::vector<double> gaussian_kernel(std::size_t k, double sigma) {
  std::vector<double> w(k * k);
  const double c = (static_cast<double>(k) - 1.0) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double di = static_cast<double>(i) - c, dj = static_cast<double>(j) - c;
      w[i * k + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      total += w[i * k + j];
    }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

double ssim(const Plane& a, const Plane& b, double dynamic_range, std::size_t window, double sigma) {
  check_pair(a, b, window, "ssim");
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("ssim: window sigma must be positive");
  const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
  const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);
  const auto w = gaussian_kernel(window, sigma);

  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r + window <= a.rows; ++r)
    for (std::size_t c = 0; c + window <= a.cols; ++c, ++n) {
      const auto s = window_stats(a, b, r, c, window, w);
      const double num = (2.0 * (s.mu_a * s.mu_b) + c1) * (2.0 * s.cov + c2);
      const double den = ((s.mu_a * s.mu_a + s.mu_b * s.mu_b) + c1) * ((s.var_a + s.var_b) + c2);
      total += num / den;
    }
  return total / static_cast<double>(n);
}

double uqi(const Plane& a, const Plane& b, std::size_t window) {
  check_pair(a, b, window, "uqi");
  const std::vector<double> w(window * window, 1.0 / static_cast<double>(window * window));

  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r + window <= a.rows; ++r)
    for (std::size_t c = 0; c + window <= a.cols; ++c, ++n) {
      const auto s = window_stats(a, b, r, c, window, w);
      const double var_sum = s.var_a + s.var_b;
      const double mean_sq = s.mu_a * s.mu_a + s.mu_b * s.mu_b;
      if (var_sum == 0.0) {
        total += s.mu_a == s.mu_b ? 1.0 : 0.0;
        continue;
      }
      const double structure = 2.0 * s.cov / var_sum;
      const double luminance = mean_sq == 0.0 ? 1.0 : 2.0 * (s.mu_a * s.mu_b) / mean_sq;
      total += structure * luminance;
    }
  return total / static_cast<double>(n);
}

PsnrResult psnr(const Plane& a, const Plane& b, double peak) {
  if (!a.same_shape(b))
    throw std::invalid_argument("psnr: shape mismatch " + shape_str(a.rows, a.cols) + " vs " +
                                shape_str(b.rows, b.cols));
  if (a.size() == 0) throw std::invalid_argument("psnr: empty images");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sse += d * d;
  }
  if (sse == 0.0) return {std::numeric_limits<double>::infinity(), true};
  const double mse = sse / static_cast<double>(a.size());
  return {10.0 * std::log10(peak * peak / mse), false};
}

}  // namespace radsr
