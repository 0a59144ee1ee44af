#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/dataset.hpp"

namespace radsr {

struct PairMetrics {
  std::string subject_id;
  std::size_t index = 0;
  double ssim = 0.0;
  double uqi = 0.0;
  double psnr_db = 0.0;
  bool psnr_infinite = false;
  double baseline_ssim = 0.0;
  double baseline_uqi = 0.0;
  double baseline_psnr_db = 0.0;
  bool baseline_psnr_infinite = false;
};

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;     // finite values aggregated
  std::size_t infinite = 0;  // PSNR only: identical pairs
};

struct MetricReport {
  std::vector<PairMetrics> rows;
  MetricStats ssim, uqi, psnr, baseline_ssim, baseline_uqi, baseline_psnr;
  double dynamic_range_db = 0.0;

  nlohmann::json summary() const;
};

/// Maps a low-res image to a prediction of its high-res counterpart.
using Predictor = std::function<Image16(const Image16& lo)>;

/// Scores `predict(lo)` and the bilinear baseline (the low-res image resized
/// to the target grid) against every test target. Metrics run on dequantized
/// dB values with L = db_ceil - db_floor of the manifest; PSNR peak = L.
/// Missing files are reported together in one error.
MetricReport evaluate_corpus(const SplitManifest& m, const std::filesystem::path& root, const Predictor& predict);

/// Writes `metrics.csv` and `summary.json` into `out_dir`.
void write_metric_report(const MetricReport& r, const std::filesystem::path& out_dir);

}  // namespace radsr
