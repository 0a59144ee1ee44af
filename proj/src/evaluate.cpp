#include "radsr/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "radsr/image_io.hpp"
#include "radsr/metrics.hpp"

namespace radsr {

namespace {

MetricStats stats(const std::vector<PairMetrics>& rows, double PairMetrics::*field, bool PairMetrics::*inf = nullptr) {
  MetricStats s;
  double sum = 0.0;
  for (const auto& r : rows) {
    if (inf && r.*inf) {
      ++s.infinite;
      continue;
    }
    sum += r.*field;
    ++s.count;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const auto& r : rows) {
    if (inf && r.*inf) continue;
    sq += (r.*field - s.mean) * (r.*field - s.mean);
  }
  s.std = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

nlohmann::json stats_json(const MetricStats& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"count", s.count}, {"infinite", s.infinite}};
}

std::string psnr_text(double v, bool inf) {
  if (inf) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

nlohmann::json MetricReport::summary() const {
  return {{"pairs", rows.size()},
          {"dynamic_range_db", dynamic_range_db},
          {"model", {{"ssim", stats_json(ssim)}, {"uqi", stats_json(uqi)}, {"psnr_db", stats_json(psnr)}}},
          {"baseline_bilinear",
           {{"ssim", stats_json(baseline_ssim)}, {"uqi", stats_json(baseline_uqi)}, {"psnr_db", stats_json(baseline_psnr)}}},
          {"delta",
           {{"ssim", ssim.mean - baseline_ssim.mean},
            {"uqi", uqi.mean - baseline_uqi.mean},
            {"psnr_db", psnr.mean - baseline_psnr.mean}}}};
}

MetricReport evaluate_corpus(const SplitManifest& m, const std::filesystem::path& root, const Predictor& predict) {
  if (!m.has_normalization) throw std::runtime_error("manifest has no normalization constants (dry run?)");
  std::string missing;
  for (const auto& r : m.test)
    for (const auto* p : {&r.lo_path, &r.hi_path})
      if (!std::filesystem::exists(root / *p)) missing += (missing.empty() ? "" : ", ") + *p;
  if (!missing.empty()) throw std::runtime_error("missing test files: " + missing);

  MetricReport rep;
  rep.dynamic_range_db = m.db_ceil - m.db_floor;
  const double L = rep.dynamic_range_db;
  for (const auto& r : m.test) {
    const Image16 lo = read_spectrum_image(root / r.lo_path);
    const Image16 hi = read_spectrum_image(root / r.hi_path);
    const Plane target = dequantize(hi);
    const Plane pred = dequantize(predict(lo));
    const Plane base = resize_bilinear(dequantize(lo), target.rows, target.cols);
    if (!pred.same_shape(target))
      throw std::runtime_error("prediction for " + r.subject_id + "/" + std::to_string(r.index) + " is " +
                               shape_str(pred.rows, pred.cols) + ", target is " + shape_str(target.rows, target.cols));
    PairMetrics pm;
    pm.subject_id = r.subject_id;
    pm.index = r.index;
    pm.ssim = ssim(pred, target, L);
    pm.uqi = uqi(pred, target);
    const auto p = psnr(pred, target, L);
    pm.psnr_db = p.db;
    pm.psnr_infinite = p.infinite;
    pm.baseline_ssim = ssim(base, target, L);
    pm.baseline_uqi = uqi(base, target);
    const auto pb = psnr(base, target, L);
    pm.baseline_psnr_db = pb.db;
    pm.baseline_psnr_infinite = pb.infinite;
    rep.rows.push_back(pm);
  }
  rep.ssim = stats(rep.rows, &PairMetrics::ssim);
  rep.uqi = stats(rep.rows, &PairMetrics::uqi);
  rep.psnr = stats(rep.rows, &PairMetrics::psnr_db, &PairMetrics::psnr_infinite);
  rep.baseline_ssim = stats(rep.rows, &PairMetrics::baseline_ssim);
  rep.baseline_uqi = stats(rep.rows, &PairMetrics::baseline_uqi);
  rep.baseline_psnr = stats(rep.rows, &PairMetrics::baseline_psnr_db, &PairMetrics::baseline_psnr_infinite);
  return rep;
}

void write_metric_report(const MetricReport& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "metrics.csv");
  if (!csv) throw std::runtime_error("cannot write " + (out_dir / "metrics.csv").string());
  csv << "subject,index,ssim,uqi,psnr_db,baseline_ssim,baseline_uqi,baseline_psnr_db\n";
  char buf[128];
  for (const auto& row : r.rows) {
    csv << row.subject_id << "," << row.index;
    std::snprintf(buf, sizeof buf, ",%.10g,%.10g,", row.ssim, row.uqi);
    csv << buf << psnr_text(row.psnr_db, row.psnr_infinite);
    std::snprintf(buf, sizeof buf, ",%.10g,%.10g,", row.baseline_ssim, row.baseline_uqi);
    csv << buf << psnr_text(row.baseline_psnr_db, row.baseline_psnr_infinite) << "\n";
  }
  std::ofstream js(out_dir / "summary.json");
  if (!js) throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
  js << r.summary().dump(2) << "\n";
}

}  // namespace radsr
