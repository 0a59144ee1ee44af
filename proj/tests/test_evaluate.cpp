#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "radsr/evaluate.hpp"
#include "radsr/image_io.hpp"

using namespace radsr;

namespace {

struct SmallCorpus {
  std::filesystem::path dir;
  SplitManifest m;
  SmallCorpus() {
    dir = std::filesystem::temp_directory_path() / "radsr_test_eval";
    std::filesystem::remove_all(dir);
    CorpusConfig c;
    c.n_subjects = 3;
    c.n_test_subjects = 1;
    c.halves_per_subject = 4;
    c.image_rows = 32;
    c.image_cols = 32;
    m = build_corpus(synthesize_population(3, 2), c, dir);
  }
  ~SmallCorpus() { std::filesystem::remove_all(dir); }
};

}  // namespace

TEST_CASE("targets scored against themselves") {
  SmallCorpus c;
  std::map<std::vector<std::uint16_t>, Image16> hi_of;
  for (const auto& r : c.m.test)
    hi_of[read_spectrum_image(c.dir / r.lo_path).pixels] = read_spectrum_image(c.dir / r.hi_path);
  const auto rep = evaluate_corpus(c.m, c.dir, [&](const Image16& lo) { return hi_of.at(lo.pixels); });
  CHECK(rep.rows.size() == c.m.test.size());
  CHECK(rep.ssim.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.uqi.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.psnr.infinite == c.m.test.size());
  CHECK(rep.psnr.count == 0);
  CHECK(rep.baseline_ssim.mean < 1.0);
  CHECK(rep.dynamic_range_db == doctest::Approx(c.m.db_ceil - c.m.db_floor));

  const auto out = c.dir / "report";
  write_metric_report(rep, out);
  std::ifstream csv(out / "metrics.csv");
  std::size_t n = 0;
  for (std::string l; std::getline(csv, l);) ++n;
  CHECK(n == c.m.test.size() + 1);
  const auto js = nlohmann::json::parse(std::ifstream(out / "summary.json"));
  CHECK(js.at("model").at("psnr_db").at("infinite") == c.m.test.size());
  CHECK(js.contains("delta"));
}

TEST_CASE("bilinear baseline is the identity predictor at equal dims") {
  SmallCorpus c;
  const auto rep = evaluate_corpus(c.m, c.dir, [](const Image16& lo) { return lo; });
  for (const auto& r : rep.rows) {
    CHECK(r.ssim == r.baseline_ssim);
    CHECK(r.psnr_db == r.baseline_psnr_db);
  }
}

TEST_CASE("missing test files are listed together") {
  SmallCorpus c;
  std::filesystem::remove(c.dir / c.m.test[0].lo_path);
  std::filesystem::remove(c.dir / c.m.test[2].hi_path);
  try {
    evaluate_corpus(c.m, c.dir, [](const Image16& lo) { return lo; });
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(c.m.test[0].lo_path) != std::string::npos);
    CHECK(msg.find(c.m.test[2].hi_path) != std::string::npos);
  }
}
