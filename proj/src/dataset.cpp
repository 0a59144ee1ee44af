#include "radsr/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "radsr/image_io.hpp"

namespace radsr {

namespace {

std::string subject_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%02zu", i);
  return buf;
}

std::string pair_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

std::string acquisition_id(const SubjectSpec& s) {
  std::ostringstream os;
  os << "acq-" << s.subject_id << "-" << std::hex << s.rng_seed;
  return os.str();
}

double percentile(std::vector<float>& v, double p) {
  if (v.empty()) throw std::runtime_error("no training values to derive the dynamic range from");
  const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  double b = a;
  if (hi != lo) b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

nlohmann::json record_to_json(const PairRecord& r) {
  return {{"subject_id", r.subject_id},   {"index", r.index},         {"side", to_string(r.side)},
          {"acquisition_id", r.acquisition_id}, {"lo", r.lo_path},   {"hi", r.hi_path},
          {"lo_sha256", r.lo_sha256},     {"hi_sha256", r.hi_sha256}, {"rows", r.rows},
          {"cols", r.cols}};
}

PairRecord record_from_json(const nlohmann::json& j) {
  PairRecord r;
  r.subject_id = j.at("subject_id").get<std::string>();
  r.index = j.at("index").get<std::size_t>();
  r.side = j.at("side").get<std::string>() == "right" ? Side::right : Side::left;
  r.acquisition_id = j.value("acquisition_id", "");
  r.lo_path = j.at("lo").get<std::string>();
  r.hi_path = j.at("hi").get<std::string>();
  r.lo_sha256 = j.value("lo_sha256", "");
  r.hi_sha256 = j.value("hi_sha256", "");
  r.rows = j.value("rows", std::size_t{0});
  r.cols = j.value("cols", std::size_t{0});
  return r;
}

}  // namespace

nlohmann::json gait_to_json(const GaitModel& g) {
  nlohmann::json sc = nlohmann::json::array();
  for (const auto& s : g.scatterers)
    sc.push_back({{"amplitude", s.amplitude},
                  {"modulation_mps", s.modulation_mps},
                  {"phase_rad", s.phase_rad},
                  {"harmonic", s.harmonic}});
  return {{"torso_speed_mps", g.torso_speed_mps},
          {"cadence_hz", g.cadence_hz},
          {"bulk_removed", g.bulk_removed},
          {"scatterers", sc}};
}

std::string to_string(Side s) { return s == Side::left ? "left" : "right"; }

std::size_t worker_threads() {
  if (const char* env = std::getenv("RADSR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

std::vector<SubjectSpec> synthesize_population(std::size_t n_subjects, std::uint64_t seed) {
  if (n_subjects == 0) throw std::invalid_argument("population needs at least one subject");
  std::vector<SubjectSpec> out;
  for (std::size_t i = 0; i < n_subjects; ++i) {
    SubjectSpec s;
    s.subject_id = subject_name(i);
    s.rng_seed = mix_seed(seed, i);
    std::mt19937_64 rng(mix_seed(s.rng_seed, 0x6a17));
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

    GaitModel& g = s.gait;
    g.cadence_hz = uni(0.85, 1.15);
    g.torso_speed_mps = uni(1.0, 1.6);
    g.bulk_removed = true;
    g.scatterers.push_back({1.0, uni(0.10, 0.20), uni(-0.3, 0.3), 2});  // torso bounce

    // swing amplitudes relative to the torso, treadmill walking near 1.5 m/s
    const double thigh = uni(0.7, 1.0), shin = uni(1.3, 1.8), foot = uni(2.2, 3.0), arm = uni(0.6, 1.0);
    const double base_phase = uni(-0.2, 0.2);
    const double asym = uni(0.25, 0.6);     // right-side odd-harmonic phase offset
    const double right_gain = uni(0.8, 0.95);  // right limbs reflect a little less
    for (Side side : {Side::left, Side::right}) {
      const bool right = side == Side::right;
      const double phase = base_phase + (right ? kPi + asym : 0.0);
      const double gain = right ? right_gain : 1.0;
      g.scatterers.push_back({0.50 * gain, thigh, phase, 1});
      g.scatterers.push_back({0.35 * gain, shin, phase + 0.15, 1});
      g.scatterers.push_back({0.20 * gain, foot, phase + 0.30, 1});
      g.scatterers.push_back({0.10 * gain, 0.35 * foot, phase + (right ? 0.0 : 0.5), 2});  // foot lift
      g.scatterers.push_back({0.25 * gain, arm, phase + kPi, 1});  // arm counter-swing
    }
    g.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<IqSegment> segment_half_gaits(const IqSeries& iq, const GaitModel& gait) {
  gait.validate();
  if (!(iq.sample_rate_hz > 0.0)) throw std::invalid_argument("IQ series has no sample rate");
  const double half = 1.0 / (2.0 * gait.cadence_hz);
  const double fs = iq.sample_rate_hz;
  const auto n_halves = static_cast<std::size_t>(std::floor(iq.duration_s() / half + 1e-9));
  if (n_halves == 0)
    throw std::invalid_argument("series of " + std::to_string(iq.duration_s()) +
                                " s is shorter than one half gait (" + std::to_string(half) + " s)");
  std::vector<IqSegment> out;
  for (std::size_t k = 0; k < n_halves; ++k) {
    const double t0 = static_cast<double>(k) * half;
    const double t1 = static_cast<double>(k + 1) * half;
    const auto b = static_cast<std::size_t>(std::ceil(t0 * fs - 1e-9));
    const auto e = std::min(iq.size(), static_cast<std::size_t>(std::ceil(t1 * fs - 1e-9)));
    IqSegment seg;
    seg.index = k;
    seg.side = k % 2 == 0 ? Side::left : Side::right;
    seg.t_begin_s = t0;
    seg.t_end_s = t1;
    seg.iq.sample_rate_hz = fs;
    seg.iq.samples.assign(iq.samples.begin() + static_cast<std::ptrdiff_t>(b),
                          iq.samples.begin() + static_cast<std::ptrdiff_t>(e));
    seg.iq.shape = {seg.iq.samples.size()};
    seg.iq.provenance = iq.provenance + "/half" + std::to_string(k);
    out.push_back(std::move(seg));
  }
  return out;
}

void CorpusConfig::validate() const {
  if (n_subjects == 0) throw std::invalid_argument("corpus needs at least one subject");
  if (n_test_subjects >= n_subjects) throw std::invalid_argument("test split must leave at least one train subject");
  if (halves_per_subject == 0) throw std::invalid_argument("halves_per_subject must be positive");
  if (image_rows < 2 || image_cols < 2) throw std::invalid_argument("image dims must be at least 2x2");
  if (decimation == 0) throw std::invalid_argument("decimation factor must be positive");
  if (!(crop_mps > 0.0)) throw std::invalid_argument("crop band must be positive");
  if (!(floor_percentile >= 0.0 && floor_percentile < ceil_percentile && ceil_percentile <= 100.0))
    throw std::invalid_argument("need 0 <= floor_percentile < ceil_percentile <= 100");
  CwRadarConfig r = radar;
  r.duration_s = 1.0;
  r.validate();
  const double fp = radar.pulse_repetition_frequency_hz;
  if (std::abs(fp / static_cast<double>(decimation) - std::round(fp / static_cast<double>(decimation))) > 1e-9)
    throw std::invalid_argument("f_p must be an integer multiple of the decimated rate");
  stft.validate();
}

nlohmann::json to_json(const CorpusConfig& c) {
  return {{"n_subjects", c.n_subjects},
          {"n_test_subjects", c.n_test_subjects},
          {"halves_per_subject", c.halves_per_subject},
          {"image_rows", c.image_rows},
          {"image_cols", c.image_cols},
          {"carrier_frequency_hz", c.radar.carrier_frequency_hz},
          {"pulse_repetition_frequency_hz", c.radar.pulse_repetition_frequency_hz},
          {"noise_power", c.radar.noise_power},
          {"decimation", c.decimation},
          {"window_size", c.stft.window_size},
          {"overlap_fraction", c.stft.overlap_fraction},
          {"gaussian_sigma", c.stft.gaussian_sigma},
          {"crop_mps", c.crop_mps},
          {"floor_percentile", c.floor_percentile},
          {"ceil_percentile", c.ceil_percentile},
          {"seed", c.seed}};
}

CorpusConfig corpus_config_from_json(const nlohmann::json& j, CorpusConfig c) {
  c.n_subjects = j.value("n_subjects", c.n_subjects);
  c.n_test_subjects = j.value("n_test_subjects", c.n_test_subjects);
  c.halves_per_subject = j.value("halves_per_subject", c.halves_per_subject);
  c.image_rows = j.value("image_rows", c.image_rows);
  c.image_cols = j.value("image_cols", c.image_cols);
  c.radar.carrier_frequency_hz = j.value("carrier_frequency_hz", c.radar.carrier_frequency_hz);
  c.radar.pulse_repetition_frequency_hz = j.value("pulse_repetition_frequency_hz", c.radar.pulse_repetition_frequency_hz);
  c.radar.noise_power = j.value("noise_power", c.radar.noise_power);
  c.decimation = j.value("decimation", c.decimation);
  c.stft.window_size = j.value("window_size", c.stft.window_size);
  c.stft.overlap_fraction = j.value("overlap_fraction", c.stft.overlap_fraction);
  c.stft.gaussian_sigma = j.value("gaussian_sigma", c.stft.gaussian_sigma);
  c.crop_mps = j.value("crop_mps", c.crop_mps);
  c.floor_percentile = j.value("floor_percentile", c.floor_percentile);
  c.ceil_percentile = j.value("ceil_percentile", c.ceil_percentile);
  c.seed = j.value("seed", c.seed);
  return c;
}

SubjectTimeline subject_timeline(const GaitModel& gait, const CorpusConfig& cfg) {
  const double fp = cfg.radar.pulse_repetition_frequency_hz;
  const double fs_hi = fp / static_cast<double>(cfg.decimation);
  // a decimated frame must exist on both sides of every boundary
  const double pad = (static_cast<double>(cfg.stft.window_size) / 2.0 + static_cast<double>(cfg.stft.hop())) / fs_hi;
  const double half = 1.0 / (2.0 * gait.cadence_hz);
  SubjectTimeline tl;
  tl.first_half = static_cast<std::size_t>(std::ceil(pad / half));
  const double end = static_cast<double>(tl.first_half + cfg.halves_per_subject) * half + pad;
  const double blocks = std::ceil(end * fs_hi);
  tl.duration_s = blocks * static_cast<double>(cfg.decimation) / fp;
  return tl;
}

std::vector<PairSpectra> subject_pairs(const SubjectSpec& subject, const CorpusConfig& cfg) {
  cfg.validate();
  const auto tl = subject_timeline(subject.gait, cfg);
  CwRadarConfig radar = cfg.radar;
  radar.duration_s = tl.duration_s;
  radar.rng_seed = subject.rng_seed;

  auto iq = simulate_gait_iq(radar, subject.gait);
  iq.provenance = acquisition_id(subject);
  const double fc = radar.carrier_frequency_hz;
  const auto lo = micro_doppler(iq, cfg.stft, fc, cfg.crop_mps);
  const auto hi = micro_doppler(decimate(iq, cfg.decimation), cfg.stft, fc);

  const double half = 1.0 / (2.0 * subject.gait.cadence_hz);
  const double v_step = 2.0 * cfg.crop_mps / static_cast<double>(cfg.image_cols);
  const Axis cols_axis{AxisKind::velocity, -cfg.crop_mps + v_step / 2.0, v_step, "m/s"};
  const double t_step = half / static_cast<double>(cfg.image_rows);

  std::vector<PairSpectra> out;
  for (std::size_t i = 0; i < cfg.halves_per_subject; ++i) {
    const std::size_t k = tl.first_half + i;
    const double t0 = static_cast<double>(k) * half;
    const Axis rows_axis{AxisKind::time, t0 + t_step / 2.0, t_step, "s"};
    PairSpectra p;
    p.index = i;
    p.side = k % 2 == 0 ? Side::left : Side::right;
    p.lo = resample_to_grid(lo, rows_axis, cfg.image_rows, cols_axis, cfg.image_cols);
    p.hi = resample_to_grid(hi, rows_axis, cfg.image_rows, cols_axis, cfg.image_cols);
    p.lo.provenance = iq.provenance + "/half" + std::to_string(i) + "/lo";
    p.hi.provenance = iq.provenance + "/half" + std::to_string(i) + "/hi";
    out.push_back(std::move(p));
  }
  return out;
}

nlohmann::json to_json(const SplitManifest& m) {
  nlohmann::json train = nlohmann::json::array(), test = nlohmann::json::array();
  for (const auto& r : m.train) train.push_back(record_to_json(r));
  for (const auto& r : m.test) test.push_back(record_to_json(r));
  nlohmann::json norm = nullptr;
  if (m.has_normalization) norm = {{"db_floor", m.db_floor}, {"db_ceil", m.db_ceil}};
  return {{"format", "radsr-corpus"},
          {"version", 1},
          {"seed", m.seed},
          {"dry_run", m.dry_run},
          {"normalization", norm},
          {"train_subjects", m.train_subjects},
          {"test_subjects", m.test_subjects},
          {"counts", {{"train", m.train.size()}, {"test", m.test.size()}}},
          {"config", m.config},
          {"subjects", m.subjects},
          {"train", train},
          {"test", test}};
}

SplitManifest manifest_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "radsr-corpus") throw std::runtime_error("not a corpus manifest");
  SplitManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.dry_run = j.value("dry_run", false);
  if (j.contains("normalization") && !j.at("normalization").is_null()) {
    m.has_normalization = true;
    m.db_floor = j.at("normalization").at("db_floor").get<double>();
    m.db_ceil = j.at("normalization").at("db_ceil").get<double>();
  }
  m.train_subjects = j.at("train_subjects").get<std::vector<std::string>>();
  m.test_subjects = j.at("test_subjects").get<std::vector<std::string>>();
  m.config = j.value("config", nlohmann::json::object());
  m.subjects = j.value("subjects", nlohmann::json::object());
  for (const auto& r : j.at("train")) m.train.push_back(record_from_json(r));
  for (const auto& r : j.at("test")) m.test.push_back(record_from_json(r));
  return m;
}

void save_manifest(const SplitManifest& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << to_json(m).dump(1) << "\n";
}

SplitManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read manifest " + path.string());
  try {
    return manifest_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
}

void split_subjects(const std::vector<std::string>& ids, std::size_t n_test, std::uint64_t seed,
                    std::vector<std::string>& train, std::vector<std::string>& test) {
  if (n_test >= ids.size()) throw std::invalid_argument("test split must leave at least one train subject");
  std::vector<std::string> order = ids;
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end())
    throw std::invalid_argument("subject ids must be distinct");
  std::mt19937_64 rng(mix_seed(seed, 0x5b1));
  for (std::size_t i = order.size() - 1; i > 0; --i) {  // Fisher-Yates with an explicit draw
    const auto j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
}

SplitManifest build_corpus(const std::vector<SubjectSpec>& population, const CorpusConfig& cfg_in,
                           const std::filesystem::path& corpus_dir, bool dry_run, const ProgressFn& progress) {
  CorpusConfig cfg = cfg_in;
  cfg.n_subjects = population.size();
  cfg.validate();

  SplitManifest m;
  m.seed = cfg.seed;
  m.dry_run = dry_run;
  m.config = to_json(cfg);
  std::vector<std::string> ids;
  for (const auto& s : population) {
    ids.push_back(s.subject_id);
    m.subjects[s.subject_id] = {{"rng_seed", s.rng_seed}, {"gait", gait_to_json(s.gait)}};
  }
  split_subjects(ids, cfg.n_test_subjects, cfg.seed, m.train_subjects, m.test_subjects);
  const std::set<std::string> test_set(m.test_subjects.begin(), m.test_subjects.end());

  auto plan = [&](const SubjectSpec& s, std::size_t i, Side side) {
    PairRecord r;
    r.subject_id = s.subject_id;
    r.index = i;
    r.side = side;
    r.acquisition_id = acquisition_id(s);
    const std::string dir = (test_set.count(s.subject_id) ? "test/" : "train/") + s.subject_id + "/";
    r.lo_path = dir + pair_stem(i) + "_lo.png";
    r.hi_path = dir + pair_stem(i) + "_hi.png";
    r.rows = cfg.image_rows;
    r.cols = cfg.image_cols;
    return r;
  };

  std::filesystem::create_directories(corpus_dir);
  if (dry_run) {
    for (const auto& s : population) {
      const auto tl = subject_timeline(s.gait, cfg);
      for (std::size_t i = 0; i < cfg.halves_per_subject; ++i) {
        const auto r = plan(s, i, (tl.first_half + i) % 2 == 0 ? Side::left : Side::right);
        (test_set.count(s.subject_id) ? m.test : m.train).push_back(r);
      }
    }
    save_manifest(m, corpus_dir / "manifest.json");
    if (progress) progress(1.0);
    return m;
  }

  // simulate subjects in parallel; results land in per-subject slots
  std::vector<std::vector<PairSpectra>> spectra(population.size());
  std::vector<std::exception_ptr> errors(population.size());
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < population.size(); i = next++) {
      try {
        spectra[i] = subject_pairs(population[i], cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(0.8 * static_cast<double>(d) / static_cast<double>(population.size()));
      }
    }
  };
  const std::size_t n_workers = std::min(worker_threads(), population.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("subject " + population[i].subject_id + ": " + e.what());
    }
  }

  std::vector<float> pool_values;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (test_set.count(population[i].subject_id)) continue;
    for (const auto& p : spectra[i]) {
      pool_values.insert(pool_values.end(), p.lo.values.data.begin(), p.lo.values.data.end());
      pool_values.insert(pool_values.end(), p.hi.values.data.begin(), p.hi.values.data.end());
    }
  }
  m.db_floor = percentile(pool_values, cfg.floor_percentile);
  m.db_ceil = percentile(pool_values, cfg.ceil_percentile);
  if (!(m.db_ceil > m.db_floor)) throw std::runtime_error("training spectra have no dynamic range");
  m.has_normalization = true;

  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& s = population[i];
    for (const auto& p : spectra[i]) {
      PairRecord r = plan(s, p.index, p.side);
      try {
        std::filesystem::create_directories((corpus_dir / r.lo_path).parent_path());
        write_spectrum_image(to_u16_image(p.lo, m.db_floor, m.db_ceil), corpus_dir / r.lo_path);
        write_spectrum_image(to_u16_image(p.hi, m.db_floor, m.db_ceil), corpus_dir / r.hi_path);
        r.lo_sha256 = sha256_file(corpus_dir / r.lo_path);
        r.hi_sha256 = sha256_file(corpus_dir / r.hi_path);
      } catch (const std::exception& e) {
        throw std::runtime_error("subject " + s.subject_id + " half gait " + std::to_string(p.index) + ": " +
                                 e.what());
      }
      (test_set.count(s.subject_id) ? m.test : m.train).push_back(std::move(r));
    }
    if (progress) progress(0.8 + 0.2 * static_cast<double>(i + 1) / static_cast<double>(population.size()));
  }
  save_manifest(m, corpus_dir / "manifest.json");
  return m;
}

VerifyReport verify_corpus(const SplitManifest& m, const std::filesystem::path& root) {
  VerifyReport rep;
  auto fail = [&](std::string v) {
    rep.ok = false;
    rep.violations.push_back(std::move(v));
  };
  if (m.dry_run) fail("manifest is a dry run; no images were materialized");
  if (!m.has_normalization) fail("manifest has no normalization constants");

  const std::set<std::string> train(m.train_subjects.begin(), m.train_subjects.end());
  const std::set<std::string> test(m.test_subjects.begin(), m.test_subjects.end());
  for (const auto& s : train)
    if (test.count(s)) fail("subject leak: " + s + " is in both train and test subject sets");

  std::set<std::pair<std::string, std::size_t>> seen;
  auto check = [&](const PairRecord& r, const std::set<std::string>& own, const std::set<std::string>& other,
                   const char* split) {
    ++rep.pairs_checked;
    const std::string name = std::string(split) + " pair " + r.subject_id + "/" + pair_stem(r.index);
    if (!own.count(r.subject_id)) {
      if (other.count(r.subject_id))
        fail("subject leak: " + name + " belongs to a subject of the other split");
      else
        fail(name + " has unknown subject " + r.subject_id);
    }
    if (!seen.insert({r.subject_id, r.index}).second) fail(name + " is listed twice");
    if (m.dry_run) return;

    std::size_t dims[2][2] = {{0, 0}, {0, 0}};
    const std::string* paths[2] = {&r.lo_path, &r.hi_path};
    const std::string* shas[2] = {&r.lo_sha256, &r.hi_sha256};
    bool readable = true;
    for (int k = 0; k < 2; ++k) {
      const auto p = root / *paths[k];
      if (!std::filesystem::exists(p)) {
        fail(name + ": missing " + std::string(k == 0 ? "low-res" : "high-res") + " file " + *paths[k]);
        readable = false;
        continue;
      }
      if (!std::filesystem::exists(sidecar_path(p))) fail(name + ": missing sidecar for " + *paths[k]);
      if (sha256_file(p) != *shas[k]) fail(name + ": checksum mismatch for " + *paths[k]);
      try {
        read_png16(p, dims[k][0], dims[k][1]);
      } catch (const std::exception& e) {
        fail(name + ": unreadable " + *paths[k] + " (" + e.what() + ")");
        readable = false;
      }
    }
    if (readable) {
      if (dims[0][0] != dims[1][0] || dims[0][1] != dims[1][1])
        fail(name + ": low/high dims differ (" + shape_str(dims[0][0], dims[0][1]) + " vs " +
             shape_str(dims[1][0], dims[1][1]) + ")");
      else if (dims[0][0] != r.rows || dims[0][1] != r.cols)
        fail(name + ": dims " + shape_str(dims[0][0], dims[0][1]) + " differ from manifest " +
             shape_str(r.rows, r.cols));
    }
  };
  for (const auto& r : m.train) check(r, train, test, "train");
  for (const auto& r : m.test) check(r, test, train, "test");
  return rep;
}

}  // namespace radsr
