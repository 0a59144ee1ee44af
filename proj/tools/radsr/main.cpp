#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "radsr/dataset.hpp"
#include "radsr/evaluate.hpp"
#include "radsr/image_io.hpp"
#include "radsr/render.hpp"
#include "radsr/spectral.hpp"
#include "radsr/train.hpp"
#include "radsr/ula_scene.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace radsr;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct RunConfig {
  std::string subcommand;
  std::string config_file;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  int verbosity = 0;
  CLI::Option* seed_opt = nullptr;

  bool seed_given() const { return seed_opt && seed_opt->count() > 0; }
};

void add_common(CLI::App* sub, RunConfig& rc, bool with_out = true) {
  sub->add_option("--config", rc.config_file, "JSON config file; flags override its fields")->check(CLI::ExistingFile);
  sub->add_flag("-v,--verbose", rc.verbosity, "more output on stderr (repeatable)");
  if (with_out) sub->add_option("--out", rc.out, "output directory; nothing is written outside it")->required();
}

CLI::Option* add_seed(CLI::App* sub, RunConfig& rc) {
  return sub->add_option("--seed", rc.seed, "run seed (default " + std::to_string(kDefaultSeed) + ")");
}

json read_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path);
  try {
    json j = json::parse(is);
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

template <class T>
void set_if(const CLI::Option* opt, T& field, const T& value) {
  if (opt->count() > 0) field = value;
}

void progress(double fraction) {
  std::printf("PROGRESS %.6f\n", fraction);
  std::fflush(stdout);
}

void prepare_out(const RunConfig& rc, const json& effective) {
  fs::create_directories(rc.out);
  json run = {{"subcommand", rc.subcommand},
              {"config_file", rc.config_file},
              {"seed", rc.seed},
              {"verbosity", rc.verbosity},
              {"threads", worker_threads()},
              {"config", effective}};
  std::ofstream os(fs::path(rc.out) / "run.json");
  if (!os) throw std::runtime_error("cannot write " + (fs::path(rc.out) / "run.json").string());
  os << run.dump(2) << "\n";
}

// validation failures of user-supplied values are usage errors
template <class F>
void validate_as_usage(F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Image16 relative_image(const Spectrum2D& s, double range_db) {
  double top = s.values.data.empty() ? 0.0 : s.values.data[0];
  for (double v : s.values.data) top = std::max(top, v);
  return to_u16_image(s, top - range_db, top);
}

json peaks_json(const Spectrum2D& map, const std::vector<Peak>& peaks) {
  json arr = json::array();
  for (const auto& p : peaks)
    arr.push_back({{"range_m", map.axis0.at(p.row)},
                   {"azimuth_deg", azimuth_rad(map, p.col) * 180.0 / kPi},
                   {"level_db", p.value_db}});
  return arr;
}

// ---------------------------------------------------------------- budget

struct BudgetArgs {
  double fc = 0, fp = 0, B = 0, theta = 0;
  std::size_t w = 0, N = 0;
  bool as_json = false;
  CLI::Option *o_fc, *o_fp, *o_w, *o_B, *o_N, *o_theta;
};

int cmd_budget(const BudgetArgs& a) {
  const bool velocity = a.o_fp->count() || a.o_w->count();
  const bool ula = a.o_B->count() || a.o_N->count() || a.o_theta->count();
  if (velocity && ula) throw UsageError("budget: give either --fc --fp --w or --B/--N [--theta], not both");
  if (!velocity && !ula) throw UsageError("budget: give --fc --fp --w (velocity) or --B and/or --N [--theta] (ULA)");
  json j;
  if (velocity) {
    std::string missing;
    for (auto [o, name] : {std::pair{a.o_fc, "--fc"}, {a.o_fp, "--fp"}, {a.o_w, "--w"}})
      if (!o->count()) missing += std::string(missing.empty() ? "" : ", ") + name;
    if (a.o_fp->count() && !(a.fp > 0)) throw UsageError("budget: --fp must be positive");
    if (!missing.empty()) throw UsageError("budget: missing " + missing);
    VelocityBudget b;
    validate_as_usage([&] { b = velocity_budget(a.fc, a.fp, a.w); });
    j = {{"carrier_hz", a.fc}, {"prf_hz", a.fp}, {"window", a.w}, {"v_max_mps", b.v_max_mps}, {"v_res_mps", b.v_res_mps}};
    if (!a.as_json) std::printf("v_max  %.9g m/s\nv_res  %.9g m/s\n", b.v_max_mps, b.v_res_mps);
  } else {
    if (a.o_B->count() && !(a.B > 0)) throw UsageError("budget: --B must be positive");
    if (a.o_N->count() && a.N == 0) throw UsageError("budget: --N must be positive");
    const double fc = a.o_fc->count() ? a.fc : 77e9;
    UlaBudget b;
    validate_as_usage([&] {
      b = ula_budget(UlaConfig::with_half_wavelength_spacing(fc, a.o_B->count() ? a.B : 1e9, a.o_N->count() ? a.N : 1),
                     a.theta);
    });
    j = json::object();
    if (a.o_B->count()) {
      j["bandwidth_hz"] = a.B;
      j["range_res_m"] = b.range_res_m;
      if (!a.as_json) std::printf("R_res    %.9g m\n", b.range_res_m);
    }
    if (a.o_N->count()) {
      j["n_rx"] = a.N;
      j["theta_rad"] = a.theta;
      j["azimuth_res_rad"] = b.azimuth_res_rad;
      j["azimuth_res_deg"] = b.azimuth_res_rad * 180.0 / kPi;
      if (!a.as_json)
        std::printf("Psi_res  %.9g rad (%.6g deg)\n", b.azimuth_res_rad, b.azimuth_res_rad * 180.0 / kPi);
    } else if (a.o_theta->count()) {
      throw UsageError("budget: --theta needs --N");
    }
  }
  if (a.as_json) std::printf("%s\n", j.dump().c_str());
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string kind = "gait";
  std::size_t subject = 0;
  double duration_s = 4.0;
  double fc = 0, fp = 0, noise = 0, B = 0;
  std::size_t N = 0;
  double range_db = 60.0;
  CLI::Option *o_kind, *o_subject, *o_duration, *o_fc, *o_fp, *o_noise, *o_B, *o_N, *o_range;
};

int cmd_simulate(RunConfig& rc, const SimulateArgs& a) {
  json cfg = read_config_file(rc.config_file);
  if (!rc.seed_given() && cfg.contains("seed")) rc.seed = cfg["seed"].get<std::uint64_t>();
  std::string kind = cfg.value("kind", std::string("gait"));
  set_if(a.o_kind, kind, a.kind);
  double range_db = cfg.value("display_range_db", 60.0);
  set_if(a.o_range, range_db, a.range_db);
  if (!(range_db > 0)) throw UsageError("simulate: display range must be positive");
  const fs::path out(rc.out);

  if (kind == "gait") {
    std::size_t subject = cfg.value("subject", std::size_t{0});
    set_if(a.o_subject, subject, a.subject);
    CwRadarConfig radar;
    radar.duration_s = cfg.value("duration_s", 4.0);
    radar.carrier_frequency_hz = cfg.value("carrier_frequency_hz", radar.carrier_frequency_hz);
    radar.pulse_repetition_frequency_hz = cfg.value("pulse_repetition_frequency_hz", radar.pulse_repetition_frequency_hz);
    radar.noise_power = cfg.value("noise_power", radar.noise_power);
    set_if(a.o_duration, radar.duration_s, a.duration_s);
    set_if(a.o_fc, radar.carrier_frequency_hz, a.fc);
    set_if(a.o_fp, radar.pulse_repetition_frequency_hz, a.fp);
    set_if(a.o_noise, radar.noise_power, a.noise);
    if (a.o_B->count() || a.o_N->count()) throw UsageError("simulate: --B/--N only apply to --kind ula");

    const auto pop = synthesize_population(subject + 1, rc.seed);
    const auto& spec = pop[subject];
    radar.rng_seed = spec.rng_seed;
    IqSeries iq;
    validate_as_usage([&] { iq = simulate_gait_iq(radar, spec.gait); });
    const StftParams stft;
    Spectrum2D lo, hi;
    validate_as_usage([&] {
      lo = micro_doppler(iq, stft, radar.carrier_frequency_hz, 6.0);
      hi = micro_doppler(decimate(iq, 4), stft, radar.carrier_frequency_hz);
    });
    json eff = {{"kind", kind},
                {"subject", subject},
                {"subject_id", spec.subject_id},
                {"seed", rc.seed},
                {"duration_s", radar.duration_s},
                {"carrier_frequency_hz", radar.carrier_frequency_hz},
                {"pulse_repetition_frequency_hz", radar.pulse_repetition_frequency_hz},
                {"noise_power", radar.noise_power},
                {"display_range_db", range_db},
                {"gait", gait_to_json(spec.gait)}};
    prepare_out(rc, eff);
    write_iq(iq, out / "iq");
    progress(0.5);
    write_spectrum_image(relative_image(lo, range_db), out / "lo.png");
    write_spectrum_image(relative_image(hi, range_db), out / "hi.png");
    progress(1.0);
    std::printf("%s\n", json({{"samples", iq.size()}, {"lo", shape_str(lo.rows(), lo.cols())},
                              {"hi", shape_str(hi.rows(), hi.cols())}})
                            .dump()
                            .c_str());
    return 0;
  }
  if (kind == "ula") {
    double fc = cfg.value("carrier_frequency_hz", 77e9);
    double B = cfg.value("bandwidth_hz", 3.6e9);
    std::size_t N = cfg.value("n_rx", std::size_t{8});
    double noise = cfg.value("noise_power", 1e-4);
    set_if(a.o_fc, fc, a.fc);
    set_if(a.o_B, B, a.B);
    set_if(a.o_N, N, a.N);
    set_if(a.o_noise, noise, a.noise);
    if (a.o_subject->count() || a.o_duration->count() || a.o_fp->count())
      throw UsageError("simulate: --subject/--duration/--fp only apply to --kind gait");
    UlaConfig ula;
    IqSeries cube;
    validate_as_usage([&] {
      ula = UlaConfig::with_half_wavelength_spacing(fc, B, N);
      ula.noise_power = noise;
      ula.rng_seed = rc.seed;
      cube = simulate_ula_iq(ula, stair_scene());
    });
    const auto map = range_azimuth(cube, ula);
    json eff = {{"kind", kind}, {"seed", rc.seed},          {"carrier_frequency_hz", fc}, {"bandwidth_hz", B},
                {"n_rx", N},     {"noise_power", noise},    {"display_range_db", range_db}, {"scene", "stair"}};
    prepare_out(rc, eff);
    write_iq(cube, out / "iq");
    write_spectrum_image(relative_image(map, range_db), out / "range_azimuth.png");
    progress(1.0);
    std::printf("%s\n", json({{"samples", cube.size()}, {"map", shape_str(map.rows(), map.cols())}}).dump().c_str());
    return 0;
  }
  throw UsageError("simulate: --kind must be gait or ula, got '" + kind + "'");
}

// ---------------------------------------------------------------- build-corpus

struct CorpusArgs {
  std::size_t subjects = 0, test_subjects = 0, halves = 0, rows = 0, cols = 0;
  bool dry_run = false;
  CLI::Option *o_subjects, *o_test, *o_halves, *o_rows, *o_cols;
};

int cmd_build_corpus(RunConfig& rc, const CorpusArgs& a) {
  CorpusConfig cfg;
  cfg.seed = kDefaultSeed;
  const json file = read_config_file(rc.config_file);
  validate_as_usage([&] {
    try {
      cfg = corpus_config_from_json(file, cfg);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  });
  if (rc.seed_given()) cfg.seed = rc.seed;
  rc.seed = cfg.seed;
  set_if(a.o_subjects, cfg.n_subjects, a.subjects);
  set_if(a.o_test, cfg.n_test_subjects, a.test_subjects);
  set_if(a.o_halves, cfg.halves_per_subject, a.halves);
  set_if(a.o_rows, cfg.image_rows, a.rows);
  set_if(a.o_cols, cfg.image_cols, a.cols);
  validate_as_usage([&] { cfg.validate(); });

  json eff = to_json(cfg);
  eff["dry_run"] = a.dry_run;
  prepare_out(rc, eff);
  const auto pop = synthesize_population(cfg.n_subjects, cfg.seed);
  const auto m = build_corpus(pop, cfg, rc.out, a.dry_run, progress);
  json summary = {{"train_pairs", m.train.size()},
                  {"test_pairs", m.test.size()},
                  {"train_subjects", m.train_subjects},
                  {"test_subjects", m.test_subjects},
                  {"dry_run", m.dry_run}};
  if (!a.dry_run) {
    const auto rep = verify_corpus(m, rc.out);
    summary["db_floor"] = m.db_floor;
    summary["db_ceil"] = m.db_ceil;
    summary["verified"] = rep.ok;
    if (!rep.ok) {
      std::string all;
      for (const auto& v : rep.violations) all += (all.empty() ? "" : "; ") + v;
      throw std::runtime_error("corpus verification failed: " + all);
    }
  }
  std::printf("%s\n", summary.dump().c_str());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus, resume;
  std::size_t epochs = 0, unets = 0, depth = 0, base = 0, disc_base = 0, checkpoint_every = 0;
  double lambda_l1 = 0, lambda_percep = 0, lr = 0;
  bool no_self_test = false, nan_check = false;
  CLI::Option *o_epochs, *o_unets, *o_depth, *o_base, *o_disc_base, *o_ck_every, *o_l1, *o_percep, *o_lr;
};

SplitManifest corpus_manifest(const std::string& dir) {
  const fs::path p = fs::path(dir) / "manifest.json";
  if (!fs::exists(p)) throw UsageError("no manifest.json in corpus directory " + dir);
  auto m = load_manifest(p);
  if (!m.has_normalization) throw std::runtime_error("corpus " + dir + " is a dry run (no images)");
  return m;
}

int cmd_train(RunConfig& rc, const TrainArgs& a) {
  TrainConfig cfg;
  std::optional<fs::path> resume;
  if (!a.resume.empty()) {
    resume = a.resume;
    cfg = train_config_from_json(neuro::load_checkpoint(a.resume).header.at("config"));
  }
  const json file = read_config_file(rc.config_file);
  validate_as_usage([&] {
    try {
      cfg = train_config_from_json(file, cfg);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  });
  if (rc.seed_given()) cfg.seed = rc.seed;
  rc.seed = cfg.seed;
  set_if(a.o_epochs, cfg.epochs, a.epochs);
  set_if(a.o_unets, cfg.generator.n_unets, a.unets);
  set_if(a.o_depth, cfg.generator.unet.depth, a.depth);
  set_if(a.o_base, cfg.generator.unet.base_channels, a.base);
  set_if(a.o_disc_base, cfg.discriminator.base_channels, a.disc_base);
  set_if(a.o_ck_every, cfg.checkpoint_every, a.checkpoint_every);
  set_if(a.o_l1, cfg.loss.lambda_l1, a.lambda_l1);
  set_if(a.o_percep, cfg.loss.lambda_percep, a.lambda_percep);
  if (a.o_lr->count()) cfg.adam_g.lr = cfg.adam_d.lr = a.lr;
  if (a.no_self_test) cfg.self_test = false;
  if (a.nan_check) cfg.nan_check = true;

  const auto m = corpus_manifest(a.corpus);
  cfg.db_floor = m.db_floor;
  cfg.db_ceil = m.db_ceil;
  validate_as_usage([&] { cfg.validate(); });
  prepare_out(rc, to_json(cfg));

  const auto data = load_pairs(m, a.corpus, "train");
  TrainCallbacks cb;
  cb.stop = &g_stop;
  cb.on_step = [&](const LossReport& r, double fraction) {
    progress(fraction);
    if (rc.verbosity > 0)
      std::fprintf(stderr, "step %zu  D %.6f  G_adv %.6f  L1 %.6f  percep %.6f  total %.6f\n", r.step, r.adv_d,
                   r.adv_g, r.l1, r.percep, r.total_g);
  };
  const auto res = train(cfg, data, rc.out, resume, cb);
  std::printf("%s\n", json({{"steps_done", res.steps_done},
                            {"steps_this_run", res.steps_this_run},
                            {"interrupted", res.interrupted},
                            {"checkpoint", res.checkpoint.string()}})
                          .dump()
                          .c_str());
  if (res.interrupted)
    throw std::runtime_error("interrupted; checkpoint saved at step " + std::to_string(res.steps_done) +
                             ", continue with --resume " + res.checkpoint.string());
  return 0;
}

// ---------------------------------------------------------------- infer

struct InferArgs {
  std::string checkpoint, corpus;
  std::vector<std::string> inputs;
};

int cmd_infer(RunConfig& rc, const InferArgs& a) {
  if (a.inputs.empty() == a.corpus.empty()) throw UsageError("infer: give --input files or --corpus, not both");
  const Inferencer inf(a.checkpoint);
  prepare_out(rc, {{"checkpoint", a.checkpoint}, {"inputs", a.inputs}, {"corpus", a.corpus}});
  const fs::path out(rc.out);
  std::vector<std::pair<fs::path, fs::path>> jobs;
  if (!a.corpus.empty()) {
    const auto m = corpus_manifest(a.corpus);
    for (const auto& r : m.test)
      jobs.emplace_back(fs::path(a.corpus) / r.lo_path,
                        out / r.subject_id / (fs::path(r.lo_path).stem().string() + "_sr.png"));
  } else {
    for (const auto& in : a.inputs) jobs.emplace_back(in, out / (fs::path(in).stem().string() + "_sr.png"));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    fs::create_directories(jobs[i].second.parent_path());
    write_spectrum_image(inf.run(read_spectrum_image(jobs[i].first)), jobs[i].second);
    progress(static_cast<double>(i + 1) / static_cast<double>(jobs.size()));
  }
  std::printf("%s\n", json({{"written", jobs.size()}}).dump().c_str());
  return 0;
}

// ---------------------------------------------------------------- eval

int cmd_eval(RunConfig& rc, const std::string& checkpoint, const std::string& corpus) {
  const auto m = corpus_manifest(corpus);
  const Inferencer inf(checkpoint);
  prepare_out(rc, {{"checkpoint", checkpoint}, {"corpus", corpus}});
  std::size_t done = 0;
  const auto rep = evaluate_corpus(m, corpus, [&](const Image16& lo) {
    auto r = inf.run(lo);
    progress(static_cast<double>(++done) / static_cast<double>(m.test.size()));
    return r;
  });
  write_metric_report(rep, rc.out);
  std::printf("%s\n", rep.summary().dump().c_str());
  return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
  std::vector<std::string> inputs;
  std::string corpus, checkpoint, title;
  std::size_t cell = 4, limit = 0;
  bool triptych = false, no_axes = false;
};

int cmd_render(RunConfig& rc, const RenderArgs& a) {
  if (a.cell == 0) throw UsageError("render: --cell must be positive");
  const fs::path out(rc.out);
  if (!a.triptych) {
    if (a.inputs.empty()) throw UsageError("render: give at least one --input");
    if (!a.corpus.empty() || !a.checkpoint.empty()) throw UsageError("render: --corpus/--checkpoint need --triptych");
    prepare_out(rc, {{"inputs", a.inputs}, {"cell", a.cell}, {"axes", !a.no_axes}, {"title", a.title}});
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
      render_file(a.inputs[i], out / (fs::path(a.inputs[i]).stem().string() + "_render.png"),
                  {a.cell, !a.no_axes, a.title});
      progress(static_cast<double>(i + 1) / static_cast<double>(a.inputs.size()));
    }
    return 0;
  }
  if (!a.inputs.empty()) {
    if (a.inputs.size() != 3) throw UsageError("render --triptych takes exactly three --input files (low output target)");
    if (!a.corpus.empty()) throw UsageError("render --triptych: give --input files or --corpus, not both");
    prepare_out(rc, {{"inputs", a.inputs}, {"cell", a.cell}, {"triptych", true}});
    write_png_rgb(out / "triptych.png",
                  render_triptych(read_spectrum_image(a.inputs[0]), read_spectrum_image(a.inputs[1]),
                                  read_spectrum_image(a.inputs[2]), a.cell));
    progress(1.0);
    return 0;
  }
  if (a.corpus.empty() || a.checkpoint.empty())
    throw UsageError("render --triptych needs three --input files or --corpus with --checkpoint");
  const auto m = corpus_manifest(a.corpus);
  const Inferencer inf(a.checkpoint);
  prepare_out(rc, {{"corpus", a.corpus}, {"checkpoint", a.checkpoint}, {"cell", a.cell}, {"limit", a.limit},
                   {"triptych", true}});
  const std::size_t n = a.limit ? std::min(a.limit, m.test.size()) : m.test.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = m.test[i];
    const auto lo = read_spectrum_image(fs::path(a.corpus) / r.lo_path);
    const auto hi = read_spectrum_image(fs::path(a.corpus) / r.hi_path);
    char name[64];
    std::snprintf(name, sizeof name, "_%04zu_triptych.png", r.index);
    write_png_rgb(out / (r.subject_id + name), render_triptych(lo, inf.run(lo), hi, a.cell));
    progress(static_cast<double>(i + 1) / static_cast<double>(n));
  }
  std::printf("%s\n", json({{"written", n}}).dump().c_str());
  return 0;
}

// ---------------------------------------------------------------- ula-demo

struct UlaDemoArgs {
  std::string checkpoint;
  double threshold_db = 10.0;
  CLI::Option* o_threshold;
};

int cmd_ula_demo(RunConfig& rc, const UlaDemoArgs& a) {
  const json file = read_config_file(rc.config_file);
  if (!rc.seed_given() && file.contains("seed")) rc.seed = file["seed"].get<std::uint64_t>();
  double threshold = file.value("threshold_db", 10.0);
  set_if(a.o_threshold, threshold, a.threshold_db);
  if (!(threshold > 0)) throw UsageError("ula-demo: --threshold-db must be positive");
  std::optional<Inferencer> inf;
  if (!a.checkpoint.empty()) inf.emplace(a.checkpoint);

  const auto low_cfg = ula_low_config(rc.seed);
  const auto high_cfg = ula_high_config(rc.seed);
  prepare_out(rc, {{"seed", rc.seed},
                   {"threshold_db", threshold},
                   {"checkpoint", a.checkpoint},
                   {"low", {{"bandwidth_hz", low_cfg.bandwidth_hz}, {"n_rx", low_cfg.n_rx_elements}}},
                   {"high", {{"bandwidth_hz", high_cfg.bandwidth_hz}, {"n_rx", high_cfg.n_rx_elements}}},
                   {"range_roi_m", {kStairRangeLo, kStairRangeHi}},
                   {"hann_taper", true}});
  const fs::path out(rc.out);
  const auto low_map = stair_map(low_cfg, stair_scene());
  const auto high_map = stair_map(high_cfg, stair_scene());
  const auto low_peaks = find_peaks(low_map, threshold);
  const auto high_peaks = find_peaks(high_map, threshold);
  const Image16 low_img = stair_image(low_map);
  const Image16 high_img = stair_image(high_map);
  write_spectrum_image(low_img, out / "low.png");
  write_spectrum_image(high_img, out / "high.png");
  progress(0.5);

  json report = {{"low", {{"count", low_peaks.size()}, {"peaks", peaks_json(low_map, low_peaks)}}},
                 {"high", {{"count", high_peaks.size()}, {"peaks", peaks_json(high_map, high_peaks)}}},
                 {"threshold_db", threshold}};
  Image16 middle = low_img;
  std::string middle_title = "interpolated";
  if (inf) {
    middle = inf->run(low_img);
    middle_title = "super-resolved";
    write_spectrum_image(middle, out / "sr.png");
    const auto sr_map = to_spectrum(middle);
    const auto sr_peaks = find_peaks(sr_map, threshold);
    report["super_resolved"] = {{"count", sr_peaks.size()}, {"peaks", peaks_json(sr_map, sr_peaks)}};
  }
  write_png_rgb(out / "comparison.png",
                render_triptych(low_img, middle, high_img, 4, {"low-res", middle_title, "high-res"}));
  std::ofstream(out / "peaks.json") << report.dump(2) << "\n";
  progress(1.0);
  std::printf("%s\n", json({{"low_peaks", low_peaks.size()}, {"high_peaks", high_peaks.size()}}).dump().c_str());
  return 0;
}

void print_error(const std::string& kind, const std::string& sub, const std::string& message) {
  std::fprintf(stderr, "%s\n", json({{"error", {{"kind", kind}, {"subcommand", sub}, {"message", message}}}}).dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar spectrum super-resolution workbench"};
  app.require_subcommand(1);
  RunConfig rc;

  BudgetArgs ba;
  auto* budget = app.add_subcommand("budget", "velocity or ULA resolution budget");
  ba.o_fc = budget->add_option("--fc", ba.fc, "carrier frequency [Hz]");
  ba.o_fp = budget->add_option("--fp", ba.fp, "pulse repetition / sampling frequency [Hz]");
  ba.o_w = budget->add_option("--w", ba.w, "STFT window size [samples]");
  ba.o_B = budget->add_option("--B", ba.B, "FMCW bandwidth [Hz]");
  ba.o_N = budget->add_option("--N", ba.N, "receive elements (d = lambda/2)");
  ba.o_theta = budget->add_option("--theta", ba.theta, "look angle [rad]");
  budget->add_flag("--json", ba.as_json, "print JSON instead of a table");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate one gait recording or the ULA stair scene");
  add_common(simulate, rc);
  CLI::Option* sim_seed = add_seed(simulate, rc);
  sa.o_kind = simulate->add_option("--kind", sa.kind, "gait | ula");
  sa.o_subject = simulate->add_option("--subject", sa.subject, "population index (gait)");
  sa.o_duration = simulate->add_option("--duration", sa.duration_s, "seconds (gait)");
  sa.o_fc = simulate->add_option("--fc", sa.fc, "carrier frequency [Hz]");
  sa.o_fp = simulate->add_option("--fp", sa.fp, "sampling frequency [Hz] (gait)");
  sa.o_noise = simulate->add_option("--noise", sa.noise, "noise power relative to a unit scatterer");
  sa.o_B = simulate->add_option("--B", sa.B, "bandwidth [Hz] (ula)");
  sa.o_N = simulate->add_option("--N", sa.N, "receive elements (ula)");
  sa.o_range = simulate->add_option("--display-range-db", sa.range_db, "dB below the peak kept in the images");

  CorpusArgs ca;
  auto* corpus = app.add_subcommand("build-corpus", "simulate the population and write the paired corpus");
  add_common(corpus, rc);
  CLI::Option* corpus_seed = add_seed(corpus, rc);
  ca.o_subjects = corpus->add_option("--subjects", ca.subjects, "number of subjects");
  ca.o_test = corpus->add_option("--test-subjects", ca.test_subjects, "subjects held out for test");
  ca.o_halves = corpus->add_option("--halves", ca.halves, "half gaits per subject");
  ca.o_rows = corpus->add_option("--rows", ca.rows, "image rows (time)");
  ca.o_cols = corpus->add_option("--cols", ca.cols, "image columns (velocity)");
  corpus->add_flag("--dry-run", ca.dry_run, "plan the split and write only the manifest");

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "train the generator/discriminator pair");
  add_common(trainc, rc);
  CLI::Option* train_seed = add_seed(trainc, rc);
  trainc->add_option("--corpus", ta.corpus, "corpus directory")->required()->check(CLI::ExistingDirectory);
  trainc->add_option("--resume", ta.resume, "checkpoint to continue from")->check(CLI::ExistingFile);
  ta.o_epochs = trainc->add_option("--epochs", ta.epochs);
  ta.o_unets = trainc->add_option("--unets", ta.unets, "U-Nets in the cascade");
  ta.o_depth = trainc->add_option("--depth", ta.depth, "U-Net encoder levels");
  ta.o_base = trainc->add_option("--base", ta.base, "U-Net base channels");
  ta.o_disc_base = trainc->add_option("--disc-base", ta.disc_base, "discriminator base channels");
  ta.o_ck_every = trainc->add_option("--checkpoint-every", ta.checkpoint_every, "steps between checkpoints");
  ta.o_l1 = trainc->add_option("--lambda-l1", ta.lambda_l1);
  ta.o_percep = trainc->add_option("--lambda-percep", ta.lambda_percep);
  ta.o_lr = trainc->add_option("--lr", ta.lr, "ADAM learning rate for both networks");
  trainc->add_flag("--no-self-test", ta.no_self_test, "skip the gradient self-test");
  trainc->add_flag("--nan-check", ta.nan_check, "per-op finiteness checks");

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "run the generator on low-res spectra");
  add_common(infer, rc);
  CLI::Option* infer_seed = add_seed(infer, rc);
  infer->add_option("--checkpoint", ia.checkpoint)->required()->check(CLI::ExistingFile);
  infer->add_option("--input", ia.inputs, "low-res spectrum PNGs")->check(CLI::ExistingFile);
  infer->add_option("--corpus", ia.corpus, "run on every test pair of this corpus")->check(CLI::ExistingDirectory);

  std::string eval_ck, eval_corpus;
  auto* evalc = app.add_subcommand("eval", "score a checkpoint and the bilinear baseline on the test split");
  add_common(evalc, rc);
  CLI::Option* eval_seed = add_seed(evalc, rc);
  evalc->add_option("--checkpoint", eval_ck)->required()->check(CLI::ExistingFile);
  evalc->add_option("--corpus", eval_corpus)->required()->check(CLI::ExistingDirectory);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "render spectra to 8-bit PNG with axes");
  add_common(render, rc);
  CLI::Option* render_seed = add_seed(render, rc);
  render->add_option("--input", ra.inputs, "spectrum PNGs (with sidecars)")->check(CLI::ExistingFile);
  render->add_option("--cell", ra.cell, "pixels per spectrum cell");
  render->add_option("--title", ra.title);
  render->add_flag("--no-axes", ra.no_axes, "heatmap only");
  render->add_flag("--triptych", ra.triptych, "low/output/target side by side");
  render->add_option("--corpus", ra.corpus, "triptychs for the test pairs")->check(CLI::ExistingDirectory);
  render->add_option("--checkpoint", ra.checkpoint, "generator for the output panel")->check(CLI::ExistingFile);
  render->add_option("--limit", ra.limit, "at most this many triptychs (0 = all)");

  UlaDemoArgs ua;
  auto* ula = app.add_subcommand("ula-demo", "stair scene at both ULA parametrizations");
  add_common(ula, rc);
  CLI::Option* ula_seed = add_seed(ula, rc);
  ula->add_option("--checkpoint", ua.checkpoint, "generator applied to the low-res map")->check(CLI::ExistingFile);
  ua.o_threshold = ula->add_option("--threshold-db", ua.threshold_db, "peak threshold below the map maximum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const auto subs = app.get_subcommands();
    print_error("usage", subs.empty() ? "" : subs.front()->get_name(), e.what());
    return 2;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  auto* sub = app.get_subcommands().front();
  rc.subcommand = sub->get_name();
  const std::pair<CLI::App*, CLI::Option*> seeds[] = {{simulate, sim_seed}, {corpus, corpus_seed}, {trainc, train_seed},
                                                      {infer, infer_seed},   {evalc, eval_seed},    {render, render_seed},
                                                      {ula, ula_seed}};
  for (const auto& [app_ptr, opt] : seeds)
    if (sub == app_ptr) rc.seed_opt = opt;
  try {
    if (sub == budget) return cmd_budget(ba);
    if (sub == simulate) return cmd_simulate(rc, sa);
    if (sub == corpus) return cmd_build_corpus(rc, ca);
    if (sub == trainc) return cmd_train(rc, ta);
    if (sub == infer) return cmd_infer(rc, ia);
    if (sub == evalc) return cmd_eval(rc, eval_ck, eval_corpus);
    if (sub == render) return cmd_render(rc, ra);
    if (sub == ula) return cmd_ula_demo(rc, ua);
  } catch (const UsageError& e) {
    print_error("usage", rc.subcommand, e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("runtime", rc.subcommand, e.what());
    return 1;
  }
  return 2;
}
