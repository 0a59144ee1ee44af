// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--work DIR] [criterion numbers...]
#include <array>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "radsr/dataset.hpp"
#include "radsr/evaluate.hpp"
#include "radsr/image_io.hpp"
#include "radsr/losses.hpp"
#include "radsr/metrics.hpp"
#include "radsr/neuro/gradcheck.hpp"
#include "radsr/neuro/networks.hpp"
#include "radsr/neuro/ops.hpp"
#include "radsr/spectral.hpp"
#include "radsr/train.hpp"
#include "radsr/ula_scene.hpp"

namespace fs = std::filesystem;
using namespace radsr;
using neuro::Shape;
using neuro::Tensor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// ------------------------------------------------------------------ 1

Outcome parametrization() {
  // independent evaluation of v_max = c fp / (4 fc), v_res = 2 v_max / w
  const double c = 299792458.0;
  const auto lo = velocity_budget(25e9, 2e3, 512);
  const auto hi = velocity_budget(25e9, 8e3, 512);
  const double want_lo = c * 2e3 / (4.0 * 25e9), want_hi = c * 8e3 / (4.0 * 25e9);
  const double worst = std::max({rel(lo.v_max_mps, want_lo), rel(hi.v_max_mps, want_hi),
                                 rel(lo.v_res_mps, 2.0 * want_lo / 512.0), rel(hi.v_res_mps, 2.0 * want_hi / 512.0)});
  // published rounding: 5.99585 and 23.9834
  const bool published = std::abs(lo.v_max_mps - 5.99585) < 5e-6 && std::abs(hi.v_max_mps - 23.9834) < 5e-5;

  const auto b12 = ula_budget(UlaConfig::with_half_wavelength_spacing(77e9, 1.2e9, 4), 0.0);
  const auto b36 = ula_budget(UlaConfig::with_half_wavelength_spacing(77e9, 3.6e9, 8), 0.0);
  const double r_ratio = b12.range_res_m / b36.range_res_m;
  const double a_ratio = b12.azimuth_res_rad / b36.azimuth_res_rad;
  const bool ratios = std::abs(r_ratio - 3.0) <= 1e-12 && std::abs(a_ratio - 2.0) <= 1e-12;
  return {worst < 1e-9 && published && ratios,
          fmt("v_max %.9g / %.9g m/s, max rel err %.2e; R_res ratio %.15g, Psi_res ratio %.15g", lo.v_max_mps,
              hi.v_max_mps, worst, r_ratio, a_ratio)};
}

// ------------------------------------------------------------------ 2

Outcome stft_correctness() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  // Parseval per frame on white noise
  IqSeries noise;
  noise.sample_rate_hz = 8e3;
  noise.shape = {8192};
  for (std::size_t i = 0; i < 8192; ++i) noise.samples.emplace_back(g(rng), g(rng));
  StftParams p;
  const auto w = gaussian_window(p.window_size, p.sigma());
  const auto tf = stft(noise, p);
  double parseval = 0.0;
  for (std::size_t f = 0; f < tf.frames; ++f) {
    double time = 0.0, freq = 0.0;
    for (std::size_t i = 0; i < p.window_size; ++i) time += std::norm(noise.samples[f * tf.hop + i] * w[i]);
    for (std::size_t k = 0; k < tf.bins; ++k) freq += std::norm(tf(f, k));
    parseval = std::max(parseval, std::abs(time - freq / static_cast<double>(p.window_size)) / time);
  }

  // tone at f_p / 8 lands on bin w/2 + 64 in every frame
  IqSeries tone;
  tone.sample_rate_hz = 8e3;
  tone.shape = {4096};
  for (std::size_t i = 0; i < 4096; ++i) tone.samples.push_back(std::polar(1.0, 2.0 * kPi * i / 8.0));
  const auto tt = stft(tone, p);
  std::size_t bad_frames = 0;
  for (std::size_t f = 0; f < tt.frames; ++f) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < tt.bins; ++k)
      if (std::abs(tt(f, k)) > std::abs(tt(f, best))) best = k;
    bad_frames += best != p.window_size / 2 + 64;
  }

  // frame count against a brute-force framer
  std::size_t count_mismatch = 0;
  std::uniform_int_distribution<std::size_t> len_d(2, 5000), w_d(2, 1024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t win = w_d(rng);
    const std::size_t len = win + len_d(rng);
    std::uniform_int_distribution<std::size_t> hop_d(1, win);
    const std::size_t hop = hop_d(rng);
    std::size_t brute = 0;
    for (std::size_t s = 0; s + win <= len; s += hop) ++brute;
    count_mismatch += stft_frame_count(len, win, hop) != brute;
  }
  return {parseval < 1e-10 && bad_frames == 0 && count_mismatch == 0,
          fmt("Parseval max rel %.2e over %zu frames; tone bin misses %zu/%zu; frame-count mismatches %zu/50", parseval,
              tf.frames, bad_frames, tt.frames, count_mismatch)};
}

// ------------------------------------------------------------------ 3

Outcome pairing_fidelity() {
  CorpusConfig cfg;
  cfg.radar.noise_power = 0.0;
  cfg.halves_per_subject = 4;
  const auto pop = synthesize_population(4, kDefaultSeed);
  const double range_db = 40.0;  // display range below the pair's joint peak
  double sum = 0.0, worst = 1.0;
  std::size_t n = 0;
  for (const auto& subject : pop)
    for (const auto& pair : subject_pairs(subject, cfg)) {
      Plane lo = pair.lo.values, hi = pair.hi.values;
      double top = -1e300;
      for (double v : lo.data) top = std::max(top, v);
      for (double v : hi.data) top = std::max(top, v);
      for (double& v : lo.data) v = std::max(v, top - range_db);
      for (double& v : hi.data) v = std::max(v, top - range_db);
      const double s = ssim(lo, hi, range_db);
      sum += s;
      worst = std::min(worst, s);
      ++n;
    }
  const double mean = sum / static_cast<double>(n);
  return {mean > 0.9, fmt("mean SSIM(lo, hi) %.4f over %zu noise-free pairs (min %.4f), threshold 0.9", mean, n, worst)};
}

// ------------------------------------------------------------------ 4

Tensor rand_tensor(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0, bool grad = true) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(neuro::numel(s));
  for (auto& x : v) x = u(rng);
  return Tensor::from(std::move(s), std::move(v), grad);
}

Tensor project(const Tensor& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return neuro::sum(neuro::mul(out, rand_tensor(out.shape(), rng, -1.0, 1.0, false)));
}

void widen(const std::vector<Tensor>& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (auto t : params)
    for (auto& v : t.data()) v = u(rng);
}

struct GradTally {
  double worst = 0.0;
  std::string worst_where;
  std::size_t checks = 0, probes = 0, kinks = 0;
  std::map<std::string, std::size_t> configs;

  void add(const std::string& what, const neuro::GradCheckResult& r) {
    ++checks;
    ++configs[what];
    probes += r.probes;
    kinks += r.kinks;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_where = what + " (" + r.worst + ")";
    }
  }
};

Outcome gradient_suite() {
  GradTally t;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> d13(1, 3), d15(1, 5);
  using neuro::check_gradients;
  neuro::GradCheckOptions net_opt;
  net_opt.denom_floor = 1e-5;  // instance-normed biases have exact-zero gradients

  for (int trial = 0; trial < 20; ++trial) {
    const Shape s{d13(rng) == 1 ? 2u : 1u, d13(rng), d15(rng), d15(rng)};
    auto a = rand_tensor(s, rng), b = rand_tensor(s, rng), pos = rand_tensor(s, rng, 0.2, 2.0);
    const std::uint64_t k = 1000 + trial * 20;
    t.add("add", check_gradients([&] { return project(neuro::add(a, b), k); }, {a, b}));
    t.add("sub", check_gradients([&] { return project(neuro::sub(a, b), k + 1); }, {a, b}));
    t.add("mul", check_gradients([&] { return project(neuro::mul(a, b), k + 2); }, {a, b}));
    t.add("scale", check_gradients([&] { return project(neuro::scale(a, -1.7), k + 3); }, {a}));
    t.add("add_scalar", check_gradients([&] { return project(neuro::add_scalar(a, 0.3), k + 4); }, {a}));
    t.add("abs", check_gradients([&] { return project(neuro::abs(a), k + 5); }, {a}));
    t.add("relu", check_gradients([&] { return project(neuro::relu(a), k + 6); }, {a}));
    t.add("leaky_relu", check_gradients([&] { return project(neuro::leaky_relu(a, 0.2), k + 7); }, {a}));
    t.add("tanh", check_gradients([&] { return project(neuro::tanh(a), k + 8); }, {a}));
    t.add("sigmoid", check_gradients([&] { return project(neuro::sigmoid(a), k + 9); }, {a}));
    t.add("log", check_gradients([&] { return project(neuro::log(pos), k + 10); }, {pos}));
    t.add("clamp", check_gradients([&] { return project(neuro::clamp(a, -0.5, 0.5), k + 11); }, {a}));
    t.add("sum", check_gradients([&] { return neuro::sum(neuro::mul(a, a)); }, {a}));
    t.add("mean", check_gradients([&] { return neuro::mean(neuro::mul(a, b)); }, {a, b}));
    auto c2 = rand_tensor({s[0], d13(rng), s[2], s[3]}, rng);
    t.add("concat_channels", check_gradients([&] { return project(neuro::concat_channels(a, c2), k + 12); }, {a, c2}));

    // conv2d
    {
      const std::size_t n = d13(rng) == 1 ? 2 : 1, c = d13(rng), o = d13(rng);
      const std::size_t kk = std::array<std::size_t, 3>{1, 3, 4}[d13(rng) - 1];
      const std::size_t stride = 1 + trial % 2, pad = kk > 1 ? trial % 3 % 2 : 0;
      auto x = rand_tensor({n, c, kk + 2 + d13(rng), kk + 1 + d13(rng)}, rng);
      auto w = rand_tensor({o, c, kk, kk}, rng);
      auto bias = rand_tensor({o}, rng);
      t.add("conv2d", check_gradients([&] { return project(neuro::conv2d(x, w, bias, stride, pad), k + 13); },
                                      {x, w, bias}));
    }
    // conv_transpose2d
    {
      const std::size_t n = d13(rng) == 1 ? 2 : 1, c = d13(rng), o = d13(rng);
      const std::size_t kk = std::array<std::size_t, 3>{2, 3, 4}[d13(rng) - 1];
      const std::size_t stride = 1 + trial % 2, pad = trial % 3 == 0 ? 0 : 1;
      auto x = rand_tensor({n, c, 1 + d13(rng), 2 + d13(rng)}, rng);
      auto w = rand_tensor({c, o, kk, kk}, rng);
      auto bias = rand_tensor({o}, rng);
      t.add("conv_transpose2d",
            check_gradients([&] { return project(neuro::conv_transpose2d(x, w, bias, stride, pad), k + 14); },
                            {x, w, bias}));
    }
    // instance_norm
    {
      auto x = rand_tensor({1 + trial % 2u, d13(rng), 1 + d15(rng), 1 + d15(rng)}, rng, -2.0, 2.0);
      t.add("instance_norm", check_gradients([&] { return project(neuro::instance_norm(x), k + 15); }, {x}));
    }
    // U-Net generator block and the CasNet cascade
    {
      neuro::UNetSpec us;
      us.depth = 1 + trial % 2;
      us.base_channels = 1 + trial % 3;
      std::mt19937_64 nrng(k);
      neuro::UNet net(us, nrng);
      widen(net.parameters(), k + 16);
      const std::size_t side = (std::size_t{1} << us.depth) * (2 + trial % 2);
      auto y = rand_tensor({1, 1, side, side}, rng);
      auto params = net.parameters();
      params.push_back(y);
      t.add("unet", check_gradients([&] { return project(net.forward(y), k + 17); }, params, net_opt));

      neuro::CasNetSpec cs;
      cs.n_unets = 2;
      cs.unet = us;
      neuro::CasNet cas(cs, k);
      widen(cas.parameters(), k + 18);
      auto yc = rand_tensor({1, 1, side, side}, rng, -1.0, 1.0, false);
      t.add("casnet", check_gradients([&] { return project(cas.forward(yc), k + 19); }, cas.parameters(), net_opt));
    }
    // patch discriminator and the three losses
    {
      neuro::PatchDiscSpec ds;
      ds.base_channels = 1 + trial % 2;
      ds.n_strided = 1 + trial % 2;
      neuro::PatchDiscriminator d(ds, k);
      widen(d.parameters(), k + 20);
      const std::size_t side = ds.n_strided == 1 ? 8 : 16;
      auto x = rand_tensor({1, 1, side, side}, rng), y = rand_tensor({1, 1, side, side}, rng);
      auto params = d.parameters();
      params.push_back(x);
      params.push_back(y);
      t.add("patch_discriminator", check_gradients([&] { return project(d.forward(x, y), k + 21); }, params, net_opt));

      auto xh = rand_tensor({1, 1, side, side}, rng);
      std::vector<double> wts(ds.feature_layers() + 1);
      for (auto& v : wts) v = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
      t.add("perceptual_loss", check_gradients([&] { return perceptual_loss(d, x, xh, y, wts); }, {xh}));
      t.add("l1_loss", check_gradients([&] { return l1_loss(x, xh); }, {x, xh}));
      auto real = rand_tensor({1, 1, 1 + trial % 4u, 1 + trial % 3u}, rng, -4, 4);
      auto fake = rand_tensor(real.shape(), rng, -4, 4);
      for (auto kind : {GenLossKind::non_saturating, GenLossKind::minimax}) {
        t.add("adversarial_d", check_gradients([&] { return adversarial_losses(real, fake, kind).d_loss; },
                                               {real, fake}));
        t.add("adversarial_g", check_gradients([&] { return adversarial_losses(real, fake, kind).g_loss; }, {fake}));
      }
    }
  }
  std::size_t min_configs = 1000000;
  for (const auto& [name, n] : t.configs) min_configs = std::min(min_configs, n);
  std::string detail = fmt("%zu ops/nets/losses, >= %zu configs each, %zu checks, %zu probes, %zu kink re-probes, "
                           "max rel err %.2e",
                           t.configs.size(), min_configs, t.checks, t.probes, t.kinks, t.worst);
  if (t.worst >= 1e-4) detail += "; worst at " + t.worst_where;
  return {t.worst < 1e-4 && min_configs >= 20, detail};
}

// ------------------------------------------------------------------ 5

Outcome loss_closed_forms() {
  const auto half = Tensor::zeros({1, 1, 6, 6});
  const double ld = adversarial_losses(half, half).d_loss.item();
  const double d_err = std::abs(ld - 2.0 * std::log(2.0));

  std::mt19937_64 rng(5);
  bool zeros = true;
  for (int trial = 0; trial < 10; ++trial) {
    neuro::PatchDiscSpec ds;
    ds.base_channels = 2;
    ds.n_strided = 2;
    neuro::PatchDiscriminator d(ds, 50 + trial);
    auto x = rand_tensor({1, 1, 16, 16}, rng), y = rand_tensor({1, 1, 16, 16}, rng);
    const std::vector<double> w(ds.feature_layers() + 1, 0.5 + trial);
    zeros &= l1_loss(x, x).item() == 0.0;
    zeros &= perceptual_loss(d, x, x, y, w).item() == 0.0;
  }

  // reported total vs weighted sum of the reported terms, through a real G step
  double total_err = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    TrainConfig cfg;
    cfg.generator.n_unets = 1;
    cfg.generator.unet.depth = 2;
    cfg.generator.unet.base_channels = 2;
    cfg.discriminator.base_channels = 2;
    cfg.discriminator.n_strided = 2;
    cfg.loss.lambda_l1 = std::uniform_real_distribution<double>(0.0, 200.0)(rng);
    cfg.loss.lambda_percep = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    cfg.seed = 500 + trial;
    GanModel m(cfg);
    auto x = rand_tensor({1, 1, 16, 16}, rng, -1, 1, false), y = rand_tensor({1, 1, 16, 16}, rng, -1, 1, false);
    const auto fake = m.generator.forward(y);
    const auto r = generator_step(m, cfg, x, y, fake, 1);
    const double want = r.adv_g + cfg.loss.lambda_l1 * r.l1 + cfg.loss.lambda_percep * r.percep;
    total_err = std::max(total_err, std::abs(r.total_g - want) / std::max(1.0, std::abs(want)));
  }
  return {d_err <= 1e-9 && zeros && total_err <= 1e-12,
          fmt("L_D(D=0.5) - 2 log 2 = %.2e; L1 = L_percep = 0 at x = x_hat: %s; total vs weighted sum %.2e", d_err,
              zeros ? "yes" : "no", total_err)};
}

// ------------------------------------------------------------------ 6, 7

struct Desk {
  fs::path corpus;
  SplitManifest manifest;
};

Desk desk_corpus(const fs::path& work) {
  Desk d;
  d.corpus = work / "desk_corpus";
  if (fs::exists(d.corpus / "manifest.json")) {
    d.manifest = load_manifest(d.corpus / "manifest.json");
    if (d.manifest.has_normalization && verify_corpus(d.manifest, d.corpus).ok) return d;
  }
  fs::remove_all(d.corpus);
  CorpusConfig cfg;  // 8 subjects (6 train / 2 test), 40 half gaits, 64 x 64
  cfg.seed = kDefaultSeed;
  d.manifest = build_corpus(synthesize_population(cfg.n_subjects, cfg.seed), cfg, d.corpus);
  return d;
}

Outcome desk_training(const fs::path& work) {
  const auto desk = desk_corpus(work);
  TrainConfig cfg;  // CasNet of 2 U-Nets, 20 epochs
  cfg.db_floor = desk.manifest.db_floor;
  cfg.db_ceil = desk.manifest.db_ceil;
  const auto data = load_pairs(desk.manifest, desk.corpus, "train");
  const fs::path a = work / "desk_run_a", b = work / "desk_run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  TrainCallbacks cb;
  std::size_t last_epoch = 0;
  cb.on_step = [&](const LossReport& r, double) {
    const std::size_t epoch = r.step / data.size();
    if (r.step % data.size() == 0 && epoch != last_epoch) {
      last_epoch = epoch;
      std::fprintf(stderr, "  desk training: epoch %zu, L1 %.4f\n", epoch, r.l1);
    }
  };
  train(cfg, data, a, std::nullopt, cb);
  last_epoch = 0;
  train(cfg, data, b, std::nullopt, cb);
  std::ifstream fa(a / "checkpoint.srck", std::ios::binary), fb(b / "checkpoint.srck", std::ios::binary);
  const std::string ca((std::istreambuf_iterator<char>(fa)), {}), cb_((std::istreambuf_iterator<char>(fb)), {});
  const bool identical = !ca.empty() && ca == cb_;

  const Inferencer inf(a / "checkpoint.srck");
  const auto rep = evaluate_corpus(desk.manifest, desk.corpus, [&](const Image16& lo) { return inf.run(lo); });
  write_metric_report(rep, work / "desk_eval");
  const double gain = rep.ssim.mean - rep.baseline_ssim.mean;
  const bool psnr_better = rep.psnr.mean > rep.baseline_psnr.mean;
  return {identical && gain >= 0.02 && psnr_better,
          fmt("%zu train / %zu test pairs; SSIM %.4f vs baseline %.4f (gain %+.4f, need >= 0.02); PSNR %.2f vs %.2f dB; "
              "checkpoints byte-identical: %s",
              desk.manifest.train.size(), desk.manifest.test.size(), rep.ssim.mean, rep.baseline_ssim.mean, gain,
              rep.psnr.mean, rep.baseline_psnr.mean, identical ? "yes" : "no")};
}

Outcome metric_identities(const fs::path& work) {
  const auto desk = desk_corpus(work);
  const double L = desk.manifest.db_ceil - desk.manifest.db_floor;
  std::size_t images = 0, failures = 0;
  double asym = 0.0;
  for (const auto* split : {&desk.manifest.train, &desk.manifest.test})
    for (const auto& r : *split) {
      const Plane lo = dequantize(read_spectrum_image(desk.corpus / r.lo_path));
      const Plane hi = dequantize(read_spectrum_image(desk.corpus / r.hi_path));
      for (const Plane* p : {&lo, &hi}) {
        ++images;
        failures += !(ssim(*p, *p, L) == 1.0 && uqi(*p, *p) == 1.0 && psnr(*p, *p, L).infinite);
      }
      asym = std::max({asym, std::abs(ssim(lo, hi, L) - ssim(hi, lo, L)), std::abs(uqi(lo, hi) - uqi(hi, lo))});
    }
  Plane a(64, 64), b(64, 64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.data[i] = u(rng);
    b.data[i] = a.data[i] + ((i % 2) ? 4.0 : -4.0);  // |error| = peak / 10 with peak 40
  }
  const double p20 = psnr(a, b, 40.0).db;
  return {failures == 0 && asym <= 1e-12 && std::abs(p20 - 20.0) <= 1e-12,
          fmt("%zu corpus images, identity failures %zu; max asymmetry %.2e; uniform-error PSNR %.15g dB", images,
              failures, asym, p20)};
}

// ------------------------------------------------------------------ 8

Outcome ula_resolvability() {
  const auto hi = find_peaks(stair_map(ula_high_config(kDefaultSeed), stair_scene()), 10.0);
  const auto lo = find_peaks(stair_map(ula_low_config(kDefaultSeed), stair_scene()), 10.0);
  return {hi.size() == 3 && lo.size() < 3,
          fmt("local maxima above -10 dB: high-res (3.6 GHz, N=8) %zu, low-res (1.2 GHz, N=4) %zu", hi.size(),
              lo.size())};
}

// ------------------------------------------------------------------ 9

Outcome corpus_integrity(const fs::path& work) {
  CorpusConfig cfg;
  cfg.n_subjects = 22;
  cfg.n_test_subjects = 7;
  cfg.halves_per_subject = 360;
  cfg.seed = kDefaultSeed;
  const fs::path dir = work / "paper_dry_run";
  fs::remove_all(dir);
  const auto m = build_corpus(synthesize_population(cfg.n_subjects, cfg.seed), cfg, dir, true);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) files += e.is_regular_file();
  const bool dry_ok = m.train.size() == 5400 && m.test.size() == 2520 && files == 1 && fs::exists(dir / "manifest.json");

  std::vector<std::string> ids;
  for (int i = 0; i < 22; ++i) ids.push_back(fmt("s%02d", i));
  std::size_t violations = 0;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> tr, te;
    split_subjects(ids, 7, rng(), tr, te);
    std::set<std::string> a(tr.begin(), tr.end()), b(te.begin(), te.end()), all(ids.begin(), ids.end());
    bool ok = tr.size() == 15 && te.size() == 7 && a.size() == 15 && b.size() == 7;
    for (const auto& s : b) ok &= !a.count(s);
    std::set<std::string> un = a;
    un.insert(b.begin(), b.end());
    ok &= un == all;
    violations += !ok;
  }
  std::set<std::string> train_ids, test_ids;
  for (const auto& r : m.train) train_ids.insert(r.subject_id);
  for (const auto& r : m.test) test_ids.insert(r.subject_id);
  for (const auto& s : test_ids) violations += train_ids.count(s);
  return {dry_ok && violations == 0,
          fmt("dry run %zu/%zu train/test pairs, %zu file(s) written; split violations over 100 seeds: %zu",
              m.train.size(), m.test.size(), files, violations)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "radsr_acceptance";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--work") == 0 && i + 1 < argc)
      work = argv[++i];
    else
      only.insert(std::atoi(argv[i]));
  }
  fs::create_directories(work);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "parametrization arithmetic", 1.0, parametrization},
      {2, "STFT correctness", 10.0, stft_correctness},
      {3, "pairing fidelity", 30.0, pairing_fidelity},
      {4, "gradient suite", 300.0, gradient_suite},
      {5, "loss closed forms", 60.0, loss_closed_forms},
      {6, "desk-scale training", 45.0 * 60.0, [&] { return desk_training(work); }},
      {7, "metric identities", 60.0, [&] { return metric_identities(work); }},
      {8, "ULA resolvability", 30.0, ula_resolvability},
      {9, "corpus integrity", 60.0, [&] { return corpus_integrity(work); }},
  };
  int passed = 0, run = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++run;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    passed += pass;
    std::printf("CRITERION %d %s: %s  %s [%.1f s, limit %.0f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  std::printf("ACCEPTANCE %d/%d PASS\n", passed, run);
  return passed == run ? 0 : 1;
}
