#include "radsr/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "radsr/image_io.hpp"

namespace radsr {

using neuro::Tensor;

namespace {

constexpr std::uint64_t kDiscSeedStream = 0xD15C;
constexpr std::uint64_t kEpochSeedStream = 0xE90C;
constexpr const char* kCheckpointName = "checkpoint.srck";
constexpr const char* kLossLogName = "loss.csv";
constexpr const char* kLossHeader = "step,L_adv_D,L_adv_G,L_L1,L_percep,L_total_G";

nlohmann::json adam_to_json(const neuro::AdamConfig& a) {
  return {{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps}};
}

neuro::AdamConfig adam_from_json(const nlohmann::json& j, neuro::AdamConfig a) {
  a.lr = j.value("lr", a.lr);
  a.beta1 = j.value("beta1", a.beta1);
  a.beta2 = j.value("beta2", a.beta2);
  a.eps = j.value("eps", a.eps);
  return a;
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(mix_seed(mix_seed(seed, kEpochSeedStream), epoch));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

Tensor stack(const std::vector<const Tensor*>& items) {
  if (items.size() == 1) return *items[0];
  neuro::Shape shape = items[0]->shape();
  std::vector<double> v;
  for (const auto* t : items) {
    if (t->shape() != items[0]->shape())
      throw std::invalid_argument("batch items differ in shape: " + neuro::to_string(t->shape()) + " vs " +
                                  neuro::to_string(items[0]->shape()));
    v.insert(v.end(), t->data().begin(), t->data().end());
  }
  shape[0] = items.size() * items[0]->dim(0);
  return Tensor::from(shape, std::move(v));
}

bool finite(double v) { return std::isfinite(v); }

std::string csv_row(const LossReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g", r.step, r.adv_d, r.adv_g, r.l1, r.percep,
                r.total_g);
  return buf;
}

// Keeps the header and rows up to `last_step`, so a resumed run continues
// the log without duplicates.
void prepare_loss_log(const std::filesystem::path& path, std::size_t last_step) {
  std::vector<std::string> keep{kLossHeader};
  if (last_step > 0) {
    std::ifstream is(path);
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
      if (first) {
        first = false;
        continue;
      }
      if (line.empty()) continue;
      const auto step = std::stoull(line.substr(0, line.find(',')));
      if (step <= last_step) keep.push_back(line);
    }
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : keep) os << l << "\n";
}

nlohmann::json comparable(const TrainConfig& c) {
  auto j = to_json(c);
  return {{"generator", j["generator"]}, {"discriminator", j["discriminator"]}};
}

}  // namespace

void TrainConfig::validate() const {
  generator.validate();
  discriminator.validate();
  loss.validate(discriminator.feature_layers());
  adam_g.validate();
  adam_d.validate();
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(db_ceil > db_floor)) throw std::invalid_argument("db_ceil must exceed db_floor");
  const std::size_t pair_channels = generator.unet.out_channels + generator.unet.in_channels;
  if (discriminator.in_channels != pair_channels)
    throw std::invalid_argument("discriminator expects " + std::to_string(discriminator.in_channels) +
                                " input channels but (candidate, condition) has " + std::to_string(pair_channels));
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"generator", neuro::to_json(c.generator)},
          {"discriminator", neuro::to_json(c.discriminator)},
          {"loss", to_json(c.loss)},
          {"adam_g", adam_to_json(c.adam_g)},
          {"adam_d", adam_to_json(c.adam_d)},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"checkpoint_every", c.checkpoint_every},
          {"self_test", c.self_test},
          {"nan_check", c.nan_check},
          {"db_floor", c.db_floor},
          {"db_ceil", c.db_ceil}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (j.contains("generator")) c.generator = neuro::casnet_spec_from_json(j.at("generator"));
  if (j.contains("discriminator")) c.discriminator = neuro::patch_disc_spec_from_json(j.at("discriminator"));
  if (j.contains("loss")) c.loss = loss_config_from_json(j.at("loss"), c.loss);
  if (j.contains("adam_g")) c.adam_g = adam_from_json(j.at("adam_g"), c.adam_g);
  if (j.contains("adam_d")) c.adam_d = adam_from_json(j.at("adam_d"), c.adam_d);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
  c.self_test = j.value("self_test", c.self_test);
  c.nan_check = j.value("nan_check", c.nan_check);
  c.db_floor = j.value("db_floor", c.db_floor);
  c.db_ceil = j.value("db_ceil", c.db_ceil);
  return c;
}

Tensor to_network(const Plane& db, double db_floor, double db_ceil) {
  std::vector<double> v(db.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = std::clamp((db.data[i] - db_floor) / (db_ceil - db_floor), 0.0, 1.0);
    v[i] = 2.0 * u - 1.0;
  }
  return Tensor::from({1, 1, db.rows, db.cols}, std::move(v));
}

Plane from_network(const Tensor& t, double db_floor, double db_ceil) {
  if (t.shape().size() != 4 || t.dim(0) != 1 || t.dim(1) != 1)
    throw std::invalid_argument("expected a (1,1,H,W) tensor, got " + neuro::to_string(t.shape()));
  Plane p(t.dim(2), t.dim(3));
  for (std::size_t i = 0; i < p.size(); ++i) p.data[i] = db_floor + (t.data()[i] + 1.0) / 2.0 * (db_ceil - db_floor);
  return p;
}

std::vector<TrainingPair> load_pairs(const SplitManifest& m, const std::filesystem::path& root,
                                     const std::string& split) {
  if (!m.has_normalization) throw std::runtime_error("manifest has no normalization constants (dry run?)");
  const auto& records = split == "train" ? m.train : m.test;
  if (split != "train" && split != "test") throw std::invalid_argument("split must be 'train' or 'test'");
  std::vector<TrainingPair> out;
  for (const auto& r : records) {
    TrainingPair p;
    p.x = to_network(dequantize(read_spectrum_image(root / r.hi_path)), m.db_floor, m.db_ceil);
    p.y = to_network(dequantize(read_spectrum_image(root / r.lo_path)), m.db_floor, m.db_ceil);
    p.id = r.subject_id + "/" + std::to_string(r.index);
    out.push_back(std::move(p));
  }
  return out;
}

GanModel::GanModel(const TrainConfig& cfg)
    : generator(cfg.generator, cfg.seed),
      discriminator(cfg.discriminator, mix_seed(cfg.seed, kDiscSeedStream)),
      adam_g(neuro::AdamState::for_params(generator.parameters())),
      adam_d(neuro::AdamState::for_params(discriminator.parameters())) {}

std::uint64_t parameter_hash(const std::vector<Tensor>& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params)
    for (double v : p.data()) {
      unsigned char b[8];
      std::memcpy(b, &v, 8);
      for (unsigned char c : b) h = (h ^ c) * 1099511628211ULL;
    }
  return h;
}

double discriminator_step(GanModel& model, const TrainConfig& cfg, const Tensor& x, const Tensor& y,
                          const Tensor& fake, std::size_t step, bool* clamped) {
  const auto d_params = model.discriminator.parameters();
  neuro::set_requires_grad(d_params, true);
  neuro::zero_grad(d_params);
  const Tensor real_logits = model.discriminator.forward(x, y);
  const Tensor fake_logits = model.discriminator.forward(fake.detach(), y);
  const Tensor loss = discriminator_loss(real_logits, fake_logits, clamped);
  const double value = loss.item();
  if (!finite(value)) throw std::runtime_error("non-finite discriminator loss at step " + std::to_string(step));
  loss.backward();
  neuro::adam_step(d_params, model.adam_d, cfg.adam_d);
  return value;
}

LossReport generator_step(GanModel& model, const TrainConfig& cfg, const Tensor& x, const Tensor& y, const Tensor& fake,
                          std::size_t step) {
  const auto g_params = model.generator.parameters();
  const auto d_params = model.discriminator.parameters();
  const auto weights = cfg.loss.resolved_layer_weights(cfg.discriminator.feature_layers());
  LossReport rep;
  rep.step = step;
  neuro::set_requires_grad(d_params, false);
  neuro::zero_grad(g_params);
  const auto real_out = model.discriminator.forward_features(x, y);
  const auto fake_out = model.discriminator.forward_features(fake, y);
  const Tensor adv = generator_adv_loss(fake_out.logits, cfg.loss.gen_loss, &rep.clamped);
  const Tensor l1 = l1_loss(x, fake);
  const Tensor percep = perceptual_loss(real_out.features, fake_out.features, weights);
  const Tensor total = neuro::add(neuro::add(adv, neuro::scale(l1, cfg.loss.lambda_l1)),
                                  neuro::scale(percep, cfg.loss.lambda_percep));
  rep.adv_g = adv.item();
  rep.l1 = l1.item();
  rep.percep = percep.item();
  rep.total_g = total.item();
  if (!finite(rep.total_g)) {
    neuro::set_requires_grad(d_params, true);
    throw std::runtime_error("non-finite generator loss at step " + std::to_string(step));
  }
  total.backward();
  neuro::set_requires_grad(d_params, true);
  neuro::adam_step(g_params, model.adam_g, cfg.adam_g);
  return rep;
}

LossReport train_step(GanModel& model, const TrainConfig& cfg, const Tensor& x, const Tensor& y, std::size_t step) {
  neuro::set_requires_grad(model.generator.parameters(), true);
  const Tensor fake = model.generator.forward(y);
  bool clamped_d = false;
  const double adv_d = discriminator_step(model, cfg, x, y, fake, step, &clamped_d);
  LossReport rep = generator_step(model, cfg, x, y, fake, step);
  rep.adv_d = adv_d;
  rep.clamped = rep.clamped || clamped_d;
  return rep;
}

neuro::GradCheckResult training_self_test(const TrainConfig& cfg) {
  TrainConfig small = cfg;
  small.generator.unet.depth = 2;
  small.generator.unet.base_channels = 2;
  small.discriminator.base_channels = 2;
  small.discriminator.n_strided = 2;
  small.loss.layer_weights.clear();
  const auto weights = small.loss.resolved_layer_weights(small.discriminator.feature_layers());

  GanModel model(small);
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x7E57));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_image = [&](std::size_t c) {
    std::vector<double> v(c * 16 * 16);
    for (auto& e : v) e = u(rng);
    return Tensor::from({1, c, 16, 16}, std::move(v));
  };
  const Tensor x = random_image(small.generator.unet.out_channels);
  const Tensor y = random_image(small.generator.unet.in_channels);
  const auto g_params = model.generator.parameters();
  const auto d_params = model.discriminator.parameters();
  // O(1) parameters: at the 0.02-std init the deep pre-activations are about
  // as small as the FD step and the check would straddle ReLU kinks.
  std::uniform_real_distribution<double> wide(-0.6, 0.6);
  for (auto& t : g_params)
    for (auto& v : t.node()->value) v = wide(rng);
  for (auto& t : d_params)
    for (auto& v : t.node()->value) v = wide(rng);
  neuro::GradCheckOptions opt;
  // the objective is O(10-100) (lambda_L1 = 100), so FD roundoff is ~1e-9;
  // biases feeding instance norm have an exact zero gradient
  opt.denom_floor = 1e-3;

  neuro::set_requires_grad(d_params, false);
  neuro::set_requires_grad(g_params, true);
  const auto g_res = neuro::check_gradients(
      [&] {
        const Tensor fake = model.generator.forward(y);
        const auto real_out = model.discriminator.forward_features(x, y);
        const auto fake_out = model.discriminator.forward_features(fake, y);
        return neuro::add(
            neuro::add(generator_adv_loss(fake_out.logits, small.loss.gen_loss),
                       neuro::scale(l1_loss(x, fake), small.loss.lambda_l1)),
            neuro::scale(perceptual_loss(real_out.features, fake_out.features, weights), small.loss.lambda_percep));
      },
      g_params, opt);

  neuro::set_requires_grad(d_params, true);
  neuro::set_requires_grad(g_params, false);
  const Tensor fake = model.generator.forward(y).detach();
  const auto d_res = neuro::check_gradients(
      [&] { return discriminator_loss(model.discriminator.forward(x, y), model.discriminator.forward(fake, y)); },
      d_params, opt);
  neuro::set_requires_grad(g_params, true);

  neuro::GradCheckResult r = g_res.max_rel_error >= d_res.max_rel_error ? g_res : d_res;
  r.worst = (g_res.max_rel_error >= d_res.max_rel_error ? "generator " : "discriminator ") + r.worst;
  r.probes = g_res.probes + d_res.probes;
  return r;
}

neuro::Checkpoint make_checkpoint(const GanModel& model, const TrainConfig& cfg, std::size_t step) {
  neuro::Checkpoint ck;
  ck.header = {{"format", "radsr-checkpoint"}, {"config", to_json(cfg)}, {"step", step}};
  ck.generator = neuro::snapshot(model.generator.parameters());
  ck.discriminator = neuro::snapshot(model.discriminator.parameters());
  ck.adam_g = model.adam_g;
  ck.adam_d = model.adam_d;
  return ck;
}

GanModel restore_model(const neuro::Checkpoint& ck, TrainConfig& cfg) {
  if (ck.header.value("format", "") != "radsr-checkpoint") throw std::runtime_error("not a training checkpoint");
  cfg = train_config_from_json(ck.header.at("config"));
  cfg.validate();
  GanModel model(cfg);
  neuro::restore(model.generator.parameters(), ck.generator, "checkpoint/spec mismatch (generator)");
  neuro::restore(model.discriminator.parameters(), ck.discriminator, "checkpoint/spec mismatch (discriminator)");
  auto check_adam = [](const neuro::AdamState& s, const std::vector<Tensor>& params, const char* what) {
    if (s.m.size() != params.size() || s.v.size() != params.size())
      throw std::runtime_error(std::string("checkpoint/spec mismatch (") + what + " optimizer state)");
    for (std::size_t i = 0; i < params.size(); ++i)
      if (s.m[i].size() != params[i].size() || s.v[i].size() != params[i].size())
        throw std::runtime_error(std::string("checkpoint/spec mismatch (") + what + " optimizer state)");
  };
  check_adam(ck.adam_g, model.generator.parameters(), "generator");
  check_adam(ck.adam_d, model.discriminator.parameters(), "discriminator");
  model.adam_g = ck.adam_g;
  model.adam_d = ck.adam_d;
  return model;
}

TrainResult train(const TrainConfig& cfg_in, const std::vector<TrainingPair>& data, const std::filesystem::path& run_dir,
                  const std::optional<std::filesystem::path>& resume, const TrainCallbacks& cb) {
  TrainConfig cfg = cfg_in;
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("no training pairs");
  for (const auto& p : data) {
    cfg.generator.unet.validate_input(p.y.dim(2), p.y.dim(3));
    if (p.x.shape() != data[0].x.shape() || p.y.shape() != data[0].y.shape())
      throw std::invalid_argument("training pair " + p.id + " differs in shape from the first pair");
  }
  std::filesystem::create_directories(run_dir);

  if (cfg.self_test) {
    const auto st = training_self_test(cfg);
    if (!(st.max_rel_error < 1e-4))
      throw std::runtime_error("gradient self-test failed (max rel error " + std::to_string(st.max_rel_error) +
                               ", " + st.worst + "); training refused");
  }

  std::size_t step = 0;
  std::optional<GanModel> model;
  if (resume) {
    const auto ck = neuro::load_checkpoint(*resume);
    TrainConfig saved;
    model.emplace(restore_model(ck, saved));
    if (comparable(saved) != comparable(cfg) || saved.seed != cfg.seed)
      throw std::runtime_error("checkpoint/spec mismatch: resume checkpoint was trained with a different network "
                               "spec or seed");
    step = ck.header.at("step").get<std::size_t>();
  } else {
    model.emplace(cfg);
  }

  const bool old_nan = neuro::nan_check_enabled();
  neuro::set_nan_check(cfg.nan_check);
  const std::size_t n = data.size();
  const std::size_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total = steps_per_epoch * cfg.epochs;

  TrainResult result;
  result.checkpoint = run_dir / kCheckpointName;
  const auto log_path = run_dir / kLossLogName;
  prepare_loss_log(log_path, step);
  std::ofstream log(log_path, std::ios::app);

  auto save = [&] { neuro::save_checkpoint(result.checkpoint, make_checkpoint(*model, cfg, step)); };
  if (!resume) save();  // a last good checkpoint exists even if step 1 fails

  try {
    std::vector<std::size_t> order;
    std::size_t order_epoch = static_cast<std::size_t>(-1);
    while (step < total) {
      const std::size_t epoch = step / steps_per_epoch;
      if (epoch != order_epoch) {
        order = epoch_order(n, cfg.seed, epoch);
        order_epoch = epoch;
      }
      const std::size_t pos = step % steps_per_epoch;
      std::vector<const Tensor*> xs, ys;
      for (std::size_t i = pos * cfg.batch_size; i < std::min(n, (pos + 1) * cfg.batch_size); ++i) {
        xs.push_back(&data[order[i]].x);
        ys.push_back(&data[order[i]].y);
      }
      const auto rep = train_step(*model, cfg, stack(xs), stack(ys), step + 1);
      ++step;
      ++result.steps_this_run;
      log << csv_row(rep) << "\n";
      log.flush();
      result.reports.push_back(rep);
      if (cb.on_step) cb.on_step(rep, static_cast<double>(step) / static_cast<double>(total));

      const bool interrupted = cb.stop && cb.stop->load();
      if (step == total || step % steps_per_epoch == 0 || (cfg.checkpoint_every && step % cfg.checkpoint_every == 0) ||
          interrupted)
        save();
      if (interrupted) {
        result.interrupted = true;
        break;
      }
    }
  } catch (...) {
    neuro::set_nan_check(old_nan);
    throw;
  }
  neuro::set_nan_check(old_nan);
  result.steps_done = step;
  return result;
}

Inferencer::Inferencer(const std::filesystem::path& checkpoint) {
  const auto ck = neuro::load_checkpoint(checkpoint);
  if (ck.header.value("format", "") != "radsr-checkpoint") throw std::runtime_error("not a training checkpoint");
  cfg_ = train_config_from_json(ck.header.at("config"));
  cfg_.validate();
  generator_.emplace(cfg_.generator, cfg_.seed);
  neuro::restore(generator_->parameters(), ck.generator, "checkpoint/spec mismatch (generator)");
  neuro::set_requires_grad(generator_->parameters(), false);
}

Image16 Inferencer::run(const Image16& lo) const {
  cfg_.generator.unet.validate_input(lo.rows, lo.cols);
  const Tensor out = generator_->forward(to_network(dequantize(lo), cfg_.db_floor, cfg_.db_ceil));
  Spectrum2D s;
  s.values = from_network(out, cfg_.db_floor, cfg_.db_ceil);
  s.in_db = true;
  s.axis0 = lo.axis0;
  s.axis1 = lo.axis1;
  s.provenance = lo.provenance + "/sr";
  return to_u16_image(s, cfg_.db_floor, cfg_.db_ceil);
}

}  // namespace radsr
