#include "radsr/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace radsr {

using neuro::Tensor;

namespace {

bool any_clamped(const Tensor& probs) {
  for (double p : probs.data())
    if (p < kScoreEps || p > 1.0 - kScoreEps) return true;
  return false;
}

// log of clamped probabilities
Tensor log_prob(const Tensor& probs) { return neuro::log(neuro::clamp(probs, kScoreEps, 1.0 - kScoreEps)); }

Tensor one_minus(const Tensor& t) { return neuro::add_scalar(neuro::scale(t, -1.0), 1.0); }

std::string gen_loss_name(GenLossKind k) { return k == GenLossKind::non_saturating ? "non_saturating" : "minimax"; }

}  // namespace

void LossConfig::validate(std::size_t feature_layers) const {
  if (!(lambda_l1 >= 0.0) || !(lambda_percep >= 0.0)) throw std::invalid_argument("loss weights must be >= 0");
  if (!layer_weights.empty()) {
    if (layer_weights.size() != feature_layers + 1)
      throw std::invalid_argument("perceptual layer weights: expected " + std::to_string(feature_layers + 1) +
                                  " values (F_0..F_L), got " + std::to_string(layer_weights.size()));
    for (double w : layer_weights)
      if (!(w >= 0.0)) throw std::invalid_argument("perceptual layer weights must be >= 0");
  }
}

std::vector<double> LossConfig::resolved_layer_weights(std::size_t feature_layers) const {
  validate(feature_layers);
  std::vector<double> w = layer_weights;
  if (w.empty()) {
    const double n = static_cast<double>(include_input_layer ? feature_layers + 1 : feature_layers);
    w.assign(feature_layers + 1, 1.0 / n);
  }
  if (!include_input_layer) w[0] = 0.0;
  return w;
}

nlohmann::json to_json(const LossConfig& c) {
  return {{"lambda_l1", c.lambda_l1},
          {"lambda_percep", c.lambda_percep},
          {"layer_weights", c.layer_weights},
          {"include_input_layer", c.include_input_layer},
          {"gen_loss", gen_loss_name(c.gen_loss)}};
}

LossConfig loss_config_from_json(const nlohmann::json& j, LossConfig c) {
  c.lambda_l1 = j.value("lambda_l1", c.lambda_l1);
  c.lambda_percep = j.value("lambda_percep", c.lambda_percep);
  c.layer_weights = j.value("layer_weights", c.layer_weights);
  c.include_input_layer = j.value("include_input_layer", c.include_input_layer);
  const auto g = j.value("gen_loss", gen_loss_name(c.gen_loss));
  if (g == "non_saturating")
    c.gen_loss = GenLossKind::non_saturating;
  else if (g == "minimax")
    c.gen_loss = GenLossKind::minimax;
  else
    throw std::invalid_argument("unknown gen_loss '" + g + "' (non_saturating|minimax)");
  return c;
}

Tensor discriminator_loss(const Tensor& real_logits, const Tensor& fake_logits, bool* clamped) {
  const Tensor pr = neuro::sigmoid(real_logits);
  const Tensor pf = neuro::sigmoid(fake_logits);
  if (clamped) *clamped = any_clamped(pr) || any_clamped(pf);
  const Tensor real_term = neuro::mean(log_prob(pr));
  const Tensor fake_term = neuro::mean(log_prob(one_minus(pf)));
  return neuro::scale(neuro::add(real_term, fake_term), -1.0);
}

Tensor generator_adv_loss(const Tensor& fake_logits, GenLossKind kind, bool* clamped) {
  const Tensor pf = neuro::sigmoid(fake_logits);
  if (clamped) *clamped = any_clamped(pf);
  if (kind == GenLossKind::non_saturating) return neuro::scale(neuro::mean(log_prob(pf)), -1.0);
  return neuro::mean(log_prob(one_minus(pf)));
}

AdversarialLosses adversarial_losses(const Tensor& real_logits, const Tensor& fake_logits, GenLossKind kind) {
  if (real_logits.shape() != fake_logits.shape())
    throw std::invalid_argument("adversarial_losses: real " + neuro::to_string(real_logits.shape()) + " vs fake " +
                                neuro::to_string(fake_logits.shape()));
  AdversarialLosses out;
  bool cd = false, cg = false;
  out.d_loss = discriminator_loss(real_logits, fake_logits, &cd);
  out.g_loss = generator_adv_loss(fake_logits, kind, &cg);
  out.clamped = cd || cg;
  return out;
}

Tensor l1_loss(const Tensor& x, const Tensor& x_hat) {
  if (x.shape() != x_hat.shape())
    throw std::invalid_argument("l1_loss: shape mismatch " + neuro::to_string(x.shape()) + " vs " +
                                neuro::to_string(x_hat.shape()));
  return neuro::mean(neuro::abs(neuro::sub(x, x_hat)));
}

Tensor perceptual_loss(const std::vector<Tensor>& real_features, const std::vector<Tensor>& fake_features,
                       const std::vector<double>& weights) {
  if (real_features.size() != fake_features.size() || weights.size() != real_features.size())
    throw std::invalid_argument("perceptual_loss: " + std::to_string(weights.size()) + " weights for " +
                                std::to_string(real_features.size()) + " feature layers");
  Tensor total = Tensor::scalar(0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    total = neuro::add(total, neuro::scale(l1_loss(real_features[i], fake_features[i]), weights[i]));
  }
  return total;
}

Tensor perceptual_loss(const neuro::PatchDiscriminator& d, const Tensor& x, const Tensor& x_hat, const Tensor& y,
                       const std::vector<double>& weights) {
  if (weights.size() != d.spec().feature_layers() + 1)
    throw std::invalid_argument("perceptual_loss: expected " + std::to_string(d.spec().feature_layers() + 1) +
                                " layer weights, got " + std::to_string(weights.size()));
  const auto real = d.forward_features(x, y);
  const auto fake = d.forward_features(x_hat, y);
  return perceptual_loss(real.features, fake.features, weights);
}

}  // namespace radsr
