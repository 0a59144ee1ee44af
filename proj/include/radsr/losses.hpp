#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/neuro/networks.hpp"

namespace radsr {

enum class GenLossKind { non_saturating, minimax };

struct LossConfig {
  double lambda_l1 = 100.0;
  double lambda_percep = 1.0;
  /// Per-layer weights for F_0..F_L. Empty means uniform 1/(L+1).
  std::vector<double> layer_weights;
  /// F_0 is the raw (candidate, condition) pair; when off its weight is forced
  /// to zero and the default spreads 1/L over the hidden layers.
  bool include_input_layer = true;
  GenLossKind gen_loss = GenLossKind::non_saturating;

  /// `feature_layers` is L, the discriminator's hidden block count.
  void validate(std::size_t feature_layers) const;
  std::vector<double> resolved_layer_weights(std::size_t feature_layers) const;
};

nlohmann::json to_json(const LossConfig& c);
LossConfig loss_config_from_json(const nlohmann::json& j, LossConfig base = {});

/// Probabilities are clamped to [eps, 1-eps] before the log.
inline constexpr double kScoreEps = 1e-7;

struct AdversarialLosses {
  neuro::Tensor d_loss;  // -E[log D(x,y)] - E[log(1 - D(x̂,y))]
  neuro::Tensor g_loss;  // -E[log D(x̂,y)] or E[log(1 - D(x̂,y))]
  bool clamped = false;  // some score fell outside [eps, 1-eps]
};

/// Inputs are raw patch logits; sigmoid is applied here.
AdversarialLosses adversarial_losses(const neuro::Tensor& real_logits, const neuro::Tensor& fake_logits,
                                     GenLossKind kind = GenLossKind::non_saturating);
neuro::Tensor discriminator_loss(const neuro::Tensor& real_logits, const neuro::Tensor& fake_logits,
                                 bool* clamped = nullptr);
neuro::Tensor generator_adv_loss(const neuro::Tensor& fake_logits, GenLossKind kind, bool* clamped = nullptr);

/// Mean absolute difference.
neuro::Tensor l1_loss(const neuro::Tensor& x, const neuro::Tensor& x_hat);

/// Σ_i w_i · mean|F_i(x,y) − F_i(x̂,y)| over already extracted feature lists.
neuro::Tensor perceptual_loss(const std::vector<neuro::Tensor>& real_features,
                              const std::vector<neuro::Tensor>& fake_features, const std::vector<double>& weights);
/// Runs one discriminator pass per argument.
neuro::Tensor perceptual_loss(const neuro::PatchDiscriminator& d, const neuro::Tensor& x, const neuro::Tensor& x_hat,
                              const neuro::Tensor& y, const std::vector<double>& weights);

}  // namespace radsr
