#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/neuro/tensor.hpp"

namespace radsr::neuro {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

/// First/second moments for one parameter list, in parameter order.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;

  static AdamState for_params(const std::vector<Tensor>& params);
};

/// One bias-corrected ADAM update using the gradients currently stored on
/// `params`. Parameters that never received a gradient are left untouched.
void adam_step(const std::vector<Tensor>& params, AdamState& state, const AdamConfig& cfg);

/// Binary checkpoint: "SRCK", version byte, u64 LE header length, JSON
/// header, then little-endian float64 sections in header order.
struct Checkpoint {
  nlohmann::json header;  // free-form metadata (specs, step, config)
  std::vector<std::vector<double>> generator;
  std::vector<std::vector<double>> discriminator;
  AdamState adam_g;
  AdamState adam_d;
};

std::vector<std::vector<double>> snapshot(const std::vector<Tensor>& params);
/// Copies values into `params`; shapes must match element counts exactly.
void restore(const std::vector<Tensor>& params, const std::vector<std::vector<double>>& values, const std::string& what);

/// Written to a temporary file first and renamed into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace radsr::neuro
