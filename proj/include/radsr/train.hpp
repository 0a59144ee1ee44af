#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/dataset.hpp"
#include "radsr/losses.hpp"
#include "radsr/neuro/gradcheck.hpp"
#include "radsr/neuro/networks.hpp"
#include "radsr/neuro/optim.hpp"

namespace radsr {

inline constexpr std::uint64_t kDefaultSeed = 20190515;

struct TrainConfig {
  neuro::CasNetSpec generator;
  neuro::PatchDiscSpec discriminator;
  LossConfig loss;
  neuro::AdamConfig adam_g;
  neuro::AdamConfig adam_d;
  std::size_t epochs = 20;
  std::size_t batch_size = 1;
  std::uint64_t seed = kDefaultSeed;
  std::size_t checkpoint_every = 0;  // steps; 0 checkpoints at epoch ends only
  bool self_test = true;             // gradient check gate before the first step
  bool nan_check = false;            // per-op finiteness checks (slow)
  /// Dynamic range the [-1, 1] network domain maps to; copied from the manifest.
  double db_floor = 0.0;
  double db_ceil = 1.0;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct LossReport {
  std::size_t step = 0;  // 1-based count of completed steps
  double adv_d = 0.0;
  double adv_g = 0.0;
  double l1 = 0.0;
  double percep = 0.0;
  double total_g = 0.0;
  bool clamped = false;  // a sigmoid score was clamped to [eps, 1-eps]
};

/// One training example in the network domain: (1, 1, H, W) tensors in [-1, 1].
struct TrainingPair {
  neuro::Tensor x;  // high-res target
  neuro::Tensor y;  // low-res condition
  std::string id;
};

/// dB plane -> [-1, 1] with the given dynamic range (values are clipped).
neuro::Tensor to_network(const Plane& db, double db_floor, double db_ceil);
Plane from_network(const neuro::Tensor& t, double db_floor, double db_ceil);

/// Reads every pair of one split ("train" or "test"); image values are
/// dequantized and mapped with the manifest's dynamic range.
std::vector<TrainingPair> load_pairs(const SplitManifest& m, const std::filesystem::path& root,
                                     const std::string& split);

struct GanModel {
  neuro::CasNet generator;
  neuro::PatchDiscriminator discriminator;
  neuro::AdamState adam_g;
  neuro::AdamState adam_d;

  explicit GanModel(const TrainConfig& cfg);
};

/// D update on (x, y) vs (detached fake, y). Returns L_adv_D; never touches G.
double discriminator_step(GanModel& model, const TrainConfig& cfg, const neuro::Tensor& x, const neuro::Tensor& y,
                          const neuro::Tensor& fake, std::size_t step, bool* clamped = nullptr);
/// G update with D frozen; `fake` must be G(y) with its graph intact. Leaves
/// adv_d at 0. Never touches D.
LossReport generator_step(GanModel& model, const TrainConfig& cfg, const neuro::Tensor& x, const neuro::Tensor& y,
                          const neuro::Tensor& fake, std::size_t step);

/// One D update on (real, detached fake) followed by one G update on
/// L_adv_G + λ_L1 L_L1 + λ_percep L_percep with D frozen. Throws on a
/// non-finite loss before touching any parameter.
LossReport train_step(GanModel& model, const TrainConfig& cfg, const neuro::Tensor& x, const neuro::Tensor& y,
                      std::size_t step);

/// FNV-1a over the raw parameter bytes.
std::uint64_t parameter_hash(const std::vector<neuro::Tensor>& params);

/// Finite-difference check of the generator and discriminator objectives on
/// small networks derived from `cfg`. Returns the worse of the two results.
neuro::GradCheckResult training_self_test(const TrainConfig& cfg);

struct TrainCallbacks {
  std::function<void(const LossReport&, double fraction)> on_step;
  const std::atomic<bool>* stop = nullptr;  // checked after every step
};

struct TrainResult {
  std::size_t steps_done = 0;  // total steps recorded in the final checkpoint
  std::size_t steps_this_run = 0;
  bool interrupted = false;
  std::filesystem::path checkpoint;
  std::vector<LossReport> reports;
};

/// Writes `<run_dir>/checkpoint.srck` and `<run_dir>/loss.csv`. With
/// `resume`, parameters, ADAM moments and the step counter come from that
/// checkpoint and training continues at the recorded step.
TrainResult train(const TrainConfig& cfg, const std::vector<TrainingPair>& data, const std::filesystem::path& run_dir,
                  const std::optional<std::filesystem::path>& resume = std::nullopt, const TrainCallbacks& cb = {});

/// Checkpoint header and blobs for the current model state.
neuro::Checkpoint make_checkpoint(const GanModel& model, const TrainConfig& cfg, std::size_t step);
/// Rebuilds config and model from a checkpoint; throws on spec/parameter mismatch.
GanModel restore_model(const neuro::Checkpoint& ck, TrainConfig& cfg);

/// Generator-only inference from a checkpoint.
class Inferencer {
 public:
  explicit Inferencer(const std::filesystem::path& checkpoint);
  /// Dequantizes `lo` with its own range, runs G, re-quantizes with the
  /// checkpoint's dynamic range. Output dims equal input dims.
  Image16 run(const Image16& lo) const;
  const TrainConfig& config() const { return cfg_; }

 private:
  TrainConfig cfg_;
  std::optional<neuro::CasNet> generator_;
};

}  // namespace radsr
