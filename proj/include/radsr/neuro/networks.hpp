#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/neuro/ops.hpp"

namespace radsr::neuro {

enum class NormKind { instance, none };
enum class ActKind { leaky_relu, relu };

struct Conv2d {
  Tensor weight;  // (out, in, k, k)
  Tensor bias;    // (out)
  std::size_t stride = 1;
  std::size_t pad = 0;

  Conv2d() = default;
  Conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride, std::size_t pad,
         std::mt19937_64& rng);
  Tensor operator()(const Tensor& x) const { return conv2d(x, weight, bias, stride, pad); }
};

struct ConvTranspose2d {
  Tensor weight;  // (in, out, k, k)
  Tensor bias;    // (out)
  std::size_t stride = 2;
  std::size_t pad = 1;

  ConvTranspose2d() = default;
  ConvTranspose2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride, std::size_t pad,
                  std::mt19937_64& rng);
  Tensor operator()(const Tensor& x) const { return conv_transpose2d(x, weight, bias, stride, pad); }
};

struct UNetSpec {
  std::size_t depth = 4;
  std::size_t base_channels = 16;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  NormKind norm = NormKind::instance;
  ActKind activation = ActKind::leaky_relu;  // encoder activation; decoder uses relu

  void validate() const;
  void validate_input(std::size_t height, std::size_t width) const;
  std::size_t channels_at(std::size_t level) const;  // level 1..depth
};

struct CasNetSpec {
  std::size_t n_unets = 2;  // paper scale: 5
  UNetSpec unet;

  void validate() const;
};

struct PatchDiscSpec {
  std::size_t in_channels = 2;  // candidate + condition
  std::size_t base_channels = 16;
  std::size_t n_strided = 3;  // pix2pix n_layers; 3 gives the 70x70 receptive field
  NormKind norm = NormKind::instance;

  void validate() const;
  /// Number of hidden feature blocks L; features F_0..F_L exist.
  std::size_t feature_layers() const { return n_strided + 1; }
  std::size_t receptive_field() const;
  std::size_t output_size(std::size_t input) const;
};

nlohmann::json to_json(const UNetSpec& s);
nlohmann::json to_json(const CasNetSpec& s);
nlohmann::json to_json(const PatchDiscSpec& s);
UNetSpec unet_spec_from_json(const nlohmann::json& j);
CasNetSpec casnet_spec_from_json(const nlohmann::json& j);
PatchDiscSpec patch_disc_spec_from_json(const nlohmann::json& j);

/// pix2pix-style U-Net: 4x4 stride-2 encoder, transposed-conv decoder with
/// skip concatenation at every level, and a 3x3 head that also sees the raw
/// input. Output is tanh-bounded.
class UNet {
 public:
  UNet(const UNetSpec& spec, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  std::vector<Tensor> parameters() const;
  const UNetSpec& spec() const { return spec_; }

 private:
  UNetSpec spec_;
  std::vector<Conv2d> down_;
  std::vector<ConvTranspose2d> up_;
  Conv2d head_;
};

/// Chain of U-Nets, each refining the previous one's output.
class CasNet {
 public:
  CasNet(const CasNetSpec& spec, std::uint64_t seed);
  Tensor forward(const Tensor& y) const;
  std::vector<Tensor> parameters() const;
  const CasNetSpec& spec() const { return spec_; }

 private:
  CasNetSpec spec_;
  std::vector<UNet> unets_;
};

struct DiscOutput {
  std::vector<Tensor> features;  // F_0 (input pair) .. F_L
  Tensor logits;                 // (N, 1, h, w) patch scores
};

class PatchDiscriminator {
 public:
  PatchDiscriminator(const PatchDiscSpec& spec, std::uint64_t seed);
  DiscOutput forward_features(const Tensor& candidate, const Tensor& condition) const;
  Tensor forward(const Tensor& candidate, const Tensor& condition) const {
    return forward_features(candidate, condition).logits;
  }
  std::vector<Tensor> parameters() const;
  const PatchDiscSpec& spec() const { return spec_; }

 private:
  PatchDiscSpec spec_;
  std::vector<Conv2d> blocks_;
  Conv2d out_;
};

std::size_t parameter_count(const CasNetSpec& spec);
std::size_t parameter_count(const PatchDiscSpec& spec);
std::size_t parameter_count(const std::vector<Tensor>& params);

void set_requires_grad(const std::vector<Tensor>& params, bool on);
void zero_grad(const std::vector<Tensor>& params);

}  // namespace radsr::neuro
