#include "radsr/neuro/networks.hpp"

#include <algorithm>
#include <stdexcept>

namespace radsr::neuro {

namespace {

constexpr double kInitStd = 0.02;

Tensor normal_tensor(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, kInitStd);
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = dist(rng);
  return Tensor::from(std::move(shape), std::move(v), true);
}

Tensor normalize(const Tensor& x, NormKind kind) { return kind == NormKind::instance ? instance_norm(x) : x; }

Tensor activate(const Tensor& x, ActKind kind) {
  return kind == ActKind::leaky_relu ? leaky_relu(x, 0.2) : relu(x);
}

std::string norm_name(NormKind k) { return k == NormKind::instance ? "instance" : "none"; }
NormKind norm_from(const std::string& s) {
  if (s == "instance") return NormKind::instance;
  if (s == "none") return NormKind::none;
  throw std::invalid_argument("unknown norm kind '" + s + "'");
}
std::string act_name(ActKind k) { return k == ActKind::leaky_relu ? "leaky_relu" : "relu"; }
ActKind act_from(const std::string& s) {
  if (s == "leaky_relu") return ActKind::leaky_relu;
  if (s == "relu") return ActKind::relu;
  throw std::invalid_argument("unknown activation kind '" + s + "'");
}

std::size_t conv_params(std::size_t in, std::size_t out, std::size_t k) { return in * out * k * k + out; }

std::size_t disc_channels(const PatchDiscSpec& s, std::size_t i) {
  return std::min(s.base_channels << std::min<std::size_t>(i, 3), s.base_channels * 8);
}

}  // namespace

Conv2d::Conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t s, std::size_t p,
               std::mt19937_64& rng)
    : weight(normal_tensor({out, in, kernel, kernel}, rng)), bias(Tensor::zeros({out}, true)), stride(s), pad(p) {}

ConvTranspose2d::ConvTranspose2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t s, std::size_t p,
                                 std::mt19937_64& rng)
    : weight(normal_tensor({in, out, kernel, kernel}, rng)), bias(Tensor::zeros({out}, true)), stride(s), pad(p) {}

void UNetSpec::validate() const {
  if (depth < 1 || depth > 8) throw std::invalid_argument("U-Net depth must be in 1..8");
  if (base_channels < 1 || in_channels < 1 || out_channels < 1)
    throw std::invalid_argument("U-Net channel counts must be positive");
}

void UNetSpec::validate_input(std::size_t height, std::size_t width) const {
  const std::size_t m = std::size_t{1} << depth;
  if (height % m != 0 || width % m != 0 || height == 0 || width == 0)
    throw std::invalid_argument("input " + std::to_string(height) + "x" + std::to_string(width) +
                                " is not divisible by 2^depth = " + std::to_string(m));
}

std::size_t UNetSpec::channels_at(std::size_t level) const {
  return std::min(base_channels << (level - 1), base_channels * 8);
}

void CasNetSpec::validate() const {
  unet.validate();
  if (n_unets < 1) throw std::invalid_argument("CasNet needs at least one U-Net");
  if (n_unets > 1 && unet.in_channels != unet.out_channels)
    throw std::invalid_argument("cascaded U-Nets need matching input/output channels");
}

void PatchDiscSpec::validate() const {
  if (in_channels < 1 || base_channels < 1) throw std::invalid_argument("discriminator channel counts must be positive");
  if (n_strided < 1 || n_strided > 6) throw std::invalid_argument("discriminator strided layers must be in 1..6");
}

std::size_t PatchDiscSpec::receptive_field() const {
  std::size_t rf = 1;
  rf = (rf - 1) * 1 + 4;  // logits conv
  rf = (rf - 1) * 1 + 4;  // stride-1 block
  for (std::size_t i = 0; i < n_strided; ++i) rf = (rf - 1) * 2 + 4;
  return rf;
}

std::size_t PatchDiscSpec::output_size(std::size_t input) const {
  std::size_t s = input;
  for (std::size_t i = 0; i < n_strided; ++i) s = conv_out_size(s, 4, 2, 1);
  s = conv_out_size(s, 4, 1, 1);
  return conv_out_size(s, 4, 1, 1);
}

nlohmann::json to_json(const UNetSpec& s) {
  return {{"depth", s.depth},           {"base_channels", s.base_channels}, {"in_channels", s.in_channels},
          {"out_channels", s.out_channels}, {"norm", norm_name(s.norm)},     {"activation", act_name(s.activation)}};
}

nlohmann::json to_json(const CasNetSpec& s) { return {{"n_unets", s.n_unets}, {"unet", to_json(s.unet)}}; }

nlohmann::json to_json(const PatchDiscSpec& s) {
  return {{"in_channels", s.in_channels},
          {"base_channels", s.base_channels},
          {"n_strided", s.n_strided},
          {"norm", norm_name(s.norm)}};
}

UNetSpec unet_spec_from_json(const nlohmann::json& j) {
  UNetSpec s;
  s.depth = j.value("depth", s.depth);
  s.base_channels = j.value("base_channels", s.base_channels);
  s.in_channels = j.value("in_channels", s.in_channels);
  s.out_channels = j.value("out_channels", s.out_channels);
  s.norm = norm_from(j.value("norm", norm_name(s.norm)));
  s.activation = act_from(j.value("activation", act_name(s.activation)));
  return s;
}

CasNetSpec casnet_spec_from_json(const nlohmann::json& j) {
  CasNetSpec s;
  s.n_unets = j.value("n_unets", s.n_unets);
  if (j.contains("unet")) s.unet = unet_spec_from_json(j.at("unet"));
  return s;
}

PatchDiscSpec patch_disc_spec_from_json(const nlohmann::json& j) {
  PatchDiscSpec s;
  s.in_channels = j.value("in_channels", s.in_channels);
  s.base_channels = j.value("base_channels", s.base_channels);
  s.n_strided = j.value("n_strided", s.n_strided);
  s.norm = norm_from(j.value("norm", norm_name(s.norm)));
  return s;
}

UNet::UNet(const UNetSpec& spec, std::mt19937_64& rng) : spec_(spec) {
  spec_.validate();
  const std::size_t D = spec_.depth;
  for (std::size_t l = 1; l <= D; ++l) {
    const std::size_t in = l == 1 ? spec_.in_channels : spec_.channels_at(l - 1);
    down_.emplace_back(in, spec_.channels_at(l), 4, 2, 1, rng);
  }
  for (std::size_t l = D; l >= 1; --l) {
    const std::size_t in = l == D ? spec_.channels_at(D) : 2 * spec_.channels_at(l);
    const std::size_t out = l == 1 ? spec_.channels_at(1) : spec_.channels_at(l - 1);
    up_.emplace_back(in, out, 4, 2, 1, rng);
  }
  head_ = Conv2d(spec_.channels_at(1) + spec_.in_channels, spec_.out_channels, 3, 1, 1, rng);
}

Tensor UNet::forward(const Tensor& x) const {
  if (x.shape().size() != 4 || x.dim(1) != spec_.in_channels)
    throw std::invalid_argument("U-Net expects (N," + std::to_string(spec_.in_channels) + ",H,W) input, got " +
                                to_string(x.shape()));
  spec_.validate_input(x.dim(2), x.dim(3));
  const std::size_t D = spec_.depth;

  std::vector<Tensor> skips;  // h_1 .. h_D
  Tensor h = x;
  for (std::size_t l = 1; l <= D; ++l) {
    h = down_[l - 1](h);
    if (l > 1 && l < D) h = normalize(h, spec_.norm);
    h = activate(h, spec_.activation);
    skips.push_back(h);
  }

  Tensor u = skips.back();
  for (std::size_t l = D, k = 0; l >= 1; --l, ++k) {
    const Tensor in = l == D ? u : concat_channels(u, skips[l - 1]);
    u = relu(normalize(up_[k](in), spec_.norm));
  }
  return tanh(head_(concat_channels(u, x)));
}

std::vector<Tensor> UNet::parameters() const {
  std::vector<Tensor> p;
  for (const auto& c : down_) {
    p.push_back(c.weight);
    p.push_back(c.bias);
  }
  for (const auto& c : up_) {
    p.push_back(c.weight);
    p.push_back(c.bias);
  }
  p.push_back(head_.weight);
  p.push_back(head_.bias);
  return p;
}

CasNet::CasNet(const CasNetSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < spec_.n_unets; ++i) unets_.emplace_back(spec_.unet, rng);
}

Tensor CasNet::forward(const Tensor& y) const {
  Tensor out = y;
  for (const auto& u : unets_) out = u.forward(out);
  return out;
}

std::vector<Tensor> CasNet::parameters() const {
  std::vector<Tensor> p;
  for (const auto& u : unets_) {
    auto q = u.parameters();
    p.insert(p.end(), q.begin(), q.end());
  }
  return p;
}

PatchDiscriminator::PatchDiscriminator(const PatchDiscSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  std::mt19937_64 rng(seed);
  std::size_t in = spec_.in_channels;
  for (std::size_t i = 0; i < spec_.n_strided; ++i) {
    blocks_.emplace_back(in, disc_channels(spec_, i), 4, 2, 1, rng);
    in = disc_channels(spec_, i);
  }
  blocks_.emplace_back(in, disc_channels(spec_, spec_.n_strided), 4, 1, 1, rng);
  out_ = Conv2d(disc_channels(spec_, spec_.n_strided), 1, 4, 1, 1, rng);
}

DiscOutput PatchDiscriminator::forward_features(const Tensor& candidate, const Tensor& condition) const {
  if (candidate.shape() != condition.shape())
    throw std::invalid_argument("discriminator: candidate " + to_string(candidate.shape()) + " vs condition " +
                                to_string(condition.shape()));
  DiscOutput o;
  Tensor h = concat_channels(candidate, condition);
  if (h.dim(1) != spec_.in_channels)
    throw std::invalid_argument("discriminator expects " + std::to_string(spec_.in_channels) +
                                " input channels, got " + to_string(h.shape()));
  o.features.push_back(h);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    h = blocks_[i](h);
    if (i > 0) h = normalize(h, spec_.norm);
    h = leaky_relu(h, 0.2);
    o.features.push_back(h);
  }
  o.logits = out_(h);
  return o;
}

std::vector<Tensor> PatchDiscriminator::parameters() const {
  std::vector<Tensor> p;
  for (const auto& c : blocks_) {
    p.push_back(c.weight);
    p.push_back(c.bias);
  }
  p.push_back(out_.weight);
  p.push_back(out_.bias);
  return p;
}

std::size_t parameter_count(const CasNetSpec& spec) {
  const auto& u = spec.unet;
  const std::size_t D = u.depth;
  std::size_t n = 0;
  for (std::size_t l = 1; l <= D; ++l) n += conv_params(l == 1 ? u.in_channels : u.channels_at(l - 1), u.channels_at(l), 4);
  for (std::size_t l = D; l >= 1; --l)
    n += conv_params(l == D ? u.channels_at(D) : 2 * u.channels_at(l), l == 1 ? u.channels_at(1) : u.channels_at(l - 1), 4);
  n += conv_params(u.channels_at(1) + u.in_channels, u.out_channels, 3);
  return n * spec.n_unets;
}

std::size_t parameter_count(const PatchDiscSpec& spec) {
  std::size_t n = 0, in = spec.in_channels;
  for (std::size_t i = 0; i <= spec.n_strided; ++i) {
    n += conv_params(in, disc_channels(spec, i), 4);
    in = disc_channels(spec, i);
  }
  return n + conv_params(in, 1, 4);
}

std::size_t parameter_count(const std::vector<Tensor>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

void set_requires_grad(const std::vector<Tensor>& params, bool on) {
  for (auto p : params) p.set_requires_grad(on);
}

void zero_grad(const std::vector<Tensor>& params) {
  for (const auto& p : params) p.zero_grad();
}

}  // namespace radsr::neuro
