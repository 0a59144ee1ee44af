#include "radsr/neuro/optim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace radsr::neuro {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'C', 'K'};
constexpr std::uint8_t kVersion = 1;

std::vector<std::size_t> sizes_of(const std::vector<std::vector<double>>& blobs) {
  std::vector<std::size_t> s;
  for (const auto& b : blobs) s.push_back(b.size());
  return s;
}

void write_blobs(std::ostream& os, const std::vector<std::vector<double>>& blobs) {
  for (const auto& b : blobs)
    for (double v : b) detail::put_f64_le(os, v);
}

std::vector<std::vector<double>> read_blobs(std::istream& is, const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<double>> out(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    out[i].resize(sizes[i]);
    for (auto& v : out[i]) v = detail::get_f64_le(is);
  }
  return out;
}

}  // namespace

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("ADAM betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw std::invalid_argument("ADAM epsilon must be positive");
}

AdamState AdamState::for_params(const std::vector<Tensor>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(const std::vector<Tensor>& params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw std::invalid_argument("ADAM state holds " + std::to_string(state.m.size()) + " slots for " +
                                std::to_string(params.size()) + " parameters");
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Node& n = *params[i].node();
    if (n.grad.size() != n.value.size()) continue;
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != n.value.size()) throw std::invalid_argument("ADAM state size mismatch at parameter " + std::to_string(i));
    for (std::size_t k = 0; k < n.value.size(); ++k) {
      const double g = n.grad[k];
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
      n.value[k] -= cfg.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg.eps);
    }
  }
}

std::vector<std::vector<double>> snapshot(const std::vector<Tensor>& params) {
  std::vector<std::vector<double>> out;
  for (const auto& p : params) out.emplace_back(p.data().begin(), p.data().end());
  return out;
}

void restore(const std::vector<Tensor>& params, const std::vector<std::vector<double>>& values, const std::string& what) {
  if (params.size() != values.size())
    throw std::runtime_error(what + ": checkpoint has " + std::to_string(values.size()) + " tensors, model has " +
                             std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != values[i].size())
      throw std::runtime_error(what + ": tensor " + std::to_string(i) + " has " + std::to_string(values[i].size()) +
                               " values, model expects " + to_string(params[i].shape()));
    std::copy(values[i].begin(), values[i].end(), params[i].node()->value.begin());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  nlohmann::json header = ck.header;
  header["sections"] = {{"generator", sizes_of(ck.generator)},
                        {"discriminator", sizes_of(ck.discriminator)},
                        {"adam_g", sizes_of(ck.adam_g.m)},
                        {"adam_d", sizes_of(ck.adam_d.m)}};
  header["adam_g_t"] = ck.adam_g.t;
  header["adam_d_t"] = ck.adam_d.t;
  const std::string text = header.dump();

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + tmp.string());
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    detail::put_u64_le(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_blobs(os, ck.generator);
    write_blobs(os, ck.discriminator);
    write_blobs(os, ck.adam_g.m);
    write_blobs(os, ck.adam_g.v);
    write_blobs(os, ck.adam_d.m);
    write_blobs(os, ck.adam_d.v);
    if (!os.flush()) throw std::runtime_error("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read checkpoint " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4))
    throw std::runtime_error(path.string() + " is not a checkpoint (bad magic)");
  const int version = is.get();
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) + " in " + path.string());
  const auto len = detail::get_u64_le(is);
  if (len > (1u << 26)) throw std::runtime_error("corrupt checkpoint header in " + path.string());
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len)))
    throw std::runtime_error("truncated checkpoint header in " + path.string());

  Checkpoint ck;
  ck.header = nlohmann::json::parse(text);
  const auto& sec = ck.header.at("sections");
  const auto g = sec.at("generator").get<std::vector<std::size_t>>();
  const auto d = sec.at("discriminator").get<std::vector<std::size_t>>();
  const auto ag = sec.at("adam_g").get<std::vector<std::size_t>>();
  const auto ad = sec.at("adam_d").get<std::vector<std::size_t>>();
  try {
    ck.generator = read_blobs(is, g);
    ck.discriminator = read_blobs(is, d);
    ck.adam_g.m = read_blobs(is, ag);
    ck.adam_g.v = read_blobs(is, ag);
    ck.adam_d.m = read_blobs(is, ad);
    ck.adam_d.v = read_blobs(is, ad);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("truncated checkpoint " + path.string());
  }
  ck.adam_g.t = ck.header.value("adam_g_t", std::uint64_t{0});
  ck.adam_d.t = ck.header.value("adam_d_t", std::uint64_t{0});
  return ck;
}

}  // namespace radsr::neuro
