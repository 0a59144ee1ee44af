#include <doctest.h>

#include <cmath>
#include <random>

#include "radsr/neuro/gradcheck.hpp"
#include "radsr/neuro/ops.hpp"
#include "test_util.hpp"

using namespace radsr::neuro;
using testutil::project;
using testutil::random_tensor;

namespace {

constexpr double kTol = 1e-4;

void expect_grads(const std::function<Tensor()>& loss, const std::vector<Tensor>& inputs) {
  const auto r = check_gradients(loss, inputs);
  INFO(r.worst);
  CHECK(r.max_rel_error < kTol);
}

// Keeps values away from the kink of piecewise-linear ops.
Tensor away_from(double kink, Shape shape, std::mt19937_64& rng) {
  auto t = random_tensor(std::move(shape), rng);
  for (auto& v : t.data()) v = kink + (v < 0 ? v - 0.05 : v + 0.05);
  return t;
}

}  // namespace

TEST_CASE("element-wise ops match finite differences") {
  std::mt19937_64 rng(1);
  const Shape s{2, 3, 4, 5};
  auto a = random_tensor(s, rng);
  auto b = random_tensor(s, rng);
  auto k = away_from(0.0, s, rng);
  auto pos = random_tensor(s, rng, 0.2, 2.0);

  expect_grads([&] { return project(add(a, b), 2); }, {a, b});
  expect_grads([&] { return project(sub(a, b), 3); }, {a, b});
  expect_grads([&] { return project(mul(a, b), 4); }, {a, b});
  expect_grads([&] { return project(scale(a, -2.5), 5); }, {a});
  expect_grads([&] { return project(add_scalar(a, 0.7), 6); }, {a});
  expect_grads([&] { return project(abs(k), 7); }, {k});
  expect_grads([&] { return project(relu(k), 8); }, {k});
  expect_grads([&] { return project(leaky_relu(k, 0.2), 9); }, {k});
  expect_grads([&] { return project(tanh(a), 10); }, {a});
  expect_grads([&] { return project(sigmoid(a), 11); }, {a});
  expect_grads([&] { return project(log(pos), 12); }, {pos});
  expect_grads([&] { return project(clamp(k, -0.5, 0.5), 13); }, {k});
  expect_grads([&] { return sum(mul(a, a)); }, {a});
  expect_grads([&] { return mean(mul(a, b)); }, {a, b});
}

TEST_CASE("a tensor used twice accumulates both paths") {
  std::mt19937_64 rng(2);
  auto a = random_tensor({1, 1, 3, 3}, rng);
  expect_grads([&] { return project(add(tanh(a), mul(a, a)), 1); }, {a});
}

TEST_CASE("concat_channels routes gradients to both inputs") {
  std::mt19937_64 rng(3);
  auto a = random_tensor({2, 2, 3, 4}, rng);
  auto b = random_tensor({2, 3, 3, 4}, rng);
  expect_grads([&] { return project(concat_channels(a, b), 14); }, {a, b});
}

TEST_CASE("conv2d gradients over random geometries") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(1, 3);
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = pick(rng) == 1 ? 2 : 1;
    const std::size_t c = pick(rng), o = pick(rng);
    const std::size_t k = std::array<std::size_t, 3>{1, 3, 4}[pick(rng) - 1];
    const std::size_t stride = pick(rng) == 3 ? 2 : 1 + (trial % 2);
    const std::size_t pad = (pick(rng) - 1) % 2 + (k > 1 ? trial % 2 : 0);
    const std::size_t h = k + 2 + pick(rng), w = k + 1 + pick(rng);
    auto x = random_tensor({n, c, h, w}, rng);
    auto wt = random_tensor({o, c, k, k}, rng);
    auto b = random_tensor({o}, rng);
    CAPTURE(trial);
    expect_grads([&] { return project(conv2d(x, wt, b, stride, pad), 100 + trial); }, {x, wt, b});
  }
}

TEST_CASE("conv_transpose2d gradients over random geometries") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(1, 3);
  for (int trial = 0; trial < 24; ++trial) {
    const std::size_t n = pick(rng) == 1 ? 2 : 1;
    const std::size_t c = pick(rng), o = pick(rng);
    const std::size_t k = std::array<std::size_t, 3>{2, 3, 4}[pick(rng) - 1];
    const std::size_t stride = 1 + trial % 2;
    const std::size_t pad = trial % 3 == 0 ? 0 : 1;
    const std::size_t h = 1 + pick(rng), w = 2 + pick(rng);
    auto x = random_tensor({n, c, h, w}, rng);
    auto wt = random_tensor({c, o, k, k}, rng);
    auto b = random_tensor({o}, rng);
    CAPTURE(trial);
    expect_grads([&] { return project(conv_transpose2d(x, wt, b, stride, pad), 200 + trial); }, {x, wt, b});
  }
}

TEST_CASE("instance_norm gradients") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t hw = 1 + trial % 5;
    auto x = random_tensor({1 + trial % 2u, 1 + trial % 3u, hw + 1, hw}, rng, -2.0, 2.0);
    CAPTURE(trial);
    expect_grads([&] { return project(instance_norm(x), 300 + trial); }, {x});
  }
}

TEST_CASE("conv2d matches hand-computed examples") {
  // identity kernel reproduces the input
  std::mt19937_64 rng(7);
  auto x = random_tensor({1, 1, 5, 5}, rng, -1, 1, false);
  auto id = Tensor::from({1, 1, 3, 3}, {0, 0, 0, 0, 1, 0, 0, 0, 0});
  auto y = conv2d(x, id, Tensor{}, 1, 1);
  for (std::size_t i = 0; i < 25; ++i) CHECK(y.data()[i] == doctest::Approx(x.data()[i]).epsilon(1e-15));

  // all-ones kernel over all-ones input counts the in-bounds taps
  auto ones = Tensor::full({1, 1, 4, 4}, 1.0);
  auto k = Tensor::full({1, 1, 3, 3}, 1.0);
  auto z = conv2d(ones, k, Tensor::from({1}, {0.5}), 1, 1);
  const double expect[16] = {4, 6, 6, 4, 6, 9, 9, 6, 6, 9, 9, 6, 4, 6, 6, 4};
  for (std::size_t i = 0; i < 16; ++i) CHECK(z.data()[i] == doctest::Approx(expect[i] + 0.5));

  CHECK(conv_out_size(64, 4, 2, 1) == 32);
  CHECK_THROWS(conv_out_size(2, 5, 1, 0));
}

TEST_CASE("conv_transpose2d is the adjoint of conv2d") {
  // <conv(x), y> == <x, convT(y)> with the same weight
  std::mt19937_64 rng(8);
  auto x = random_tensor({1, 2, 8, 8}, rng, -1, 1, false);
  auto w = random_tensor({3, 2, 4, 4}, rng, -1, 1, false);
  auto y = random_tensor({1, 3, 4, 4}, rng, -1, 1, false);
  const auto cx = conv2d(x, w, Tensor{}, 2, 1);
  const auto ty = conv_transpose2d(y, w, Tensor{}, 2, 1);
  REQUIRE(ty.shape() == x.shape());
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < cx.size(); ++i) lhs += cx.data()[i] * y.data()[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x.data()[i] * ty.data()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("instance_norm output has zero mean and unit variance per channel") {
  std::mt19937_64 rng(9);
  auto x = random_tensor({2, 3, 6, 7}, rng, -4, 9, false);
  auto y = instance_norm(x, 0.0);
  for (std::size_t p = 0; p < 6; ++p) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < 42; ++i) m += y.data()[p * 42 + i];
    m /= 42;
    for (std::size_t i = 0; i < 42; ++i) v += (y.data()[p * 42 + i] - m) * (y.data()[p * 42 + i] - m);
    CHECK(std::abs(m) < 1e-12);
    CHECK(v / 42 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("backward is linear in the upstream loss") {
  // grad of (a*L1 + b*L2) == a*grad L1 + b*grad L2
  std::mt19937_64 rng(10);
  auto x = random_tensor({1, 2, 6, 6}, rng);
  auto w = random_tensor({2, 2, 3, 3}, rng);
  auto f1 = [&] { return project(tanh(conv2d(x, w, Tensor{}, 1, 1)), 1); };
  auto f2 = [&] { return project(instance_norm(conv2d(x, w, Tensor{}, 2, 1)), 2); };
  auto grads = [&](const std::function<Tensor()>& f) {
    x.zero_grad();
    w.zero_grad();
    f().backward();
    std::vector<double> g(x.grad().begin(), x.grad().end());
    g.insert(g.end(), w.grad().begin(), w.grad().end());
    return g;
  };
  const auto g1 = grads(f1), g2 = grads(f2);
  const auto g12 = grads([&] { return add(scale(f1(), 0.3), scale(f2(), -1.7)); });
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g12[i] == doctest::Approx(0.3 * g1[i] - 1.7 * g2[i]).epsilon(1e-12));
}

TEST_CASE("detach cuts the graph") {
  std::mt19937_64 rng(11);
  auto a = random_tensor({1, 1, 2, 2}, rng);
  auto loss = sum(mul(a.detach(), a));
  a.zero_grad();
  loss.backward();
  for (std::size_t i = 0; i < 4; ++i) CHECK(a.grad()[i] == doctest::Approx(a.data()[i]));
}

TEST_CASE("shape errors name the op") {
  auto a = Tensor::zeros({1, 1, 2, 2});
  auto b = Tensor::zeros({1, 1, 2, 3});
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("add"), std::invalid_argument);
  CHECK_THROWS_AS(conv2d(Tensor::zeros({2, 2}), Tensor::zeros({1, 1, 1, 1}), Tensor{}, 1, 0), std::invalid_argument);
}

TEST_CASE("kink retry resolves straddled kinks but not wrong gradients") {
  auto x = Tensor::from({1}, {0.0}, true);
  // kink at 5e-6 sits inside the ±1e-5 probe
  auto r = check_gradients([&] { return abs(add_scalar(x, -5e-6)); }, {x});
  CHECK(r.kinks == 1);
  CHECK(r.max_rel_error < kTol);
  GradCheckOptions strict;
  strict.kink_retry = false;
  CHECK(check_gradients([&] { return abs(add_scalar(x, -5e-6)); }, {x}, strict).max_rel_error > 0.1);

  // an op whose backward is off by 10% fails at every step size
  auto wrong = [&] {
    auto n = std::make_shared<Node>();
    n->shape = {1};
    n->value = {x.data()[0] * x.data()[0]};
    n->requires_grad = true;
    n->parents = {x.node_ptr()};
    n->backward_fn = [](Node& self) { self.parents[0]->grad_buffer()[0] += self.grad[0] * 2.2 * self.parents[0]->value[0]; };
    return Tensor(n);
  };
  x.data()[0] = 0.7;
  const auto bad = check_gradients(wrong, {x});
  CHECK(bad.kinks == 0);
  CHECK(bad.max_rel_error > 0.05);
}
