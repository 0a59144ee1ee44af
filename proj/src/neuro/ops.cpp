#include "radsr/neuro/ops.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <mutex>
#include <stdexcept>

namespace radsr::neuro {

namespace {

void check_finite(const Node& n, const char* op) {
  if (!nan_check_enabled()) return;
  for (double v : n.value)
    if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite value produced by ") + op);
}

// Output node wired to `parents` when any of them needs a gradient.
std::shared_ptr<Node> make_node(Shape shape, std::initializer_list<Tensor> parents) {
  auto n = std::make_shared<Node>();
  n->value.assign(numel(shape), 0.0);
  n->shape = std::move(shape);
  for (const auto& p : parents)
    if (p.defined() && p.requires_grad()) n->requires_grad = true;
  if (n->requires_grad)
    for (const auto& p : parents)
      if (p.defined()) n->parents.push_back(p.node_ptr());
  return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                                to_string(b.shape()));
}

void require_rank4(const Tensor& t, const char* op, const char* what) {
  if (t.shape().size() != 4)
    throw std::invalid_argument(std::string(op) + ": " + what + " must be NCHW, got " + to_string(t.shape()));
}

// BLAS is pinned to one thread so reductions keep a fixed order.
void init_blas() {
  static std::once_flag once;
  std::call_once(once, [] { openblas_set_num_threads(1); });
}

template <class F, class D>
Tensor unary(const Tensor& a, const char* op, F f, D deriv) {
  auto n = make_node(a.shape(), {a});
  const auto x = a.data();
  for (std::size_t i = 0; i < x.size(); ++i) n->value[i] = f(x[i]);
  check_finite(*n, op);
  if (n->requires_grad) {
    n->backward_fn = [deriv](Node& self) {
      Node& p = *self.parents[0];
      if (!p.requires_grad) return;
      auto& g = p.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * deriv(p.value[i], self.value[i]);
    };
  }
  return Tensor(n);
}

// col[(c*K + kh)*K + kw][oh*Wo + ow] = x[c][oh*s + kh - p][ow*s + kw - p]
void im2col(const double* x, std::size_t C, std::size_t H, std::size_t W, std::size_t K, std::size_t s,
            std::size_t p, std::size_t Ho, std::size_t Wo, double* col) {
  const std::size_t P = Ho * Wo;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t kh = 0; kh < K; ++kh)
      for (std::size_t kw = 0; kw < K; ++kw) {
        double* row = col + ((c * K + kh) * K + kw) * P;
        for (std::size_t oh = 0; oh < Ho; ++oh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * s + kh) - static_cast<std::ptrdiff_t>(p);
          double* out = row + oh * Wo;
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) {
            for (std::size_t ow = 0; ow < Wo; ++ow) out[ow] = 0.0;
            continue;
          }
          const double* in = x + (c * H + static_cast<std::size_t>(ih)) * W;
          for (std::size_t ow = 0; ow < Wo; ++ow) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * s + kw) - static_cast<std::ptrdiff_t>(p);
            out[ow] = (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) ? 0.0 : in[iw];
          }
        }
      }
}

// Adjoint of im2col: accumulates columns back into x.
void col2im_add(const double* col, std::size_t C, std::size_t H, std::size_t W, std::size_t K, std::size_t s,
                std::size_t p, std::size_t Ho, std::size_t Wo, double* x) {
  const std::size_t P = Ho * Wo;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t kh = 0; kh < K; ++kh)
      for (std::size_t kw = 0; kw < K; ++kw) {
        const double* row = col + ((c * K + kh) * K + kw) * P;
        for (std::size_t oh = 0; oh < Ho; ++oh) {
          const auto ih = static_cast<std::ptrdiff_t>(oh * s + kh) - static_cast<std::ptrdiff_t>(p);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
          double* out = x + (c * H + static_cast<std::size_t>(ih)) * W;
          const double* in = row + oh * Wo;
          for (std::size_t ow = 0; ow < Wo; ++ow) {
            const auto iw = static_cast<std::ptrdiff_t>(ow * s + kw) - static_cast<std::ptrdiff_t>(p);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(W)) out[iw] += in[ow];
          }
        }
      }
}

void check_bias(const Tensor& bias, std::size_t channels, const char* op) {
  if (bias.defined() && (bias.shape().size() != 1 || bias.dim(0) != channels))
    throw std::invalid_argument(std::string(op) + ": bias shape " + to_string(bias.shape()) + " vs " +
                                std::to_string(channels) + " output channels");
}

}  // namespace

std::size_t conv_out_size(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad) {
  if (stride == 0 || in + 2 * pad < kernel)
    throw std::invalid_argument("convolution geometry in=" + std::to_string(in) + " k=" + std::to_string(kernel) +
                                " s=" + std::to_string(stride) + " p=" + std::to_string(pad) + " is empty");
  return (in + 2 * pad - kernel) / stride + 1;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  auto n = make_node(a.shape(), {a, b});
  for (std::size_t i = 0; i < n->value.size(); ++i) n->value[i] = a.data()[i] + b.data()[i];
  check_finite(*n, "add");
  if (n->requires_grad) {
    n->backward_fn = [](Node& self) {
      for (auto& p : self.parents) {
        if (!p->requires_grad) continue;
        auto& g = p->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
    };
  }
  return Tensor(n);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  auto n = make_node(a.shape(), {a, b});
  for (std::size_t i = 0; i < n->value.size(); ++i) n->value[i] = a.data()[i] - b.data()[i];
  check_finite(*n, "sub");
  if (n->requires_grad) {
    const bool a_grad = a.requires_grad();
    const bool b_grad = b.requires_grad();
    n->backward_fn = [a_grad, b_grad](Node& self) {
      std::size_t k = 0;
      if (a_grad) {
        auto& g = self.parents[k]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
      }
      ++k;
      if (b_grad) {
        auto& g = self.parents[k]->grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
      }
    };
  }
  return Tensor(n);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  auto n = make_node(a.shape(), {a, b});
  for (std::size_t i = 0; i < n->value.size(); ++i) n->value[i] = a.data()[i] * b.data()[i];
  check_finite(*n, "mul");
  if (n->requires_grad) {
    n->backward_fn = [](Node& self) {
      Node& pa = *self.parents[0];
      Node& pb = *self.parents[1];
      if (pa.requires_grad) {
        auto& g = pa.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
      }
      if (pb.requires_grad) {
        auto& g = pb.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
      }
    };
  }
  return Tensor(n);
}

Tensor scale(const Tensor& a, double s) {
  return unary(a, "scale", [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, "add_scalar", [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor abs(const Tensor& a) {
  return unary(a, "abs", [](double x) { return std::abs(x); },
               [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor relu(const Tensor& a) {
  return unary(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary(a, "leaky_relu", [slope](double x) { return x > 0.0 ? x : slope * x; },
               [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Tensor tanh(const Tensor& a) {
  return unary(a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(a, "sigmoid", [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
               [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& a) {
  return unary(a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary(a, "clamp", [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
               [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  auto n = make_node({1}, {a});
  double s = 0.0;
  for (double v : a.data()) s += v;
  n->value[0] = s;
  check_finite(*n, "sum");
  if (n->requires_grad) {
    n->backward_fn = [](Node& self) {
      auto& g = self.parents[0]->grad_buffer();
      for (auto& v : g) v += self.grad[0];
    };
  }
  return Tensor(n);
}

Tensor mean(const Tensor& a) {
  auto n = make_node({1}, {a});
  double s = 0.0;
  for (double v : a.data()) s += v;
  const double count = static_cast<double>(a.size());
  n->value[0] = s / count;
  check_finite(*n, "mean");
  if (n->requires_grad) {
    n->backward_fn = [count](Node& self) {
      auto& g = self.parents[0]->grad_buffer();
      const double d = self.grad[0] / count;
      for (auto& v : g) v += d;
    };
  }
  return Tensor(n);
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  require_rank4(a, "concat", "first input");
  require_rank4(b, "concat", "second input");
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw std::invalid_argument("concat: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  const std::size_t N = a.dim(0), Ca = a.dim(1), Cb = b.dim(1), HW = a.dim(2) * a.dim(3);
  auto n = make_node({N, Ca + Cb, a.dim(2), a.dim(3)}, {a, b});
  for (std::size_t i = 0; i < N; ++i) {
    std::copy_n(a.data().data() + i * Ca * HW, Ca * HW, n->value.data() + i * (Ca + Cb) * HW);
    std::copy_n(b.data().data() + i * Cb * HW, Cb * HW, n->value.data() + (i * (Ca + Cb) + Ca) * HW);
  }
  if (n->requires_grad) {
    const bool a_grad = a.requires_grad();
    const bool b_grad = b.requires_grad();
    n->backward_fn = [=](Node& self) {
      if (a_grad) {
        auto& g = self.parents[0]->grad_buffer();
        for (std::size_t i = 0; i < N; ++i)
          for (std::size_t k = 0; k < Ca * HW; ++k) g[i * Ca * HW + k] += self.grad[i * (Ca + Cb) * HW + k];
      }
      if (b_grad) {
        auto& g = self.parents[1]->grad_buffer();
        for (std::size_t i = 0; i < N; ++i)
          for (std::size_t k = 0; k < Cb * HW; ++k) g[i * Cb * HW + k] += self.grad[(i * (Ca + Cb) + Ca) * HW + k];
      }
    };
  }
  return Tensor(n);
}

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride, std::size_t pad) {
  init_blas();
  require_rank4(x, "conv2d", "input");
  require_rank4(weight, "conv2d", "weight");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t O = weight.dim(0), K = weight.dim(2);
  if (weight.dim(1) != C || weight.dim(3) != K)
    throw std::invalid_argument("conv2d: input " + to_string(x.shape()) + " incompatible with weight " +
                                to_string(weight.shape()));
  check_bias(bias, O, "conv2d");
  const std::size_t Ho = conv_out_size(H, K, stride, pad);
  const std::size_t Wo = conv_out_size(W, K, stride, pad);
  const std::size_t CKK = C * K * K, P = Ho * Wo;

  auto n = make_node({N, O, Ho, Wo}, {x, weight, bias});
  const bool keep_cols = n->requires_grad && weight.requires_grad();
  auto cols = std::make_shared<std::vector<double>>(keep_cols ? N * CKK * P : CKK * P);
  for (std::size_t i = 0; i < N; ++i) {
    double* col = cols->data() + (keep_cols ? i * CKK * P : 0);
    im2col(x.data().data() + i * C * H * W, C, H, W, K, stride, pad, Ho, Wo, col);
    double* out = n->value.data() + i * O * P;
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(O), static_cast<int>(P),
                static_cast<int>(CKK), 1.0, weight.data().data(), static_cast<int>(CKK), col, static_cast<int>(P),
                0.0, out, static_cast<int>(P));
    if (bias.defined())
      for (std::size_t o = 0; o < O; ++o)
        for (std::size_t k = 0; k < P; ++k) out[o * P + k] += bias.data()[o];
  }
  check_finite(*n, "conv2d");

  if (n->requires_grad) {
    const bool x_grad = x.requires_grad(), w_grad = weight.requires_grad();
    const bool b_grad = bias.defined() && bias.requires_grad();
    if (!keep_cols) cols.reset();
    n->backward_fn = [=](Node& self) {
      Node& px = *self.parents[0];
      Node& pw = *self.parents[1];
      std::vector<double> dcol(x_grad ? CKK * P : 0);
      for (std::size_t i = 0; i < N; ++i) {
        const double* dy = self.grad.data() + i * O * P;
        if (w_grad) {
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(O), static_cast<int>(CKK),
                      static_cast<int>(P), 1.0, dy, static_cast<int>(P), cols->data() + i * CKK * P,
                      static_cast<int>(P), 1.0, pw.grad_buffer().data(), static_cast<int>(CKK));
        }
        if (b_grad) {
          auto& gb = self.parents[2]->grad_buffer();
          for (std::size_t o = 0; o < O; ++o) {
            double s = 0.0;
            for (std::size_t k = 0; k < P; ++k) s += dy[o * P + k];
            gb[o] += s;
          }
        }
        if (x_grad) {
          cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(CKK), static_cast<int>(P),
                      static_cast<int>(O), 1.0, pw.value.data(), static_cast<int>(CKK), dy, static_cast<int>(P), 0.0,
                      dcol.data(), static_cast<int>(P));
          col2im_add(dcol.data(), C, H, W, K, stride, pad, Ho, Wo, px.grad_buffer().data() + i * C * H * W);
        }
      }
    };
  }
  return Tensor(n);
}

Tensor conv_transpose2d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t stride,
                        std::size_t pad) {
  init_blas();
  require_rank4(x, "conv_transpose2d", "input");
  require_rank4(weight, "conv_transpose2d", "weight");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  const std::size_t O = weight.dim(1), K = weight.dim(2);
  if (weight.dim(0) != C || weight.dim(3) != K)
    throw std::invalid_argument("conv_transpose2d: input " + to_string(x.shape()) + " incompatible with weight " +
                                to_string(weight.shape()));
  check_bias(bias, O, "conv_transpose2d");
  if (stride == 0 || (H - 1) * stride + K <= 2 * pad || (W - 1) * stride + K <= 2 * pad)
    throw std::invalid_argument("conv_transpose2d: empty output for input " + to_string(x.shape()));
  const std::size_t Ho = (H - 1) * stride + K - 2 * pad;
  const std::size_t Wo = (W - 1) * stride + K - 2 * pad;
  const std::size_t OKK = O * K * K, P = H * W;

  auto n = make_node({N, O, Ho, Wo}, {x, weight, bias});
  std::vector<double> col(OKK * P);
  for (std::size_t i = 0; i < N; ++i) {
    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(OKK), static_cast<int>(P),
                static_cast<int>(C), 1.0, weight.data().data(), static_cast<int>(OKK),
                x.data().data() + i * C * P, static_cast<int>(P), 0.0, col.data(), static_cast<int>(P));
    double* out = n->value.data() + i * O * Ho * Wo;
    col2im_add(col.data(), O, Ho, Wo, K, stride, pad, H, W, out);
    if (bias.defined())
      for (std::size_t o = 0; o < O; ++o)
        for (std::size_t k = 0; k < Ho * Wo; ++k) out[o * Ho * Wo + k] += bias.data()[o];
  }
  check_finite(*n, "conv_transpose2d");

  if (n->requires_grad) {
    const bool x_grad = x.requires_grad(), w_grad = weight.requires_grad();
    const bool b_grad = bias.defined() && bias.requires_grad();
    n->backward_fn = [=](Node& self) {
      Node& px = *self.parents[0];
      Node& pw = *self.parents[1];
      std::vector<double> dcol(OKK * P);
      for (std::size_t i = 0; i < N; ++i) {
        const double* dy = self.grad.data() + i * O * Ho * Wo;
        im2col(dy, O, Ho, Wo, K, stride, pad, H, W, dcol.data());
        if (x_grad) {
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(C), static_cast<int>(P),
                      static_cast<int>(OKK), 1.0, pw.value.data(), static_cast<int>(OKK), dcol.data(),
                      static_cast<int>(P), 1.0, px.grad_buffer().data() + i * C * P, static_cast<int>(P));
        }
        if (w_grad) {
          cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(C), static_cast<int>(OKK),
                      static_cast<int>(P), 1.0, px.value.data() + i * C * P, static_cast<int>(P), dcol.data(),
                      static_cast<int>(P), 1.0, pw.grad_buffer().data(), static_cast<int>(OKK));
        }
        if (b_grad) {
          auto& gb = self.parents[2]->grad_buffer();
          for (std::size_t o = 0; o < O; ++o) {
            double s = 0.0;
            for (std::size_t k = 0; k < Ho * Wo; ++k) s += dy[o * Ho * Wo + k];
            gb[o] += s;
          }
        }
      }
    };
  }
  return Tensor(n);
}

Tensor instance_norm(const Tensor& x, double eps) {
  require_rank4(x, "instance_norm", "input");
  const std::size_t planes = x.dim(0) * x.dim(1), HW = x.dim(2) * x.dim(3);
  auto n = make_node(x.shape(), {x});
  auto inv_std = std::make_shared<std::vector<double>>(planes);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* in = x.data().data() + p * HW;
    double mu = 0.0;
    for (std::size_t k = 0; k < HW; ++k) mu += in[k];
    mu /= static_cast<double>(HW);
    double var = 0.0;
    for (std::size_t k = 0; k < HW; ++k) var += (in[k] - mu) * (in[k] - mu);
    var /= static_cast<double>(HW);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[p] = is;
    double* out = n->value.data() + p * HW;
    for (std::size_t k = 0; k < HW; ++k) out[k] = (in[k] - mu) * is;
  }
  check_finite(*n, "instance_norm");
  if (n->requires_grad) {
    n->backward_fn = [=](Node& self) {
      auto& g = self.parents[0]->grad_buffer();
      for (std::size_t p = 0; p < planes; ++p) {
        const double* dy = self.grad.data() + p * HW;
        const double* y = self.value.data() + p * HW;
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < HW; ++k) {
          m1 += dy[k];
          m2 += dy[k] * y[k];
        }
        m1 /= static_cast<double>(HW);
        m2 /= static_cast<double>(HW);
        const double is = (*inv_std)[p];
        for (std::size_t k = 0; k < HW; ++k) g[p * HW + k] += is * (dy[k] - m1 - y[k] * m2);
      }
    };
  }
  return Tensor(n);
}

}  // namespace radsr::neuro
