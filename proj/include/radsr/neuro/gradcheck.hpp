#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "radsr/neuro/tensor.hpp"

namespace radsr::neuro {

struct GradCheckOptions {
  double step = 1e-5;
  double denom_floor = 1e-6;
  /// Elements probed per tensor; 0 probes all of them. Probed indices are
  /// evenly strided so large tensors are still covered end to end.
  std::size_t max_probes_per_tensor = 0;
  /// A probe whose relative error exceeds `tolerance` at `step` is re-probed
  /// at step/10 and step/100. If a smaller step agrees, the ±step interval
  /// straddled a ReLU/abs kink, where central differences are not an oracle;
  /// the probe is counted in `kinks` and scored at the smaller step.
  bool kink_retry = true;
  double tolerance = 1e-4;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
  std::size_t kinks = 0;  // probes resolved by a smaller step
  std::string worst;  // "tensor i, element k: analytic a vs numeric n"
};

/// Compares reverse-mode gradients of the scalar `loss()` against central
/// finite differences for every tensor in `inputs`. `loss` must rebuild the
/// graph on each call and read the inputs' current values.
GradCheckResult check_gradients(const std::function<Tensor()>& loss, const std::vector<Tensor>& inputs,
                                const GradCheckOptions& opt = {});

}  // namespace radsr::neuro
