#include "radsr/neuro/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace radsr::neuro {

GradCheckResult check_gradients(const std::function<Tensor()>& loss, const std::vector<Tensor>& inputs,
                                const GradCheckOptions& opt) {
  for (const auto& t : inputs) t.zero_grad();
  loss().backward();
  std::vector<std::vector<double>> analytic;
  for (const auto& t : inputs) analytic.emplace_back(t.grad().begin(), t.grad().end());

  GradCheckResult res;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto& values = inputs[i].node()->value;
    const std::size_t n = values.size();
    const std::size_t probes = opt.max_probes_per_tensor == 0 ? n : std::min(n, opt.max_probes_per_tensor);
    for (std::size_t p = 0; p < probes; ++p) {
      const std::size_t k = probes == n ? p : p * n / probes;
      const double orig = values[k];
      const double a = analytic[i][k];
      auto probe = [&](double h) {
        values[k] = orig + h;
        const double up = loss().item();
        values[k] = orig - h;
        const double down = loss().item();
        values[k] = orig;
        const double numeric = (up - down) / (2.0 * h);
        const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), opt.denom_floor});
        return std::pair{numeric, err};
      };
      auto [numeric, err] = probe(opt.step);
      if (opt.kink_retry && err > opt.tolerance) {
        for (double h : {opt.step / 10.0, opt.step / 100.0}) {
          const auto [n2, e2] = probe(h);
          if (e2 <= opt.tolerance) {
            numeric = n2;
            err = e2;
            ++res.kinks;
            break;
          }
        }
      }
      ++res.probes;
      if (err > res.max_rel_error || res.worst.empty()) {
        res.max_rel_error = err;
        std::ostringstream os;
        os << "tensor " << i << ", element " << k << ": analytic " << a << " vs numeric " << numeric;
        res.worst = os.str();
      }
    }
  }
  return res;
}

}  // namespace radsr::neuro
