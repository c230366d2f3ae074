#include "sanne/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace sanne {

GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::vector<std::pair<std::string, Tensor64*>>& params,
                           const std::vector<Tensor64>& analytic, double eps) {
  if (params.size() != analytic.size()) {
    throw std::invalid_argument("grad_check: params/analytic size mismatch");
  }
  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor64& tensor = *params[p].second;
    const Tensor64& grad = analytic[p];
    if (grad.shape != tensor.shape) {
      throw std::invalid_argument("grad_check: gradient shape mismatch for " + params[p].first);
    }
    for (std::int64_t i = 0; i < tensor.numel(); ++i) {
      const double saved = tensor.data[i];
      tensor.data[i] = saved + eps;
      const double fp = forward();
      tensor.data[i] = saved - eps;
      const double fm = forward();
      tensor.data[i] = saved;
      const double fd = (fp - fm) / (2.0 * eps);
      const double an = grad.data[i];
      const double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
      const double rel = std::abs(fd - an) / denom;
      ++report.checked;
      if (rel > report.max_rel_err) {
        report.max_rel_err = rel;
        report.worst_param = params[p].first;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace sanne
