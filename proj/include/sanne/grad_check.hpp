#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sanne/tensor.hpp"

namespace sanne {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::int64_t worst_index = -1;
  std::int64_t checked = 0;
};

// Central-difference check of analytic gradients. `forward` must be a
// deterministic function of the current contents of `params` (all sampling
// frozen beforehand). `analytic` is aligned with `params` by position.
// Runs in double; the relative error uses max(|fd|, |analytic|, 1e-8) as
// denominator.
GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::vector<std::pair<std::string, Tensor64*>>& params,
                           const std::vector<Tensor64>& analytic, double eps);

}  // namespace sanne
