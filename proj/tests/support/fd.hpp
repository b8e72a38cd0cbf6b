#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "tenet/ndiff/param_vec.hpp"

namespace tenet::testing {

struct FdResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
};

// Central finite differences of f around x, compared with an analytic
// gradient: |a - n| / max(|a|, |n|, floor).
inline FdResult compare_fd(const std::function<double(const ndiff::Vec&)>& f, const ndiff::Vec& x,
                           const ndiff::Vec& analytic, double eps = 1e-5, double floor = 1e-8) {
  FdResult r;
  ndiff::Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double up = f(probe);
    probe[i] = x[i] - eps;
    const double down = f(probe);
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * eps);
    const double err = std::abs(numeric - analytic[i]);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    r.max_rel_error = std::max(r.max_rel_error, err / denom);
    r.max_abs_error = std::max(r.max_abs_error, err);
    ++r.checked;
  }
  return r;
}

}  // namespace tenet::testing
