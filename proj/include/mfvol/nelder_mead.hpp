#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfvol::optim {

struct NelderMeadOptions {
  double spread_tol = 1e-8;  // stop when max f - min f over the simplex falls below this
  std::size_t max_iterations = 5000;
  double initial_step = 0.25;  // additive offset of each initial vertex
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double spread = 0.0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `f` from `x0` with the standard reflect/expand/contract/shrink
/// simplex moves. Non-finite objective values are treated as +infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace mfvol::optim
