#include "mfvol/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mfvol::optim {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t n = x0.size();
  NelderMeadResult result;

  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s(n + 1);
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s[i] = std::move(simplex[order[i]]);
      v[i] = values[order[i]];
    }
    simplex = std::move(s);
    values = std::move(v);
  };
  auto along = [&](double coef, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j)
      out[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
  };

  sort_simplex();
  while (true) {
    result.spread = values[n] - values[0];
    if (std::isfinite(values[n]) && result.spread < options.spread_tol) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations) break;
    ++result.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    for (auto& c : centroid) c /= static_cast<double>(n);

    along(-kReflect, trial);
    const double fr = eval(trial);
    if (fr < values[0]) {
      along(-kReflect * kExpand, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[n] = trial2;
        values[n] = fe;
      } else {
        simplex[n] = trial;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = trial;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      along(outside ? -kReflect * kContract : kContract, trial2);
      const double fc = eval(trial2);
      if (fc < (outside ? fr : values[n])) {
        simplex[n] = trial2;
        values[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + kShrink * (simplex[i][j] - simplex[0][j]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }

  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace mfvol::optim
