// Derivative-free simplex minimizer with dimension-adaptive coefficients.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace avn {

struct SimplexOptions {
  std::size_t max_evals = 20000;
  double f_tol = 1e-14;   // spread of simplex values
  double x_tol = 1e-10;   // simplex diameter (infinity norm)
  double initial_step = 0.3;
  int restarts = 2;       // re-inflate the simplex at the converged point
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evals = 0;
  bool converged = false;
};

namespace detail {

template <typename F>
SimplexResult simplex_once(F&& f, std::vector<double> x0, const SimplexOptions& opt, std::size_t budget) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;

  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  std::vector<double> vals(n + 1);
  std::size_t evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(std::span<const double>(x));
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  bool converged = false;

  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t d = 0; d < n; ++d) diameter = std::max(diameter, std::abs(pts[i][d] - pts[best][d]));
    if (vals[worst] - vals[best] <= opt.f_tol && diameter <= opt.x_tol) {
      converged = true;
      break;
    }
    if (vals[worst] - vals[best] <= opt.f_tol * 1e-2 || diameter <= opt.x_tol * 1e-2) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / dn;

    for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + alpha * (centroid[d] - pts[worst][d]);
    const double fr = eval(xr);

    if (fr < vals[best]) {
      for (std::size_t d = 0; d < n; ++d) xe[d] = centroid[d] + beta * (xr[d] - centroid[d]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    for (std::size_t d = 0; d < n; ++d)
      xc[d] = outside ? centroid[d] + gamma * (xr[d] - centroid[d])
                      : centroid[d] - gamma * (centroid[d] - pts[worst][d]);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + delta * (pts[i][d] - pts[best][d]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], evals, converged};
}

}  // namespace detail

/// Minimizes f: span<const double> -> double from x0. The simplex is
/// re-inflated around the incumbent `opt.restarts` times to escape
/// premature collapse.
template <typename F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0, const SimplexOptions& opt = {}) {
  SimplexResult total{std::move(x0), 0.0, 0, false};
  double step = opt.initial_step;
  for (int round = 0; round <= opt.restarts && total.evals < opt.max_evals; ++round) {
    SimplexOptions o = opt;
    o.initial_step = step;
    auto r = detail::simplex_once(f, total.x, o, opt.max_evals - total.evals);
    total.evals += r.evals;
    total.x = std::move(r.x);
    total.value = r.value;
    total.converged = r.converged;
    step *= 0.1;
  }
  return total;
}

}  // namespace avn
