#include <cmath>
#include <span>

#include <gtest/gtest.h>

#include "avn/nelder_mead.hpp"

using avn::nelder_mead;
using avn::SimplexOptions;

TEST(NelderMead, Rosenbrock) {
  auto f = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  SimplexOptions opt;
  opt.max_evals = 20000;
  const auto r = nelder_mead(f, {-1.2, 1.0}, opt);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
  EXPECT_LE(r.evals, opt.max_evals);
}

TEST(NelderMead, ShiftedQuadraticInEightDimensions) {
  auto f = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * std::pow(x[i] - 0.1 * i, 2);
    return s;
  };
  const auto r = nelder_mead(f, std::vector<double>(8, 2.0));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(r.x[i], 0.1 * i, 1e-5);
}

TEST(NelderMead, BudgetIsRespected) {
  auto f = [](std::span<const double> x) { return std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]); };
  SimplexOptions opt;
  opt.max_evals = 50;
  const auto r = nelder_mead(f, {3.0, -2.0, 1.0}, opt);
  EXPECT_LE(r.evals, 50U + 4U);  // a shrink step may finish its sweep
  EXPECT_FALSE(r.converged);
}
