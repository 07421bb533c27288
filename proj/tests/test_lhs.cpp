#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "avn/delta.hpp"
#include "avn/lhs.hpp"

#include "random_states.hpp"

using namespace avn;
using std::numbers::pi;

namespace {

const std::vector<MeasurementSetting> kZX{MeasurementSetting::z(), MeasurementSetting::x()};

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

double conditional_gap(const HiddenStateEnsemble& a, const HiddenStateEnsemble& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.n_settings(); ++s)
    for (int o : {0, 1}) worst = std::max(worst, max_abs(a.conditional(s, o) - b.conditional(s, o)));
  return worst;
}

}  // namespace

TEST(HiddenStateEnsemble, ValidatesContents) {
  const QubitState up(Vec3(0, 0, 1));
  EXPECT_THROW(HiddenStateEnsemble({{0.5, up}}, {{1.0}}), std::invalid_argument);
  EXPECT_THROW(HiddenStateEnsemble({{0.0, up}, {1.0, up}}, {{1.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(HiddenStateEnsemble({{1.0, up}}, {{1.5}}), std::invalid_argument);
  EXPECT_THROW(HiddenStateEnsemble({{1.0, up}}, {{1.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(DeterministicEnsemble(HiddenStateEnsemble({{1.0, up}}, {{0.5}})), std::invalid_argument);
}

TEST(LhsProbabilities, SingleHiddenStateByHand) {
  const HiddenStateEnsemble model({{1.0, QubitState(Vec3(0, 0, 1))}}, {{1.0}, {0.5}});
  const auto p = lhs_probabilities(model, pure_family_scenario(pi / 4));
  ASSERT_EQ(p.size(), 4U);
  EXPECT_NEAR(p[0], 0.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
  EXPECT_NEAR(p[3], 0.25, 1e-15);
}

TEST(LhsProbabilities, OrthogonalTestsGiveZero) {
  std::mt19937_64 rng(1);
  const QubitState up(Vec3(0, 0, 1));
  const QubitState down(Vec3(0, 0, -1));
  const HiddenStateEnsemble model({{0.3, up}, {0.7, up}}, {{0.2, 0.9}, {0.5, 0.1}});
  SteeringScenario sc{kZX, {{0, 0, down}, {0, 1, down}, {1, 0, down}, {1, 1, down}}};
  for (double p : lhs_probabilities(model, sc)) EXPECT_NEAR(p, 0.0, 1e-16);
}

TEST(LhsProbabilities, UniformTwoStateDeterministicZ) {
  const HiddenStateEnsemble model({{0.5, QubitState(Vec3(0, 0, 1))}, {0.5, QubitState(Vec3(0, 0, -1))}},
                                  {{1.0, 0.0}, {0.5, 0.5}});
  const auto p = lhs_probabilities(model, pure_family_scenario(0.4));
  EXPECT_NEAR(p[0], 0.0, 1e-16);
  EXPECT_NEAR(p[1], 0.0, 1e-16);
}

TEST(LhsProbabilities, SettingCountMismatchIsAContractViolation) {
  const HiddenStateEnsemble model({{1.0, QubitState(Vec3(0, 0, 1))}}, {{1.0}});
  EXPECT_THROW(lhs_probabilities(model, pure_family_scenario(0.3)), std::invalid_argument);
}

TEST(DeterministicDecomposition, DeterministicInputIsFixedPoint) {
  std::mt19937_64 rng(2);
  const auto det = testing_support::random_deterministic_model(rng, 6, 2);
  const auto out = deterministic_decomposition(det.model(), 2);
  ASSERT_EQ(out.size(), det.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    EXPECT_NEAR(out.model().entries()[k].weight, det.model().entries()[k].weight, 1e-15);
    EXPECT_EQ(out.response_string(k), det.response_string(k));
  }
}

TEST(DeterministicDecomposition, ProductWeightsForOneHiddenState) {
  const double p = 0.3, q = 0.8;
  const QubitState s(Vec3(0.2, -0.4, 0.5));
  const HiddenStateEnsemble model({{1.0, s}}, {{p}, {q}});
  const auto out = deterministic_decomposition(model, 2);
  ASSERT_EQ(out.size(), 4U);
  const double expected[] = {p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q)};
  for (std::size_t m = 0; m < 4; ++m) {
    EXPECT_EQ(out.response_string(m), m);
    EXPECT_NEAR(out.model().entries()[m].weight, expected[m], 1e-15);
    EXPECT_LT((out.model().entries()[m].state.bloch() - s.bloch()).norm(), 1e-16);
  }
  // p(a|A,k) w_k rho_k is reproduced term by term
  EXPECT_LT(conditional_gap(model, out.model()), 1e-15);
}

TEST(DeterministicDecomposition, PrunesZeroWeights) {
  const HiddenStateEnsemble model({{0.5, QubitState(Vec3(0, 0, 1))}, {0.5, QubitState(Vec3(1, 0, 0))}},
                                  {{1.0, 0.25}, {0.5, 0.0}});
  const auto out = deterministic_decomposition(model, 2);
  // first entry: 2 live strings, second: 2 live strings
  EXPECT_EQ(out.size(), 4U);
  for (const auto& e : out.model().entries()) EXPECT_GT(e.weight, kPruneWeight);
}

TEST(ReduceTo2N, MergesOppositeVectorsToOrigin) {
  const auto det = DeterministicEnsemble::from_strings(
      {{0.5, QubitState(Vec3(0, 0, 1))}, {0.5, QubitState(Vec3(0, 0, -1))}}, {2, 2}, 2);
  const auto out = reduce_to_2N(det, 2);
  ASSERT_EQ(out.size(), 1U);
  EXPECT_NEAR(out.model().entries()[0].weight, 1.0, 1e-15);
  EXPECT_LT(out.model().entries()[0].state.bloch().norm(), 1e-15);
  EXPECT_EQ(out.response_string(0), 2U);
}

TEST(ReduceTo2N, DistinctStringsUnchanged) {
  std::mt19937_64 rng(4);
  std::vector<HiddenEntry> entries;
  const auto w = testing_support::random_weights(rng, 4);
  for (std::size_t k = 0; k < 4; ++k) entries.push_back({w[k], testing_support::random_pure(rng)});
  const auto det = DeterministicEnsemble::from_strings(entries, {0, 1, 2, 3}, 2);
  const auto out = reduce_to_2N(det, 2);
  ASSERT_EQ(out.size(), 4U);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(out.model().entries()[k].weight, w[k], 1e-16);
    EXPECT_LT((out.model().entries()[k].state.bloch() - entries[k].state.bloch()).norm(), 1e-15);
  }
}

TEST(ReduceTo2N, TwentyEntriesKeepProbabilities) {
  std::mt19937_64 rng(5);
  const auto det = testing_support::random_deterministic_model(rng, 20, 2);
  const auto out = reduce_to_2N(det, 2);
  EXPECT_LE(out.size(), 4U);
  const auto sc = pure_family_scenario(0.6);
  const auto a = lhs_probabilities(det.model(), sc), b = lhs_probabilities(out.model(), sc);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(LhsProperties, DecompositionPreservesProbabilities) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> th(0.0, pi / 2);
  for (int i = 0; i < 1000; ++i) {
    const auto model = testing_support::random_stochastic_model(rng, 1 + i % 7, 2);
    const auto det = deterministic_decomposition(model, 2);
    const auto sc = pure_family_scenario(th(rng));
    const auto a = lhs_probabilities(model, sc), b = lhs_probabilities(det.model(), sc);
    for (std::size_t j = 0; j < a.size(); ++j) ASSERT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(LhsProperties, ReductionPreservesConditionalStatesAndSize) {
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int i = 0; i < 100; ++i) {
      const auto det = testing_support::random_deterministic_model(rng, 1 + static_cast<std::size_t>(i) % 30, n);
      const auto out = reduce_to_2N(det, n);
      ASSERT_LE(out.size(), std::size_t{1} << n);
      ASSERT_LT(conditional_gap(det.model(), out.model()), 1e-12);
    }
  }
}

TEST(MassCenter, ExactModelForSeparableState) {
  const auto det = DeterministicEnsemble::from_strings(
      {{0.5, QubitState(Vec3(0, 0, 1))}, {0.5, QubitState(Vec3(0, 0, 1))}}, {0, 1}, 2);
  const auto report = mass_center_check(det, make_pure_family(0.0), pure_family_scenario(0.0));
  EXPECT_EQ(report.residuals.size(), 4U);
  EXPECT_LT(report.max(), 1e-15);
}

TEST(MassCenter, PerturbedWeightShowsUpOnAffectedOutcome) {
  const auto det = DeterministicEnsemble::from_strings(
      {{0.51, QubitState(Vec3(0, 0, 1))}, {0.49, QubitState(Vec3(0, 0, 1))}}, {0, 1}, 2);
  const auto report = mass_center_check(det, make_pure_family(0.0), pure_family_scenario(0.0));
  for (const auto& r : report.residuals) {
    if (r.setting == 0) {
      EXPECT_LT(r.scalar, 1e-15);
    } else {
      EXPECT_NEAR(r.scalar, 0.01, 1e-14);
      EXPECT_NEAR(r.vector, 0.01, 1e-14);
    }
  }
}

TEST(MassCenter, ZeroResidualsIffConditionalStatesMatch) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SteeringScenario sc{kZX, {}};
  int positives = 0;
  for (int i = 0; i < 200; ++i) {
    auto sep = testing_support::random_separable(rng, 1 + i % 5, kZX);
    auto det = deterministic_decomposition(sep.model, 2);
    if (i % 2 == 1) {
      // nudge one Bloch vector so the model stops matching
      auto entries = det.model().entries();
      std::size_t k = 0;
      for (std::size_t j = 1; j < entries.size(); ++j)
        if (entries[j].weight > entries[k].weight) k = j;
      const Vec3 r = 0.9 * entries[k].state.bloch() + Vec3(0.05, 0.0, 0.0);
      entries[k].state = QubitState(r);
      std::vector<std::uint32_t> strings;
      for (std::size_t j = 0; j < det.size(); ++j) strings.push_back(det.response_string(j));
      det = DeterministicEnsemble::from_strings(entries, strings, 2);
    }
    const bool residual_zero = mass_center_check(det, sep.state, sc).max() <= 1e-10;
    const bool matrices_match = conditional_state_mismatch(det.model(), sep.state, sc) <= 1e-10;
    EXPECT_EQ(residual_zero, matrices_match) << "case " << i;
    positives += residual_zero ? 1 : 0;
  }
  EXPECT_GE(positives, 90);
}

TEST(MassCenter, OptimalModelForSteerableStateHasResiduals) {
  DeltaConfig cfg;
  cfg.restarts = 10;
  const auto report = optimize_delta(pi / 4, Family::pure, cfg);
  const auto det = DeterministicEnsemble(report.optimal_model);
  EXPECT_GT(mass_center_check(det, make_pure_family(pi / 4), pure_family_scenario(pi / 4)).max(), 1e-3);
}
