// The LHS probability bound
//
//   Delta = min over LHS models of max_i |P^LHS_i - P^QM_i|
//
// computed by minimizing the l_n relaxation (sum_i v_i^n)^(1/n) over models
// with 2^N pure hidden states, each carrying a distinct deterministic
// response string. Delta is always reported as the exact maximum gap at the
// minimizer, never the smoothed value.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "avn/lhs.hpp"
#include "avn/nelder_mead.hpp"
#include "avn/parallel.hpp"

namespace avn {

enum class Family { pure, mixed };

inline const char* to_string(Family f) { return f == Family::pure ? "pure" : "mixed"; }

inline Family parse_family(const std::string& s) {
  if (s == "pure") return Family::pure;
  if (s == "mixed") return Family::mixed;
  throw std::invalid_argument("unknown family '" + s + "' (expected pure or mixed)");
}

/// A state together with the tests it is probed with.
struct DeltaProblem {
  SteeringScenario scenario;
  std::vector<double> qm;
  double theta = 0.0;

  static DeltaProblem from_state(const TwoQubitState& state, SteeringScenario scenario, double theta = 0.0) {
    auto qm = qm_probabilities(state, scenario);
    return {std::move(scenario), std::move(qm), theta};
  }

  static DeltaProblem family(double theta, Family family) {
    if (family == Family::pure) return from_state(make_pure_family(theta), pure_family_scenario(theta), theta);
    return from_state(make_mixed_family(theta), mixed_family_scenario(), theta);
  }
};

struct DeltaConfig {
  int n_exponent = 46;
  int restarts = 200;
  double tol = 1e-13;
  std::size_t max_evals = 20000;
  std::uint64_t seed = 20140101;
  std::size_t hidden_states = 0;  // 0 = 2^N
  unsigned threads = 1;
};

/// Model parametrization used by the optimizer and the oracle.
///
/// Layout: (polar_k, azimuth_k) for each hidden state, then K-1
/// hyperspherical angles giving the weights
///   w_0 = cos^2 a_0, w_1 = sin^2 a_0 cos^2 a_1, ..., w_{K-1} = prod sin^2 a_j.
/// Hidden state k answers with response string k mod 2^N.
class AngleModel {
 public:
  AngleModel(std::size_t hidden_states, std::size_t n_settings)
      : k_(hidden_states), n_settings_(n_settings) {
    if (k_ == 0) throw std::invalid_argument("AngleModel: need at least one hidden state");
  }

  std::size_t hidden_states() const { return k_; }
  std::size_t n_settings() const { return n_settings_; }
  std::size_t dimension() const { return 3 * k_ - 1; }
  std::uint32_t string_of(std::size_t k) const {
    return static_cast<std::uint32_t>(k % (std::size_t{1} << n_settings_));
  }

  void weights(std::span<const double> p, std::span<double> out) const {
    double rest = 1.0;
    for (std::size_t k = 0; k + 1 < k_; ++k) {
      const double c = std::cos(p[2 * k_ + k]);
      out[k] = rest * c * c;
      rest -= out[k];
      rest = std::max(rest, 0.0);
    }
    out[k_ - 1] = rest;
  }

  static Vec3 bloch(double polar, double azimuth) {
    return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
  }

  /// Materializes the parameters as an ensemble; weights at or below
  /// 1e-15 are dropped.
  DeterministicEnsemble ensemble(std::span<const double> p) const {
    std::vector<double> w(k_);
    weights(p, w);
    double total = 0.0;
    for (std::size_t k = 0; k < k_; ++k)
      if (w[k] > kPruneWeight) total += w[k];
    std::vector<HiddenEntry> entries;
    std::vector<std::uint32_t> strings;
    for (std::size_t k = 0; k < k_; ++k) {
      if (w[k] <= kPruneWeight) continue;
      entries.push_back({w[k] / total, QubitState(bloch(p[2 * k], p[2 * k + 1]))});
      strings.push_back(string_of(k));
    }
    return DeterministicEnsemble::from_strings(std::move(entries), strings, n_settings_);
  }

 private:
  std::size_t k_;
  std::size_t n_settings_;
};

/// Bloch-form evaluator of the gaps v_i for an AngleModel:
/// Tr[test |r><r|] = (1 + r.t) / 2.
class GapEvaluator {
 public:
  GapEvaluator(const DeltaProblem& problem, AngleModel model) : model_(model), qm_(problem.qm) {
    problem.scenario.validate();
    if (problem.scenario.settings.size() != model.n_settings())
      throw std::invalid_argument("GapEvaluator: setting count mismatch");
    for (const auto& t : problem.scenario.tests) tests_.push_back({t.setting, t.outcome, t.projector.bloch()});
    weights_.resize(model.hidden_states());
    contrib_.resize(model.hidden_states() * tests_.size());
    for (std::size_t k = 0; k < model.hidden_states(); ++k)
      for (std::size_t i = 0; i < tests_.size(); ++i)
        contrib_[k * tests_.size() + i] =
            DeterministicEnsemble::answer_bit(model.string_of(k), tests_[i].setting, model.n_settings()) ==
            tests_[i].outcome;
  }

  const AngleModel& model() const { return model_; }
  std::size_t n_tests() const { return tests_.size(); }

  /// Writes v_i = |P^LHS_i - P^QM_i| into gaps. Not thread-safe (scratch
  /// storage); copy the evaluator per thread.
  void gaps(std::span<const double> p, std::span<double> out) {
    model_.weights(p, weights_);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < model_.hidden_states(); ++k) {
      const Vec3 r = AngleModel::bloch(p[2 * k], p[2 * k + 1]);
      for (std::size_t i = 0; i < tests_.size(); ++i)
        if (contrib_[k * tests_.size() + i]) out[i] += weights_[k] * 0.5 * (1.0 + r.dot(tests_[i].bloch));
    }
    for (std::size_t i = 0; i < tests_.size(); ++i) out[i] = std::abs(out[i] - qm_[i]);
  }

 private:
  struct Test {
    std::size_t setting;
    int outcome;
    Vec3 bloch;
  };
  AngleModel model_;
  std::vector<double> qm_;
  std::vector<Test> tests_;
  std::vector<double> weights_;
  std::vector<char> contrib_;
};

/// F_n = sum_i v_i^n
inline double power_sum(std::span<const double> v, int n) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, n);
  return s;
}

/// (sum_i v_i^n)^(1/n), scaled by the maximum to avoid underflow.
inline double ln_norm(std::span<const double> v, int n) {
  const double m = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (m <= 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(x / m, n);
  return m * std::pow(s, 1.0 / n);
}

inline double max_gap(std::span<const double> v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

/// F_n for angle parameters against a problem's QM probabilities.
inline double objective_fn(std::span<const double> params, const DeltaProblem& problem, int n,
                           std::size_t hidden_states = 0) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("objective_fn: n must be even and >= 2");
  const std::size_t ns = problem.scenario.settings.size();
  GapEvaluator eval(problem, AngleModel(hidden_states ? hidden_states : (std::size_t{1} << ns), ns));
  if (params.size() != eval.model().dimension())
    throw std::invalid_argument("objective_fn: wrong parameter count");
  std::vector<double> v(eval.n_tests());
  eval.gaps(params, v);
  return power_sum(v, n);
}

struct DeltaReport {
  double theta = 0.0;
  std::string family;
  double delta = 0.0;
  double smoothed = 0.0;  // (F_n)^(1/n) at the minimizer
  HiddenStateEnsemble optimal_model;
  std::vector<double> parameters;
  int n_exponent = 0;
  int restarts = 0;
  std::vector<double> per_test_gaps;
  std::optional<double> oracle_delta;
  double wall_time = 0.0;
  bool converged = false;
};

struct SteeringVerdict {
  double delta = 0.0;
  double epsilon = 0.0;
  bool steerable_detectable = false;
};

/// Steering is detectable at experimental precision epsilon when Delta > epsilon.
inline SteeringVerdict make_verdict(double delta, double epsilon) { return {delta, epsilon, delta > epsilon}; }

namespace detail {

inline std::vector<double> random_angles(const AngleModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(model.dimension());
  for (std::size_t k = 0; k < model.hidden_states(); ++k) {
    p[2 * k] = std::acos(2.0 * u(rng) - 1.0);
    p[2 * k + 1] = 2.0 * std::numbers::pi * u(rng);
  }
  for (std::size_t j = 2 * model.hidden_states(); j < p.size(); ++j) p[j] = 0.5 * std::numbers::pi * u(rng);
  return p;
}

inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32U)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Multistart simplex minimization of the l_n relaxation.
inline DeltaReport optimize_delta(const DeltaProblem& problem, const DeltaConfig& config) {
  if (config.n_exponent < 2 || config.n_exponent % 2 != 0)
    throw std::invalid_argument("optimize_delta: n must be even and >= 2");
  if (config.restarts < 1) throw std::invalid_argument("optimize_delta: need at least one restart");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t ns = problem.scenario.settings.size();
  const AngleModel model(config.hidden_states ? config.hidden_states : (std::size_t{1} << ns), ns);
  const GapEvaluator prototype(problem, model);
  const int n = config.n_exponent;

  struct Outcome {
    std::vector<double> x;
    double exact = std::numeric_limits<double>::infinity();
    double smooth = std::numeric_limits<double>::infinity();
    bool converged = false;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(config.restarts));

  parallel_for(outcomes.size(), config.threads, [&](std::size_t r) {
    GapEvaluator eval = prototype;
    std::vector<double> v(eval.n_tests());
    auto rng = detail::stream_rng(config.seed, r);
    auto f = [&](std::span<const double> p) {
      eval.gaps(p, v);
      return ln_norm(v, n);
    };
    SimplexOptions opt;
    opt.max_evals = config.max_evals;
    opt.f_tol = config.tol;
    auto res = nelder_mead(f, detail::random_angles(model, rng), opt);
    eval.gaps(res.x, v);
    outcomes[r] = {std::move(res.x), max_gap(v), ln_norm(v, n), res.converged};
  });

  // Smallest exact gap wins; ties go to the smaller smoothed value, then
  // the lower restart index.
  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    const auto& a = outcomes[r];
    const auto& b = outcomes[best];
    if (a.exact < b.exact || (a.exact == b.exact && a.smooth < b.smooth)) best = r;
  }

  DeltaReport report;
  report.theta = problem.theta;
  report.n_exponent = n;
  report.restarts = config.restarts;
  report.parameters = outcomes[best].x;
  report.optimal_model = model.ensemble(report.parameters).model();
  // Re-evaluate through the matrix route on the materialized model so the
  // reported gaps are exactly those of the returned ensemble.
  const auto p = lhs_probabilities(report.optimal_model, problem.scenario);
  for (std::size_t i = 0; i < p.size(); ++i) report.per_test_gaps.push_back(std::abs(p[i] - problem.qm[i]));
  report.delta = max_gap(report.per_test_gaps);
  report.smoothed = outcomes[best].smooth;
  report.converged = outcomes[best].converged;
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline DeltaReport optimize_delta(double theta, Family family, const DeltaConfig& config) {
  auto report = optimize_delta(DeltaProblem::family(theta, family), config);
  report.family = to_string(family);
  return report;
}

struct OracleConfig {
  double resolution = std::numbers::pi / 64;  // lattice step for every angle
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 7;
  std::size_t hidden_states = 0;  // 0 = 2^N
};

/// Random search over an angular lattice, evaluated with the matrix-form
/// lhs_probabilities. About 60% of the samples are uniform over the
/// lattice; the rest are lattice-neighbour moves around the incumbent with
/// shrinking radius. Returns the best exact max gap, an upper bound on Delta.
inline double grid_oracle(const DeltaProblem& problem, const OracleConfig& config = {}) {
  if (!(config.resolution > 0.0)) throw std::invalid_argument("grid_oracle: resolution must be positive");
  const std::size_t ns = problem.scenario.settings.size();
  const AngleModel model(config.hidden_states ? config.hidden_states : (std::size_t{1} << ns), ns);
  const std::size_t dim = model.dimension();

  std::vector<long> limit(dim);
  for (std::size_t k = 0; k < model.hidden_states(); ++k) {
    limit[2 * k] = std::lround(std::numbers::pi / config.resolution);
    limit[2 * k + 1] = std::lround(2.0 * std::numbers::pi / config.resolution) - 1;
  }
  for (std::size_t j = 2 * model.hidden_states(); j < dim; ++j)
    limit[j] = std::lround(0.5 * std::numbers::pi / config.resolution);

  auto score = [&](const std::vector<long>& idx) {
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = static_cast<double>(idx[j]) * config.resolution;
    const auto probs = lhs_probabilities(model.ensemble(p).model(), problem.scenario);
    double worst = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) worst = std::max(worst, std::abs(probs[i] - problem.qm[i]));
    return worst;
  };

  std::mt19937_64 rng(config.seed);
  std::vector<long> idx(dim);
  // best few uniform samples, each refined on its own
  constexpr std::size_t kSeeds = 16;
  std::vector<std::pair<double, std::vector<long>>> seeds;
  const std::size_t uniform = config.samples * 6 / 10;
  for (std::size_t s = 0; s < uniform; ++s) {
    for (std::size_t j = 0; j < dim; ++j) idx[j] = std::uniform_int_distribution<long>(0, limit[j])(rng);
    const double v = score(idx);
    if (seeds.size() == kSeeds && v >= seeds.back().first) continue;
    if (seeds.size() == kSeeds) seeds.pop_back();
    seeds.emplace_back(v, idx);
    std::sort(seeds.begin(), seeds.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  }

  double best = seeds.empty() ? std::numeric_limits<double>::infinity() : seeds.front().first;
  const std::size_t per_seed = seeds.empty() ? 0 : (config.samples - uniform) / seeds.size();
  const long radii[] = {8, 4, 2, 1};
  std::bernoulli_distribution touch(3.0 / static_cast<double>(dim));
  for (auto& [seed_value, seed_idx] : seeds) {
    for (std::size_t stage = 0; stage < 4; ++stage) {
      std::uniform_int_distribution<long> step(-radii[stage], radii[stage]);
      for (std::size_t s = 0; s < per_seed / 4; ++s) {
        idx = seed_idx;
        bool moved = false;
        for (std::size_t j = 0; j < dim; ++j) {
          if (!touch(rng)) continue;
          idx[j] = std::clamp(idx[j] + step(rng), 0L, limit[j]);
          moved = true;
        }
        if (!moved) continue;
        const double v = score(idx);
        if (v < seed_value) {
          seed_value = v;
          seed_idx = idx;
        }
      }
    }
    best = std::min(best, seed_value);
  }
  return best;
}

inline double grid_oracle(double theta, Family family, const OracleConfig& config = {}) {
  return grid_oracle(DeltaProblem::family(theta, family), config);
}

/// One report per theta, in input order.
inline std::vector<DeltaReport> sweep(Family family, std::span<const double> thetas, const DeltaConfig& config,
                                      const std::optional<OracleConfig>& oracle = std::nullopt) {
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1])) throw std::invalid_argument("sweep: theta grid must be increasing");
  std::vector<DeltaReport> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    auto r = optimize_delta(theta, family, config);
    if (oracle) r.oracle_delta = grid_oracle(theta, family, *oracle);
    out.push_back(std::move(r));
  }
  return out;
}

/// Evenly spaced points on [lo, hi]; a single point yields lo.
inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out;
  if (points == 1) return {lo};
  for (std::size_t i = 0; i < points; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

struct ConvergencePoint {
  int n = 0;
  double delta = 0.0;
  double smoothed = 0.0;
  bool converged = false;
};

inline std::vector<ConvergencePoint> convergence_study(double theta, Family family, std::span<const int> n_values,
                                                       DeltaConfig config) {
  std::vector<ConvergencePoint> out;
  for (int n : n_values) {
    if (n < 20 || n > 120 || n % 2 != 0)
      throw std::invalid_argument("convergence_study: n must be an even integer in [20, 120]");
    config.n_exponent = n;
    const auto r = optimize_delta(theta, family, config);
    out.push_back({n, r.delta, r.smoothed, r.converged});
  }
  return out;
}

}  // namespace avn
