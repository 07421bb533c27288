// Local-hidden-state (LHS) models: evaluation, deterministic decomposition,
// reduction to at most 2^N hidden states, and the mass-centre consistency
// equations for deterministic models.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "avn/quantum_core.hpp"

namespace avn {

inline constexpr double kPruneWeight = 1e-15;

struct HiddenEntry {
  double weight = 0.0;
  QubitState state;
};

/// Ensemble {w_k rho_k} plus the response table p(a=0 | setting, k).
///
/// response()[s][k] is the probability that Alice answers 0 for setting s
/// when the hidden state is k. The answer-1 probability is its complement.
class HiddenStateEnsemble {
 public:
  HiddenStateEnsemble() = default;

  HiddenStateEnsemble(std::vector<HiddenEntry> entries, std::vector<std::vector<double>> response)
      : entries_(std::move(entries)), response_(std::move(response)) {
    double total = 0.0;
    for (const auto& e : entries_) {
      if (!(e.weight > 0.0)) throw std::invalid_argument("HiddenStateEnsemble: weights must be positive");
      total += e.weight;
    }
    if (!entries_.empty() && std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("HiddenStateEnsemble: weights must sum to 1");
    for (const auto& row : response_) {
      if (row.size() != entries_.size())
        throw std::invalid_argument("HiddenStateEnsemble: response row length differs from entry count");
      for (double p : row)
        if (!(p >= 0.0 && p <= 1.0))
          throw std::invalid_argument("HiddenStateEnsemble: response probabilities must lie in [0,1]");
    }
  }

  const std::vector<HiddenEntry>& entries() const { return entries_; }
  const std::vector<std::vector<double>>& response() const { return response_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t n_settings() const { return response_.size(); }

  /// p(outcome | setting, entry)
  double respond(std::size_t setting, std::size_t entry, int outcome) const {
    const double p0 = response_.at(setting).at(entry);
    return outcome == 0 ? p0 : 1.0 - p0;
  }

  bool is_deterministic() const {
    for (const auto& row : response_)
      for (double p : row)
        if (p != 0.0 && p != 1.0) return false;
    return true;
  }

  /// sum_k p(a|setting,k) w_k rho_k
  Mat2 conditional(std::size_t setting, int outcome) const {
    Mat2 out = Mat2::Zero();
    for (std::size_t k = 0; k < entries_.size(); ++k)
      out += respond(setting, k, outcome) * entries_[k].weight * entries_[k].state.matrix();
    return out;
  }

 private:
  std::vector<HiddenEntry> entries_;
  std::vector<std::vector<double>> response_;
};

/// An ensemble whose responses are exactly 0 or 1.
class DeterministicEnsemble {
 public:
  explicit DeterministicEnsemble(HiddenStateEnsemble model) : model_(std::move(model)) {
    if (!model_.is_deterministic())
      throw std::invalid_argument("DeterministicEnsemble: responses must be exactly 0 or 1");
  }

  /// Builds a deterministic model from per-entry response strings. Bit i of
  /// the string (setting 0 most significant) is Alice's answer for setting i.
  static DeterministicEnsemble from_strings(std::vector<HiddenEntry> entries,
                                            const std::vector<std::uint32_t>& strings,
                                            std::size_t n_settings) {
    if (strings.size() != entries.size())
      throw std::invalid_argument("from_strings: one response string per entry required");
    std::vector<std::vector<double>> response(n_settings, std::vector<double>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k)
      for (std::size_t s = 0; s < n_settings; ++s)
        response[s][k] = answer_bit(strings[k], s, n_settings) == 0 ? 1.0 : 0.0;
    return DeterministicEnsemble(HiddenStateEnsemble(std::move(entries), std::move(response)));
  }

  const HiddenStateEnsemble& model() const { return model_; }
  std::size_t size() const { return model_.size(); }
  std::size_t n_settings() const { return model_.n_settings(); }

  /// Response string of an entry; equals m_a - 1 in 1-based indexing.
  std::uint32_t response_string(std::size_t entry) const {
    std::uint32_t m = 0;
    for (std::size_t s = 0; s < n_settings(); ++s)
      m = (m << 1U) | (model_.response()[s][entry] == 0.0 ? 1U : 0U);
    return m;
  }

  /// Whether the entry belongs to H^setting_outcome.
  bool contributes(std::size_t setting, std::size_t entry, int outcome) const {
    return model_.respond(setting, entry, outcome) == 1.0;
  }

  static int answer_bit(std::uint32_t string, std::size_t setting, std::size_t n_settings) {
    return static_cast<int>((string >> (n_settings - 1 - setting)) & 1U);
  }

 private:
  HiddenStateEnsemble model_;
};

struct SteeringTest {
  std::size_t setting = 0;
  int outcome = 0;
  QubitState projector;  // pure
};

/// Alice's settings plus Bob's projective tests, one probability per test.
struct SteeringScenario {
  std::vector<MeasurementSetting> settings;
  std::vector<SteeringTest> tests;

  void validate() const {
    for (const auto& t : tests) {
      if (t.setting >= settings.size())
        throw std::invalid_argument("SteeringScenario: test refers to an unknown setting");
      if (t.outcome != 0 && t.outcome != 1) throw std::invalid_argument("SteeringScenario: outcome must be 0 or 1");
      if (!t.projector.is_pure(1e-12))
        throw std::invalid_argument("SteeringScenario: test projector must be pure");
    }
  }
};

/// Settings {z, x}; tests |1>, |0>, |psi_perp>, |phi_perp> with
/// psi_perp = sin|0> - cos|1> and phi_perp = sin|0> + cos|1>.
inline SteeringScenario pure_family_scenario(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {{MeasurementSetting::z(), MeasurementSetting::x()},
          {{0, 0, QubitState::from_ket(ket1())},
           {0, 1, QubitState::from_ket(ket0())},
           {1, 0, QubitState::from_ket(Vec2(s, -c))},
           {1, 1, QubitState::from_ket(Vec2(s, c))}}};
}

/// Settings {z, x}; tests |1>, |0>, |->, |+>.
inline SteeringScenario mixed_family_scenario() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {{MeasurementSetting::z(), MeasurementSetting::x()},
          {{0, 0, QubitState::from_ket(ket1())},
           {0, 1, QubitState::from_ket(ket0())},
           {1, 0, QubitState::from_ket(Vec2(h, -h))},
           {1, 1, QubitState::from_ket(Vec2(h, h))}}};
}

inline std::vector<double> qm_probabilities(const TwoQubitState& state, const SteeringScenario& scenario) {
  scenario.validate();
  std::vector<double> out;
  out.reserve(scenario.tests.size());
  for (const auto& t : scenario.tests)
    out.push_back(project_probability(conditional_state(state, scenario.settings[t.setting], t.outcome),
                                      t.projector));
  return out;
}

/// P_i = Tr[test_i sum_k p(a_i|A_i,k) w_k rho_k]
inline std::vector<double> lhs_probabilities(const HiddenStateEnsemble& model,
                                             const SteeringScenario& scenario) {
  scenario.validate();
  if (model.n_settings() != scenario.settings.size())
    throw std::invalid_argument("lhs_probabilities: response table and scenario disagree on setting count");
  std::vector<double> out;
  out.reserve(scenario.tests.size());
  for (const auto& t : scenario.tests)
    out.push_back((t.projector.matrix() * model.conditional(t.setting, t.outcome)).trace().real());
  return out;
}

/// Splits every entry with a non-deterministic response into 2^N entries,
/// one per answer string, weighted by the product of its answer
/// probabilities. Weights at or below 1e-15 are dropped.
inline DeterministicEnsemble deterministic_decomposition(const HiddenStateEnsemble& model,
                                                         std::size_t n_settings) {
  if (model.n_settings() != n_settings)
    throw std::invalid_argument("deterministic_decomposition: setting count mismatch");
  if (n_settings > 20) throw std::invalid_argument("deterministic_decomposition: too many settings");
  const std::uint32_t n_strings = 1U << n_settings;

  std::vector<HiddenEntry> entries;
  std::vector<std::uint32_t> strings;
  for (std::size_t k = 0; k < model.size(); ++k) {
    bool deterministic = true;
    std::uint32_t own = 0;
    for (std::size_t s = 0; s < n_settings; ++s) {
      const double p0 = model.response()[s][k];
      deterministic = deterministic && (p0 == 0.0 || p0 == 1.0);
      own = (own << 1U) | (p0 == 0.0 ? 1U : 0U);
    }
    const auto& e = model.entries()[k];
    if (deterministic) {
      entries.push_back(e);
      strings.push_back(own);
      continue;
    }
    for (std::uint32_t m = 0; m < n_strings; ++m) {
      double w = e.weight;
      for (std::size_t s = 0; s < n_settings; ++s)
        w *= model.respond(s, k, DeterministicEnsemble::answer_bit(m, s, n_settings));
      if (w <= kPruneWeight) continue;
      entries.push_back({w, e.state});
      strings.push_back(m);
    }
  }
  // Pruning may leave the total a hair below one; renormalize within rounding.
  double total = 0.0;
  for (const auto& e : entries) total += e.weight;
  for (auto& e : entries) e.weight /= total;
  return DeterministicEnsemble::from_strings(std::move(entries), strings, n_settings);
}

/// Merges entries sharing a response string into their weighted Bloch
/// centroid. The result has at most 2^N entries, ordered by string.
inline DeterministicEnsemble reduce_to_2N(const DeterministicEnsemble& model, std::size_t n_settings) {
  if (model.n_settings() != n_settings) throw std::invalid_argument("reduce_to_2N: setting count mismatch");
  std::map<std::uint32_t, std::pair<double, Vec3>> groups;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const auto& e = model.model().entries()[k];
    auto& [w, moment] = groups.try_emplace(model.response_string(k), 0.0, Vec3::Zero()).first->second;
    w += e.weight;
    moment += e.weight * e.state.bloch();
  }
  std::vector<HiddenEntry> entries;
  std::vector<std::uint32_t> strings;
  for (const auto& [m, group] : groups) {
    Vec3 centre = group.second / group.first;
    // The centroid of unit vectors can exceed the ball by rounding only.
    if (centre.norm() > 1.0) centre /= centre.norm();
    entries.push_back({group.first, QubitState(centre)});
    strings.push_back(m);
  }
  return DeterministicEnsemble::from_strings(std::move(entries), strings, n_settings);
}

struct MassCentreResidual {
  std::size_t setting = 0;
  int outcome = 0;
  double scalar = 0.0;  // |P - sum_H w|
  double vector = 0.0;  // |P r - sum_H w r_k|
};

struct MassCentreReport {
  std::vector<MassCentreResidual> residuals;

  double max() const {
    double m = 0.0;
    for (const auto& r : residuals) m = std::max({m, r.scalar, r.vector});
    return m;
  }
};

/// Residuals of the mass-centre equations for every (setting, outcome).
inline MassCentreReport mass_center_check(const DeterministicEnsemble& model, const TwoQubitState& state,
                                          const SteeringScenario& scenario) {
  if (model.n_settings() != scenario.settings.size())
    throw std::invalid_argument("mass_center_check: setting count mismatch");
  MassCentreReport report;
  for (std::size_t s = 0; s < scenario.settings.size(); ++s) {
    for (int a = 0; a < 2; ++a) {
      const auto cond = conditional_state(state, scenario.settings[s], a);
      double mass = 0.0;
      Vec3 moment = Vec3::Zero();
      for (std::size_t k = 0; k < model.size(); ++k) {
        if (!model.contributes(s, k, a)) continue;
        const auto& e = model.model().entries()[k];
        mass += e.weight;
        moment += e.weight * e.state.bloch();
      }
      report.residuals.push_back(
          {s, a, std::abs(cond.norm() - mass), (cond.weighted_bloch() - moment).norm()});
    }
  }
  return report;
}

/// Largest entrywise deviation between the model's conditional states and
/// the state's conditional states over every (setting, outcome).
inline double conditional_state_mismatch(const HiddenStateEnsemble& model, const TwoQubitState& state,
                                         const SteeringScenario& scenario) {
  if (model.n_settings() != scenario.settings.size())
    throw std::invalid_argument("conditional_state_mismatch: setting count mismatch");
  double worst = 0.0;
  for (std::size_t s = 0; s < scenario.settings.size(); ++s)
    for (int a = 0; a < 2; ++a)
      worst = std::max(worst, (model.conditional(s, a) - conditional_state(state, scenario.settings[s], a).matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
  return worst;
}

}  // namespace avn
