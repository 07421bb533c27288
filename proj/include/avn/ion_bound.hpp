// Delta for candidate models of an imperfect Bell pair.
//
// The experimentally reported pair is characterized only by its fidelity
// with |psi+>, so several density matrices are plausible. Each candidate is
// probed with the tests matching its own family.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "avn/delta.hpp"

namespace avn {

inline constexpr double kReportedIonDelta = 0.0732;
inline constexpr double kReportedIonFidelity = 0.993;

struct IonCandidate {
  std::string model;
  double parameter = 0.0;  // visibility or theta
  double fidelity = 0.0;   // <psi+| rho |psi+>
  DeltaReport report;
};

inline double bell_fidelity(const TwoQubitState& s) {
  const Vec4 b = bell::psi_plus();
  return (b.adjoint() * s.matrix() * b)(0, 0).real();
}

/// Werner state at visibility V probed with the maximally entangled tests.
inline IonCandidate werner_candidate(double visibility, const DeltaConfig& config) {
  const auto state = make_werner(visibility);
  const double theta = std::numbers::pi / 4;
  auto report = optimize_delta(DeltaProblem::from_state(state, pure_family_scenario(theta), theta), config);
  report.family = "werner";
  return {"werner", visibility, bell_fidelity(state), std::move(report)};
}

/// Werner, pure-family and Bell-diagonal candidates, each at the given
/// fidelity with |psi+>.
inline std::vector<IonCandidate> fidelity_candidates(double fidelity, const DeltaConfig& config) {
  if (!(fidelity > 0.5 && fidelity <= 1.0)) throw std::invalid_argument("fidelity must lie in (1/2, 1]");
  std::vector<IonCandidate> out;
  out.push_back(werner_candidate((4.0 * fidelity - 1.0) / 3.0, config));
  out.back().model = "werner-fidelity-matched";

  // (cos t + sin t)^2 / 2 = F  =>  sin 2t = 2F - 1, taking t <= pi/4
  const double t_pure = 0.5 * std::asin(2.0 * fidelity - 1.0);
  auto pure = optimize_delta(t_pure, Family::pure, config);
  out.push_back({"pure-family", t_pure, bell_fidelity(make_pure_family(t_pure)), std::move(pure)});

  // cos^2 t = F
  const double t_mixed = std::acos(std::sqrt(fidelity));
  auto mixed = optimize_delta(t_mixed, Family::mixed, config);
  out.push_back({"mixed-family", t_mixed, bell_fidelity(make_mixed_family(t_mixed)), std::move(mixed)});
  return out;
}

}  // namespace avn
