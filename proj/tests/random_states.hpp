// Hand-rolled generators for property tests.
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "avn/lhs.hpp"
#include "avn/quantum_core.hpp"

namespace testing_support {

using namespace avn;

inline Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v;
  do v = Vec3(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-8);
  return v.normalized();
}

inline QubitState random_pure(std::mt19937_64& rng) { return QubitState(random_direction(rng)); }

/// Uniform in the Bloch ball.
inline QubitState random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return QubitState(std::cbrt(u(rng)) * random_direction(rng));
}

inline MeasurementSetting random_setting(std::mt19937_64& rng) { return {random_direction(rng), "rand"}; }

/// Ginibre-distributed density matrix.
inline TwoQubitState random_two_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat4 rho = a * a.adjoint();
  rho /= rho.trace();
  return TwoQubitState(0.5 * (rho + rho.adjoint()));
}

inline Mat2 random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  const Vec3 n = random_direction(rng);
  const double angle = u(rng);
  return std::cos(angle / 2) * Mat2::Identity() - cplx(0, 1) * std::sin(angle / 2) * pauli::dot(n);
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = e(rng) + 1e-6);
  for (auto& x : w) x /= total;
  return w;
}

/// Random stochastic model with mixed or pure hidden states and a mix of
/// deterministic and fractional responses.
inline HiddenStateEnsemble random_stochastic_model(std::mt19937_64& rng, std::size_t k, std::size_t n_settings) {
  const auto w = random_weights(rng, k);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<HiddenEntry> entries;
  for (std::size_t i = 0; i < k; ++i) entries.push_back({w[i], u(rng) < 0.5 ? random_pure(rng) : random_qubit(rng)});
  std::vector<std::vector<double>> response(n_settings, std::vector<double>(k));
  for (auto& row : response)
    for (auto& p : row) {
      const double r = u(rng);
      p = r < 0.2 ? 0.0 : r < 0.4 ? 1.0 : u(rng);
    }
  return {std::move(entries), std::move(response)};
}

inline DeterministicEnsemble random_deterministic_model(std::mt19937_64& rng, std::size_t k, std::size_t n_settings,
                                                        bool pure = false) {
  const auto w = random_weights(rng, k);
  std::uniform_int_distribution<std::uint32_t> bits(0, (1U << n_settings) - 1);
  std::vector<HiddenEntry> entries;
  std::vector<std::uint32_t> strings;
  for (std::size_t i = 0; i < k; ++i) {
    entries.push_back({w[i], pure ? random_pure(rng) : random_qubit(rng)});
    strings.push_back(bits(rng));
  }
  return DeterministicEnsemble::from_strings(std::move(entries), strings, n_settings);
}

}  // namespace testing_support

namespace testing_support {

/// A separable state sum_j p_j |n_j><n_j| (x) sigma_j together with the LHS
/// model it induces for the given settings: hidden state sigma_j, weight
/// p_j and response p(0|s, j) = (1 + n_j . axis_s) / 2.
struct SeparableCase {
  TwoQubitState state;
  HiddenStateEnsemble model;
};

inline SeparableCase random_separable(std::mt19937_64& rng, std::size_t terms,
                                      const std::vector<MeasurementSetting>& settings) {
  const auto w = random_weights(rng, terms);
  Mat4 rho = Mat4::Zero();
  std::vector<HiddenEntry> entries;
  std::vector<std::vector<double>> response(settings.size(), std::vector<double>(terms));
  for (std::size_t j = 0; j < terms; ++j) {
    const QubitState alice = random_pure(rng);
    const QubitState bob = random_qubit(rng);
    rho += w[j] * kron(alice.matrix(), bob.matrix());
    entries.push_back({w[j], bob});
    for (std::size_t s = 0; s < settings.size(); ++s)
      response[s][j] = std::clamp(0.5 * (1.0 + alice.bloch().dot(settings[s].axis())), 0.0, 1.0);
  }
  return {TwoQubitState(0.5 * (rho + rho.adjoint())), HiddenStateEnsemble(std::move(entries), std::move(response))};
}

}  // namespace testing_support
