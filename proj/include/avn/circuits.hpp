// Ideal-gate simulation of the logical-qubit preparation circuits.
//
// Qubit 0 is the most significant bit of the basis index (A for the
// two- and three-qubit registers used here).
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "avn/quantum_core.hpp"

namespace avn::circuits {

using StateVector = Eigen::VectorXcd;

/// U_theta = [[cos, sin], [sin, -cos]]
inline Mat2 u_theta(double theta) {
  Mat2 m;
  m << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
  return m;
}

inline Mat2 hadamard() {
  Mat2 m;
  m << 1.0, 1.0, 1.0, -1.0;
  return m / std::numbers::sqrt2;
}

struct UTheta {
  double theta;
  std::size_t qubit;
};
struct Hadamard {
  std::size_t qubit;
};
struct Cnot {
  std::size_t control;
  std::size_t target;
};

using Gate = std::variant<UTheta, Hadamard, Cnot>;

class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits) : n_(n_qubits) {
    if (n_ != 2 && n_ != 3) throw std::invalid_argument("Circuit: only 2 or 3 qubits are supported");
  }

  Circuit& add(Gate g) {
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, Cnot>) {
            check(op.control);
            check(op.target);
            if (op.control == op.target) throw std::invalid_argument("Circuit: CNOT control equals target");
          } else {
            check(op.qubit);
          }
        },
        g);
    gates_.push_back(g);
    return *this;
  }

  std::size_t n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }

 private:
  void check(std::size_t q) const {
    if (q >= n_) throw std::invalid_argument("Circuit: qubit index out of range");
  }
  std::size_t n_;
  std::vector<Gate> gates_;
};

namespace detail {

inline std::size_t bit_of(std::size_t n, std::size_t qubit) { return std::size_t{1} << (n - 1 - qubit); }

inline void apply_1q(StateVector& psi, std::size_t n, std::size_t qubit, const Mat2& u) {
  const std::size_t mask = bit_of(n, qubit);
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i) {
    if (i & mask) continue;
    const cplx a = psi(static_cast<Eigen::Index>(i)), b = psi(static_cast<Eigen::Index>(i | mask));
    psi(static_cast<Eigen::Index>(i)) = u(0, 0) * a + u(0, 1) * b;
    psi(static_cast<Eigen::Index>(i | mask)) = u(1, 0) * a + u(1, 1) * b;
  }
}

inline void apply_cnot(StateVector& psi, std::size_t n, std::size_t control, std::size_t target) {
  const std::size_t cm = bit_of(n, control), tm = bit_of(n, target);
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i)
    if ((i & cm) && !(i & tm)) std::swap(psi(static_cast<Eigen::Index>(i)), psi(static_cast<Eigen::Index>(i | tm)));
}

}  // namespace detail

/// Applies the gates in order to the computational basis state given as a
/// bit string, e.g. "000".
inline StateVector simulate(const Circuit& circuit, const std::string& initial) {
  const std::size_t n = circuit.n_qubits();
  if (initial.size() != n || initial.find_first_not_of("01") != std::string::npos)
    throw std::invalid_argument("simulate: initial label must be a bit string of circuit width");
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
  psi(static_cast<Eigen::Index>(std::stoul(initial, nullptr, 2))) = 1.0;
  for (const auto& g : circuit.gates()) {
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, UTheta>) detail::apply_1q(psi, n, op.qubit, u_theta(op.theta));
          if constexpr (std::is_same_v<T, Hadamard>) detail::apply_1q(psi, n, op.qubit, hadamard());
          if constexpr (std::is_same_v<T, Cnot>) detail::apply_cnot(psi, n, op.control, op.target);
        },
        g);
  }
  return psi;
}

/// U_theta on A, then CNOT(A -> B).
inline Circuit pure_preparation(double theta) {
  Circuit c(2);
  c.add(UTheta{theta, 0}).add(Cnot{0, 1});
  return c;
}

/// H on A, U_theta on C, CNOT(A -> B), CNOT(C -> B).
inline Circuit mixed_preparation(double theta) {
  Circuit c(3);
  c.add(Hadamard{0}).add(UTheta{theta, 2}).add(Cnot{0, 1}).add(Cnot{2, 1});
  return c;
}

/// Partial trace over the last qubit of a normalized three-qubit vector.
inline TwoQubitState trace_out_ancilla(const StateVector& psi) {
  if (psi.size() != 8) throw std::invalid_argument("trace_out_ancilla: expected 8 amplitudes");
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-12) throw std::invalid_argument("trace_out_ancilla: state not normalized");
  Mat4 rho = Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int c = 0; c < 2; ++c) rho(i, j) += psi(2 * i + c) * std::conj(psi(2 * j + c));
  return TwoQubitState(rho);
}

struct BobTests {
  QubitState zero, one, psi_perp, phi_perp;
};

/// |0>, |1>, |psi_perp> = sin|0> - cos|1>, |phi_perp> = sin|0> + cos|1>.
/// Throws if U_{+theta}|1> and U_{-theta}|1> fail to reproduce the latter
/// two up to global phase.
inline BobTests bob_test_states(double theta) {
  require_theta(theta);
  const double c = std::cos(theta), s = std::sin(theta);
  const Vec2 psi_perp(s, -c), phi_perp(s, c);
  const Vec2 via_plus = u_theta(theta) * ket1();
  const Vec2 via_minus = u_theta(-theta) * ket1();
  // |<a|b>| = 1 for unit kets equal up to phase
  if (std::abs(std::abs(psi_perp.dot(via_plus)) - 1.0) > 1e-12 ||
      std::abs(std::abs(phi_perp.dot(via_minus)) - 1.0) > 1e-12)
    throw std::logic_error("bob_test_states: U_theta construction disagrees with the target kets");
  return {QubitState::from_ket(ket0()), QubitState::from_ket(ket1()), QubitState::from_ket(psi_perp),
          QubitState::from_ket(phi_perp)};
}

}  // namespace avn::circuits
