// Dense one- and two-qubit state algebra.
//
// Basis ordering is |00>,|01>,|10>,|11> with Alice as the most significant
// qubit. |0> is the +1 eigenstate of sigma_z.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace avn {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec2 = Eigen::Vector2cd;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kStateTol = 1e-12;

namespace pauli {
inline Mat2 identity() { return Mat2::Identity(); }
inline Mat2 x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
inline Mat2 y() {
  Mat2 m;
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}
inline Mat2 z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
/// r . sigma
inline Mat2 dot(const Vec3& r) { return r.x() * x() + r.y() * y() + r.z() * z(); }
}  // namespace pauli

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

inline bool is_hermitian(const auto& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Smallest eigenvalue of a Hermitian matrix.
template <typename M>
double min_eigenvalue(const M& m) {
  Eigen::SelfAdjointEigenSolver<M> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// A single-qubit state stored as its Bloch vector.
class QubitState {
 public:
  QubitState() = default;

  explicit QubitState(const Vec3& bloch) : bloch_(bloch) {
    if (!bloch.allFinite() || bloch.norm() > 1.0 + kStateTol)
      throw std::invalid_argument("QubitState: Bloch vector outside the unit ball");
  }

  /// Pure state from polar/azimuthal Bloch angles.
  static QubitState from_angles(double polar, double azimuth) {
    return QubitState(Vec3(std::sin(polar) * std::cos(azimuth),
                           std::sin(polar) * std::sin(azimuth), std::cos(polar)));
  }

  /// Pure state |v><v| from a (not necessarily normalized) ket.
  static QubitState from_ket(const Vec2& ket) {
    const double n2 = ket.squaredNorm();
    if (n2 == 0.0) throw std::invalid_argument("QubitState: zero ket");
    return from_matrix(ket * ket.adjoint() / n2);
  }

  /// Inverse of matrix(): r_k = Tr[rho sigma_k].
  static QubitState from_matrix(const Mat2& rho) {
    if (!is_hermitian(rho, kStateTol) || std::abs(rho.trace() - 1.0) > kStateTol)
      throw std::invalid_argument("QubitState: matrix is not a unit-trace Hermitian operator");
    return QubitState(Vec3((rho * pauli::x()).trace().real(), (rho * pauli::y()).trace().real(),
                           (rho * pauli::z()).trace().real()));
  }

  const Vec3& bloch() const { return bloch_; }
  double purity_radius() const { return bloch_.norm(); }
  bool is_pure(double tol = 1e-12) const { return std::abs(bloch_.norm() - 1.0) <= tol; }

  /// (1 + r.sigma) / 2
  Mat2 matrix() const { return 0.5 * (Mat2::Identity() + pauli::dot(bloch_)); }

 private:
  Vec3 bloch_ = Vec3::Zero();
};

inline Vec2 ket0() { return Vec2(1.0, 0.0); }
inline Vec2 ket1() { return Vec2(0.0, 1.0); }

/// Alice's projective measurement along a unit axis; outcome a projects on
/// (1 + (-1)^a n.sigma) / 2.
class MeasurementSetting {
 public:
  MeasurementSetting(const Vec3& axis, std::string label) : axis_(axis), label_(std::move(label)) {
    if (std::abs(axis.norm() - 1.0) > kStateTol)
      throw std::invalid_argument("MeasurementSetting: axis must be a unit vector");
  }

  static MeasurementSetting z() { return {Vec3(0, 0, 1), "z"}; }
  static MeasurementSetting x() { return {Vec3(1, 0, 0), "x"}; }

  const Vec3& axis() const { return axis_; }
  const std::string& label() const { return label_; }

  Mat2 projector(int outcome) const {
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const double sign = outcome == 0 ? 1.0 : -1.0;
    return 0.5 * (Mat2::Identity() + sign * pauli::dot(axis_));
  }

 private:
  Vec3 axis_;
  std::string label_;
};

/// Bob's post-measurement state with its trace kept as the outcome weight.
class UnnormalizedQubitState {
 public:
  UnnormalizedQubitState() = default;
  explicit UnnormalizedQubitState(const Mat2& m) : matrix_(m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!is_hermitian(m, kStateTol * scale))
      throw std::invalid_argument("UnnormalizedQubitState: not Hermitian");
    if (min_eigenvalue(Mat2(0.5 * (m + m.adjoint()))) < -kStateTol * scale)
      throw std::invalid_argument("UnnormalizedQubitState: not positive semidefinite");
  }

  const Mat2& matrix() const { return matrix_; }
  double norm() const { return matrix_.trace().real(); }

  /// Normalized state; undefined for zero norm.
  QubitState normalized() const {
    if (norm() <= 0.0) throw std::domain_error("cannot normalize a zero-weight conditional state");
    return QubitState::from_matrix(matrix_ / norm());
  }

  /// P * r, i.e. the Bloch vector scaled by the weight; defined for zero weight.
  Vec3 weighted_bloch() const {
    return Vec3((matrix_ * pauli::x()).trace().real(), (matrix_ * pauli::y()).trace().real(),
                (matrix_ * pauli::z()).trace().real());
  }

 private:
  Mat2 matrix_ = Mat2::Zero();
};

/// Two-qubit density operator, validated on construction.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Mat4& m) : matrix_(m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!m.allFinite()) throw std::invalid_argument("TwoQubitState: non-finite entries");
    if (!is_hermitian(m, kStateTol * scale))
      throw std::invalid_argument("TwoQubitState: not Hermitian");
    if (std::abs(m.trace() - 1.0) > kStateTol)
      throw std::invalid_argument("TwoQubitState: trace differs from 1");
    if (min_eigenvalue(Mat4(0.5 * (m + m.adjoint()))) < -kStateTol * scale)
      throw std::invalid_argument("TwoQubitState: negative eigenvalue");
  }

  static TwoQubitState from_ket(const Vec4& ket) {
    const double n2 = ket.squaredNorm();
    if (n2 == 0.0) throw std::invalid_argument("TwoQubitState: zero ket");
    return TwoQubitState(ket * ket.adjoint() / n2);
  }

  const Mat4& matrix() const { return matrix_; }

  Mat2 reduced_bob() const {
    Mat2 out = Mat2::Zero();
    for (int a = 0; a < 2; ++a) out += matrix_.block<2, 2>(2 * a, 2 * a);
    return out;
  }

  Mat2 reduced_alice() const {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out(i, j) = matrix_.block<2, 2>(2 * i, 2 * j).trace();
    return out;
  }

 private:
  Mat4 matrix_;
};

namespace bell {
inline Vec4 psi_plus() { return Vec4(1.0, 0.0, 0.0, 1.0) / std::numbers::sqrt2; }
inline Vec4 phi_plus() { return Vec4(0.0, 1.0, 1.0, 0.0) / std::numbers::sqrt2; }
}  // namespace bell

inline void require_theta(double theta) {
  if (!(theta >= -1e-15 && theta <= std::numbers::pi / 2 + 1e-15))
    throw std::invalid_argument("theta must lie in [0, pi/2]");
}

/// cos(theta)|00> + sin(theta)|11>
inline TwoQubitState make_pure_family(double theta) {
  require_theta(theta);
  return TwoQubitState::from_ket(Vec4(std::cos(theta), 0.0, 0.0, std::sin(theta)));
}

/// cos^2(theta)|psi+><psi+| + sin^2(theta)|phi+><phi+|
/// (|psi+> = (|00>+|11>)/sqrt2, |phi+> = (|01>+|10>)/sqrt2)
inline TwoQubitState make_mixed_family(double theta) {
  require_theta(theta);
  const Vec4 a = bell::psi_plus();
  const Vec4 b = bell::phi_plus();
  const double c = std::cos(theta), s = std::sin(theta);
  return TwoQubitState(c * c * a * a.adjoint() + s * s * b * b.adjoint());
}

/// V|psi+><psi+| + (1 - V) 1/4
inline TwoQubitState make_werner(double visibility) {
  if (!(visibility >= -1.0 / 3.0 - 1e-15 && visibility <= 1.0 + 1e-15))
    throw std::invalid_argument("Werner visibility must lie in [-1/3, 1]");
  const Vec4 a = bell::psi_plus();
  return TwoQubitState(visibility * a * a.adjoint() + (1.0 - visibility) * Mat4::Identity() / 4.0);
}

/// Tr_A[(P_a (x) 1) rho]
inline UnnormalizedQubitState conditional_state(const TwoQubitState& state,
                                                const MeasurementSetting& setting, int outcome) {
  const Mat4 op = kron(setting.projector(outcome), Mat2::Identity()) * state.matrix();
  Mat2 out = Mat2::Zero();
  for (int a = 0; a < 2; ++a) out += op.block<2, 2>(2 * a, 2 * a);
  // Hermitize away rounding so the PSD check sees a Hermitian matrix.
  return UnnormalizedQubitState(0.5 * (out + out.adjoint()));
}

/// Tr[test * state] for a pure test state.
inline double project_probability(const UnnormalizedQubitState& state, const QubitState& test) {
  if (!test.is_pure(1e-9)) throw std::invalid_argument("project_probability: test state must be pure");
  return (test.matrix() * state.matrix()).trace().real();
}

}  // namespace avn
