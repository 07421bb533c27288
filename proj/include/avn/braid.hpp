// Braid words in the three-Fibonacci-anyon representation and search for
// words approximating single-qubit targets.
//
// The logical qubit is the two-dimensional total-charge-tau block; the
// noncomputational state lives in a different charge sector and is never
// mixed in by braiding, so it does not appear here.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "avn/quantum_core.hpp"

namespace avn::braid {

/// sigma_1 or sigma_2, possibly inverted.
struct Generator {
  int index = 1;  // 1 exchanges anyons 1,2; 2 exchanges anyons 2,3
  bool inverse = false;

  /// Letter code 0..3 in the order s1, s1inv, s2, s2inv.
  int code() const { return 2 * (index - 1) + (inverse ? 1 : 0); }
  static Generator from_code(int c) { return {c / 2 + 1, (c % 2) == 1}; }
  Generator inverted() const { return {index, !inverse}; }
  bool cancels(const Generator& o) const { return index == o.index && inverse != o.inverse; }

  std::string text() const { return "s" + std::to_string(index) + (inverse ? "inv" : ""); }

  static Generator parse(const std::string& s) {
    if (s == "s1") return {1, false};
    if (s == "s1inv") return {1, true};
    if (s == "s2") return {2, false};
    if (s == "s2inv") return {2, true};
    throw std::invalid_argument("unknown braid letter '" + s + "'");
  }

  friend bool operator==(const Generator&, const Generator&) = default;
};

/// tau = (sqrt5 - 1) / 2, the inverse golden ratio.
inline double tau() { return (std::sqrt(5.0) - 1.0) / 2.0; }

/// F = [[tau, sqrt(tau)], [sqrt(tau), -tau]]; F is real symmetric and F^2 = 1.
inline Mat2 fusion_matrix() {
  const double t = tau();
  Mat2 f;
  f << t, std::sqrt(t), std::sqrt(t), -t;
  return f;
}

struct Representation {
  Mat2 sigma1;
  Mat2 sigma2;
};

/// sigma_1 = diag(e^{-4 pi i/5}, e^{3 pi i/5}), sigma_2 = F sigma_1 F.
inline const Representation& fibonacci_rep() {
  static const Representation rep = [] {
    Mat2 s1 = Mat2::Zero();
    s1(0, 0) = std::polar(1.0, -4.0 * std::numbers::pi / 5.0);
    s1(1, 1) = std::polar(1.0, 3.0 * std::numbers::pi / 5.0);
    const Mat2 f = fusion_matrix();
    return Representation{s1, f * s1 * f};
  }();
  return rep;
}

inline const std::array<Mat2, 4>& letter_matrices() {
  static const std::array<Mat2, 4> m = [] {
    const auto& rep = fibonacci_rep();
    return std::array<Mat2, 4>{rep.sigma1, rep.sigma1.adjoint(), rep.sigma2, rep.sigma2.adjoint()};
  }();
  return m;
}

inline Mat2 matrix_of(const Generator& g) { return letter_matrices()[static_cast<std::size_t>(g.code())]; }

/// A word with its cached representation matrix M(w_1) M(w_2) ... M(w_k).
class BraidWord {
 public:
  BraidWord() : matrix_(Mat2::Identity()) {}
  explicit BraidWord(std::vector<Generator> letters) : letters_(std::move(letters)), matrix_(product(letters_)) {}

  static BraidWord parse(const std::string& text) {
    std::istringstream in(text);
    std::vector<Generator> letters;
    for (std::string tok; in >> tok;) letters.push_back(Generator::parse(tok));
    return BraidWord(std::move(letters));
  }

  const std::vector<Generator>& letters() const { return letters_; }
  const Mat2& matrix() const { return matrix_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  /// Cancels adjacent letter-inverse pairs until none remain.
  BraidWord normalized() const {
    std::vector<Generator> out;
    for (const auto& g : letters_) {
      if (!out.empty() && out.back().cancels(g))
        out.pop_back();
      else
        out.push_back(g);
    }
    return BraidWord(std::move(out));
  }

  bool is_reduced() const {
    for (std::size_t i = 1; i < letters_.size(); ++i)
      if (letters_[i - 1].cancels(letters_[i])) return false;
    return true;
  }

  BraidWord operator*(const BraidWord& rhs) const {
    auto letters = letters_;
    letters.insert(letters.end(), rhs.letters_.begin(), rhs.letters_.end());
    return BraidWord(std::move(letters));
  }

  std::string text() const {
    std::string out;
    for (const auto& g : letters_) {
      if (!out.empty()) out += ' ';
      out += g.text();
    }
    return out;
  }

  static Mat2 product(const std::vector<Generator>& letters) {
    Mat2 m = Mat2::Identity();
    for (const auto& g : letters) m = m * matrix_of(g);
    return m;
  }

 private:
  std::vector<Generator> letters_;
  Mat2 matrix_;
};

inline Mat2 evaluate(const BraidWord& word) { return BraidWord::product(word.letters()); }

/// U_theta = [[cos, sin], [sin, -cos]]
struct GateTarget {
  double theta = 0.0;
  Mat2 matrix;

  explicit GateTarget(double t) : theta(t) {
    matrix << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
  }
};

enum class PhaseMode { projective, strict };

/// Largest singular value of a 2x2 matrix, i.e. the square root of the
/// largest eigenvalue of A^dagger A.
inline double spectral_norm(const Mat2& a) {
  const Mat2 h = a.adjoint() * a;
  const double p = h(0, 0).real(), q = h(1, 1).real();
  const double b2 = std::norm(h(0, 1));
  const double disc = std::sqrt(std::max(0.0, 0.25 * (p - q) * (p - q) + b2));
  return std::sqrt(std::max(0.0, 0.5 * (p + q) + disc));
}

inline bool is_unitary(const Mat2& m, double tol = 1e-9) {
  return (m.adjoint() * m - Mat2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

namespace detail {

/// min over phi of ||e^{i phi} m - t|| for unitary m, t. With t^dagger m =
/// e^{i a} (cos b + i sin b n.sigma) the result is 2 sin(b/2), b folded into
/// [0, pi/2]. atan2 keeps it accurate near the identity.
inline double projective_unitary_distance(const Mat2& m, const Mat2& t) {
  const Mat2 w = t.adjoint() * m;
  const Mat2 v = w / std::sqrt(w.determinant());
  const cplx half = 0.5 * v.trace();
  const double s = (v - half * Mat2::Identity()).norm() / std::numbers::sqrt2;
  const double b = std::atan2(s, std::abs(half.real()));
  return 2.0 * std::sin(b / 2.0);
}

/// Golden-section refinement over the phase for non-unitary inputs.
inline double projective_general_distance(const Mat2& m, const Mat2& t) {
  auto f = [&](double phi) { return spectral_norm(std::polar(1.0, phi) * m - t); };
  constexpr int kCoarse = 720;
  double best_phi = 0.0, best = f(0.0);
  for (int i = 1; i < kCoarse; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / kCoarse;
    const double v = f(phi);
    if (v < best) {
      best = v;
      best_phi = phi;
    }
  }
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_phi - 2.0 * std::numbers::pi / kCoarse, hi = best_phi + 2.0 * std::numbers::pi / kCoarse;
  for (int it = 0; it < 100; ++it) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (f(x1) < f(x2))
      hi = x2;
    else
      lo = x1;
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

}  // namespace detail

/// Spectral-norm distance ||m - target||. In projective mode the distance is
/// additionally minimized over a global phase on m.
inline double distance(const Mat2& m, const Mat2& target, PhaseMode mode = PhaseMode::projective) {
  if (mode == PhaseMode::strict) return spectral_norm(m - target);
  if (is_unitary(m) && is_unitary(target)) return detail::projective_unitary_distance(m, target);
  return detail::projective_general_distance(m, target);
}

struct SearchResult {
  BraidWord word;
  double distance = std::numeric_limits<double>::infinity();         // in the search mode
  double distance_projective = std::numeric_limits<double>::infinity();
  double distance_strict = std::numeric_limits<double>::infinity();
  std::size_t half_length = 0;  // meet-in-the-middle only: half length actually used
  bool fell_back = false;       // meet-in-the-middle only: memory budget forced a smaller half
};

namespace detail {

inline constexpr double kTieEps = 1e-13;

/// Ordering: smaller distance, then shorter word, then lexicographic codes.
inline bool better(double d, const std::vector<int>& codes, double best_d, const std::vector<int>& best_codes) {
  if (d < best_d - kTieEps) return true;
  if (d > best_d + kTieEps) return false;
  if (codes.size() != best_codes.size()) return codes.size() < best_codes.size();
  return codes < best_codes;
}

inline BraidWord word_from_codes(const std::vector<int>& codes) {
  std::vector<Generator> letters;
  for (int c : codes) letters.push_back(Generator::from_code(c));
  return BraidWord(std::move(letters));
}

inline SearchResult finish(const std::vector<int>& codes, const Mat2& target, PhaseMode mode) {
  SearchResult r;
  r.word = word_from_codes(codes);
  r.distance_projective = distance(r.word.matrix(), target, PhaseMode::projective);
  r.distance_strict = distance(r.word.matrix(), target, PhaseMode::strict);
  r.distance = mode == PhaseMode::projective ? r.distance_projective : r.distance_strict;
  return r;
}

/// Depth-first enumeration of freely reduced words up to max_length,
/// visiting every word once with its prefix product.
template <typename Visit>
void enumerate_reduced(std::size_t max_length, Visit&& visit) {
  const auto& letters = letter_matrices();
  std::vector<int> codes;
  std::vector<Mat2> prefix{Mat2::Identity()};
  codes.reserve(max_length);
  prefix.reserve(max_length + 1);
  visit(codes, prefix.back());
  std::function<void()> rec = [&] {
    if (codes.size() == max_length) return;
    for (int c = 0; c < 4; ++c) {
      if (!codes.empty() && (codes.back() ^ 1) == c) continue;  // free reduction
      codes.push_back(c);
      prefix.push_back(prefix.back() * letters[static_cast<std::size_t>(c)]);
      visit(codes, prefix.back());
      rec();
      prefix.pop_back();
      codes.pop_back();
    }
  };
  rec();
}

}  // namespace detail

/// Exhaustive search over freely reduced words of length <= max_length.
inline SearchResult brute_force_search(const GateTarget& target, std::size_t max_length,
                                       PhaseMode mode = PhaseMode::projective) {
  if (max_length > 22) throw std::invalid_argument("brute_force_search: max_length too large to enumerate");
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<int> best_codes;
  detail::enumerate_reduced(max_length, [&](const std::vector<int>& codes, const Mat2& m) {
    const double d = distance(m, target.matrix, mode);
    if (detail::better(d, codes, best_d, best_codes)) {
      best_d = d;
      best_codes = codes;
    }
  });
  return detail::finish(best_codes, target.matrix, mode);
}

/// Number of freely reduced words of length <= h: 1 + 4 (3^h - 1) / 2.
inline std::size_t reduced_word_count(std::size_t h) {
  std::size_t pow3 = 1;
  for (std::size_t i = 0; i < h; ++i) pow3 *= 3;
  return 1 + 2 * (pow3 - 1);
}

struct MitmOptions {
  double bucket_tol = 1e-2;
  std::size_t memory_budget = std::size_t{1} << 30;  // bytes
  std::size_t exhaustive_pairs = 50'000'000;  // below this, compare all pairs
  std::function<void(const std::string&)> warn;
};

namespace detail {

/// Unit quaternion of m / sqrt(det m), sign-fixed so that the first nonzero
/// component is positive. Two words with equal quaternions are equal up to
/// global phase.
inline std::array<double, 4> projective_quaternion(const Mat2& m) {
  const Mat2 u = m / std::sqrt(m.determinant());
  // u = q0 1 - i (q1 sx + q2 sy + q3 sz)
  std::array<double, 4> q{0.5 * (u(0, 0) + u(1, 1)).real(), -0.5 * (u(0, 1) + u(1, 0)).imag(),
                          0.5 * (u(1, 0) - u(0, 1)).real(), -0.5 * (u(0, 0) - u(1, 1)).imag()};
  for (double c : q) {
    if (std::abs(c) < 1e-12) continue;
    if (c < 0)
      for (double& x : q) x = -x;
    break;
  }
  return q;
}

struct CellKey {
  std::int32_t c[4];
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : k.c) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct HalfEntry {
  std::vector<int> codes;
  Mat2 matrix;
};

}  // namespace detail

/// Meet-in-the-middle search over words L R with |L|, |R| <= half_length.
///
/// Left halves are bucketed by projective quaternion on a grid of cell size
/// bucket_tol. For every right half R the quaternion of target R^dagger is
/// looked up in the neighbouring cells (both signs) and each candidate pair
/// is re-checked with the exact distance. Cells double until the best pair
/// lies within one cell. Small tables compare all pairs.
inline SearchResult mitm_search(const GateTarget& target, std::size_t half_length, const MitmOptions& options = {},
                                PhaseMode mode = PhaseMode::projective) {
  if (!(options.bucket_tol > 0.0)) throw std::invalid_argument("mitm_search: bucket_tol must be positive");
  SearchResult fallback_info;
  std::size_t h = half_length;
  // rough per-entry footprint: codes vector + matrix + hash node
  constexpr std::size_t kEntryBytes = 160;
  while (h > 0 && reduced_word_count(h) * kEntryBytes > options.memory_budget) {
    --h;
    fallback_info.fell_back = true;
  }
  if (fallback_info.fell_back && options.warn)
    options.warn("mitm_search: memory budget exceeded, half length reduced to " + std::to_string(h));

  std::vector<detail::HalfEntry> table;
  table.reserve(reduced_word_count(h));
  detail::enumerate_reduced(h, [&](const std::vector<int>& codes, const Mat2& m) { table.push_back({codes, m}); });

  double best_d = std::numeric_limits<double>::infinity();
  std::vector<int> best_codes;
  std::vector<int> joined;

  auto consider = [&](const detail::HalfEntry& left, const detail::HalfEntry& right) {
    // Skip pairs whose junction cancels; the reduced word is covered elsewhere.
    if (!left.codes.empty() && !right.codes.empty() && (left.codes.back() ^ 1) == right.codes.front()) return;
    const double d = distance(left.matrix * right.matrix, target.matrix, mode);
    if (d > best_d + detail::kTieEps) return;
    joined = left.codes;
    joined.insert(joined.end(), right.codes.begin(), right.codes.end());
    if (detail::better(d, joined, best_d, best_codes)) {
      best_d = d;
      best_codes = joined;
    }
  };

  if (table.size() * table.size() <= options.exhaustive_pairs) {
    for (const auto& l : table)
      for (const auto& r : table) consider(l, r);
  } else {
    // Half-words alone (empty right half) are always candidates.
    const detail::HalfEntry empty{{}, Mat2::Identity()};
    for (const auto& l : table) consider(l, empty);

    // A pair within one cell of the target is always visited. If the best
    // pair is farther than that, widen the cells and search again.
    for (double cell = options.bucket_tol;; cell *= 2.0) {
      auto key_of = [&](const std::array<double, 4>& q) {
        detail::CellKey k{};
        for (int i = 0; i < 4; ++i)
          k.c[i] = static_cast<std::int32_t>(std::floor(q[static_cast<std::size_t>(i)] / cell));
        return k;
      };
      std::unordered_map<detail::CellKey, std::vector<std::uint32_t>, detail::CellHash> buckets;
      buckets.reserve(table.size());
      for (std::uint32_t i = 0; i < table.size(); ++i)
        buckets[key_of(detail::projective_quaternion(table[i].matrix))].push_back(i);

      for (const auto& r : table) {
        const auto q = detail::projective_quaternion(target.matrix * r.matrix.adjoint());
        for (double sign : {1.0, -1.0}) {
          std::array<double, 4> qs{sign * q[0], sign * q[1], sign * q[2], sign * q[3]};
          const auto base = key_of(qs);
          detail::CellKey k{};
          for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
              for (int c = -1; c <= 1; ++c)
                for (int d = -1; d <= 1; ++d) {
                  k.c[0] = base.c[0] + a;
                  k.c[1] = base.c[1] + b;
                  k.c[2] = base.c[2] + c;
                  k.c[3] = base.c[3] + d;
                  const auto it = buckets.find(k);
                  if (it == buckets.end()) continue;
                  for (auto li : it->second) consider(table[li], r);
                }
        }
      }
      if (best_d < cell || cell >= 2.0) break;
    }
  }
  auto result = detail::finish(best_codes, target.matrix, mode);
  result.half_length = h;
  result.fell_back = fallback_info.fell_back;
  return result;
}

}  // namespace avn::braid
