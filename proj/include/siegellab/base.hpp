#pragma once

/// @file base.hpp
/// Shared plumbing for the siegellab library: error taxonomy, small fixed and
/// dynamic matrices, a reproducible random stream, seed splitting, and the
/// tiny numeric helpers (integer division with floor/ceil semantics, FNV
/// hashing, least-squares line fits) that the analysis modules lean on.
///
/// Everything here is deterministic and allocation-light; the random stream
/// is bit-exact across platforms because it composes the standard-specified
/// mt19937_64 engine with hand-rolled output transforms (the standard
/// library's distribution objects are implementation-defined and would break
/// seed-pinned tests when the toolchain changes).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace siegellab {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// Violated precondition or domain restriction (maps to CLI exit code 2).
class precondition_error : public std::domain_error {
 public:
  explicit precondition_error(const std::string& what)
      : std::domain_error(what) {}
};

/// A query would exceed the exact-arithmetic or memory safety bounds
/// (maps to CLI exit code 2 as well; it is a refusal, not a wrong answer).
class size_error : public std::length_error {
 public:
  explicit size_error(const std::string& what) : std::length_error(what) {}
};

/// An iterative evaluation ran out of budget before reaching tolerance.
/// Carries the last estimate and its error bound so callers can decide
/// whether the partial result is still useful (the CLI writes it and exits 3).
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double estimate,
                    double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw precondition_error(message);
}

// ---------------------------------------------------------------------------
// Planar vectors and 2x2 matrices
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Row-major 2x2 real matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 diagonal(double p, double q) { return {p, 0.0, 0.0, q}; }
  static Mat2 rotation(double theta) {
    const double co = std::cos(theta), si = std::sin(theta);
    return {co, -si, si, co};
  }

  double det() const { return a * d - b * c; }

  Mat2 inverse() const {
    const double dt = det();
    require(std::abs(dt) > 1e-300, "Mat2::inverse: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }

  Vec2 apply(Vec2 w) const { return {a * w.x + b * w.y, c * w.x + d * w.y}; }

  Mat2 mul(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }

  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

  /// Exact spectral norm (largest singular value) of a 2x2 matrix.
  double opnorm() const {
    // Eigenvalues of M^T M via trace/determinant.
    const double t = a * a + b * b + c * c + d * d;
    const double dt = det();
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * dt * dt));
    return std::sqrt(0.5 * (t + disc));
  }
};

// ---------------------------------------------------------------------------
// Small dense NxN matrix (only used at the API boundary where the measure
// algebra accepts general dimensions; all hot loops run on Mat2).
// ---------------------------------------------------------------------------

class MatN {
 public:
  MatN() : n_(0) {}
  explicit MatN(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
    require(n >= 1, "MatN: dimension must be >= 1");
  }
  MatN(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
    require(n >= 1 && a_.size() == static_cast<size_t>(n) * n,
            "MatN: entry count must be n*n");
  }
  static MatN identity(int n) {
    MatN m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static MatN from(const Mat2& g) {
    return MatN(2, {g.a, g.b, g.c, g.d});
  }

  int n() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  Mat2 as_mat2() const {
    require(n_ == 2, "MatN: not a 2x2 matrix");
    return {a_[0], a_[1], a_[2], a_[3]};
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == n_, "MatN::apply: dimension mismatch");
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  MatN mul(const MatN& o) const {
    require(n_ == o.n_, "MatN::mul: dimension mismatch");
    MatN r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        const double s = (*this)(i, k);
        if (s == 0.0) continue;
        for (int j = 0; j < n_; ++j) r(i, j) += s * o(k, j);
      }
    return r;
  }

  /// Determinant by LU with partial pivoting.
  double det() const {
    MatN lu = *this;
    double sign = 1.0;
    for (int k = 0; k < n_; ++k) {
      int piv = k;
      for (int i = k + 1; i < n_; ++i)
        if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
      if (lu(piv, k) == 0.0) return 0.0;
      if (piv != k) {
        for (int j = 0; j < n_; ++j) std::swap(lu(piv, j), lu(k, j));
        sign = -sign;
      }
      for (int i = k + 1; i < n_; ++i) {
        const double f = lu(i, k) / lu(k, k);
        lu(i, k) = f;
        for (int j = k + 1; j < n_; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
    double d = sign;
    for (int k = 0; k < n_; ++k) d *= lu(k, k);
    return d;
  }

  /// Inverse by Gauss-Jordan with partial pivoting.
  MatN inverse() const {
    MatN a = *this;
    MatN inv = MatN::identity(n_);
    for (int k = 0; k < n_; ++k) {
      int piv = k;
      for (int i = k + 1; i < n_; ++i)
        if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
      require(std::abs(a(piv, k)) > 1e-300, "MatN::inverse: singular matrix");
      if (piv != k)
        for (int j = 0; j < n_; ++j) {
          std::swap(a(piv, j), a(k, j));
          std::swap(inv(piv, j), inv(k, j));
        }
      const double p = a(k, k);
      for (int j = 0; j < n_; ++j) {
        a(k, j) /= p;
        inv(k, j) /= p;
      }
      for (int i = 0; i < n_; ++i) {
        if (i == k) continue;
        const double f = a(i, k);
        if (f == 0.0) continue;
        for (int j = 0; j < n_; ++j) {
          a(i, j) -= f * a(k, j);
          inv(i, j) -= f * inv(k, j);
        }
      }
    }
    return inv;
  }

  /// Frobenius norm: a cheap upper bound for the spectral norm, used only to
  /// size enumeration regions conservatively (never to decide membership).
  double frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

 private:
  int n_;
  std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// Reproducible randomness
// ---------------------------------------------------------------------------

/// splitmix64 scrambler; used to derive independent per-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (0x632be59bd9b4e019ull * (stream + 1)));
}

/// Deterministic random stream: mt19937_64 (bit-exact by the standard) with
/// explicit output transforms. One normal deviate per call (no cached spare),
/// so the consumed-bits count per call is fixed and replayable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double unit_pos() { return 1.0 - unit(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(unit_pos()));
    return r * std::cos(2.0 * std::numbers::pi * unit());
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Integer helpers
// ---------------------------------------------------------------------------

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

/// FNV-1a 64-bit hash; stable across platforms, used for config provenance.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Least-squares line fit (used by decay-exponent and growth-constant fits)
// ---------------------------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2,
          "fit_line: need at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  require(std::abs(denom) > 1e-300, "fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace siegellab
