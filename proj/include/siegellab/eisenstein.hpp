#pragma once

/// @file eisenstein.hpp
/// The coprime-pair zeta series of the modular group in the half-plane
/// Re s > 1:
///
///   E(z, s) = (1/2) Σ_{gcd(c,d)=1} y^s / |cz + d|^{2s},   z = x + iy ∈ H.
///
/// Writing g_z = (1/√y)·[[x, -1], [y, 0]] (det 1), the summand is
/// ‖g_z(c,d)‖^{-2s}, so the series is a norm sum over the primitive-vector
/// orbit and the ellipse scan enumerates it. Everything here stays strictly
/// inside Re s > 1 — no analytic continuation machinery.
///
/// Truncation is honest: a partial sum over ‖g_z w‖ < a comes with
///   · a tail *model*  ĉ a^{2-2s}/(2s-2) from the measured count density
///     ĉ = N(a)/a², which is accurate to the count's fluctuations, and
///   · a rigorous tail *bracket* from the quadratic count bound
///     N(r) ≤ τ̂ (r²+1): by parts,
///     (1/2)Σ_{q ≥ a²} q^{-σ} ≤ σ τ̂ (a^{2-2σ}/(2σ-2) + a^{-2σ}/(2σ))
///                              - (1/2) N(a) a^{-2σ},
///     with τ̂ an empirically fitted constant inflated by 1.5×.
///
/// residue_probe approaches the pole at s = 1 along the real axis (inside
/// every nontangential aperture) and Richardson-extrapolates (s-1)E(z,s)
/// to s = 1; the limit is 3/π, the reciprocal hyperbolic area of the
/// modular surface. stieltjes_representation_check verifies
/// (s-1)E(z,s) = s(s-1)∫ N(g_z,R) R^{-1-2s} dR with both sides computed
/// independently and bracketed.

#include "siegellab/orbits.hpp"

#include <array>
#include <complex>
#include <cstdio>

namespace siegellab {

struct UpperHalfPoint {
  double x = 0.0;
  double y = 1.0;

  void validate() const {
    require(std::isfinite(x), "UpperHalfPoint: x must be finite");
    require(std::isfinite(y) && y > 0.0, "UpperHalfPoint: y must be positive");
  }

  /// Unimodular matrix with ‖g(c,d)‖² = |cz - d|²/y; since d ↦ -d permutes
  /// coprime pairs, norm sums over its primitive orbit equal sums of
  /// y^s/|cz+d|^{2s}.
  Mat2 matrix() const {
    validate();
    const double root_y = std::sqrt(y);
    return Mat2{x / root_y, -1.0 / root_y, root_y, 0.0};
  }
};

/// Partial sum, tail model, and rigorous tail bracket for E(z,s).
struct EisensteinValue {
  std::complex<double> s;
  double radius = 0.0;             ///< truncation: terms with ‖g_z w‖ < radius
  std::complex<double> partial;    ///< (1/2) Σ_{q < radius²} q^{-s}
  std::complex<double> tail_model; ///< ĉ radius^{2-2s}/(2s-2)
  std::complex<double> value;      ///< partial + tail_model
  double tail_upper = 0.0;         ///< rigorous bound on |E - partial|
  std::uint64_t terms = 0;         ///< coprime pairs enumerated
  double c_hat = 0.0;              ///< measured count density N(radius)/radius²
  double tau_hat = 0.0;            ///< inflated quadratic-count constant

  /// For real s the terms are positive, so E lies in this bracket.
  double bracket_low() const { return partial.real(); }
  double bracket_high() const { return partial.real() + tail_upper; }
};

namespace eisen_detail {

inline constexpr int kCheckpoints = 64;

struct ScanStats {
  std::uint64_t terms = 0;
  double c_hat = 0.0;
  double tau_hat = 0.0;
  std::vector<std::complex<double>> partials;  ///< (1/2)Σ q^{-s_k}, per s
};

/// One pass over the primitive orbit of g_z below `radius`, accumulating the
/// partial sums for every requested exponent and the count checkpoints that
/// calibrate the tail constants.
inline ScanStats scan(const UpperHalfPoint& z, double radius,
                      const std::vector<std::complex<double>>& exponents) {
  require(std::isfinite(radius) && radius > 1.0,
          "eisenstein scan: radius must exceed 1");
  for (const std::complex<double>& s : exponents)
    require(s.real() > 1.0, "eisenstein scan: need Re s > 1");

  const Mat2 g = z.matrix();
  const OrbitSpec primitive{OrbitKind::primitive, 1};
  ScanStats stats;
  stats.partials.assign(exponents.size(), {0.0, 0.0});
  std::array<std::uint64_t, kCheckpoints> buckets{};
  const double inv_step = static_cast<double>(kCheckpoints) / radius;

  scan_orbit(primitive, g, radius,
             [&](std::int64_t, std::int64_t, double q) {
               ++stats.terms;
               const double lq = std::log(q);
               for (size_t k = 0; k < exponents.size(); ++k)
                 stats.partials[k] += std::exp(-exponents[k] * lq);
               const auto idx = static_cast<size_t>(
                   std::min(static_cast<double>(kCheckpoints - 1),
                            std::sqrt(q) * inv_step));
               ++buckets[idx];
             });
  for (std::complex<double>& p : stats.partials) p *= 0.5;

  stats.c_hat = static_cast<double>(stats.terms) / (radius * radius);
  std::uint64_t cum = 0;
  double worst = 0.0;
  for (int i = 0; i < kCheckpoints; ++i) {
    cum += buckets[static_cast<size_t>(i)];
    const double r = radius * static_cast<double>(i + 1) /
                     static_cast<double>(kCheckpoints);
    worst = std::max(worst, static_cast<double>(cum) / (r * r + 1.0));
  }
  stats.tau_hat = 1.5 * worst;
  return stats;
}

inline EisensteinValue assemble(const ScanStats& stats, std::complex<double> s,
                                size_t index, double radius) {
  EisensteinValue out;
  out.s = s;
  out.radius = radius;
  out.partial = stats.partials[index];
  out.terms = stats.terms;
  out.c_hat = stats.c_hat;
  out.tau_hat = stats.tau_hat;

  const std::complex<double> two_s = 2.0 * s;
  out.tail_model =
      stats.c_hat * std::exp((2.0 - two_s) * std::log(radius)) / (two_s - 2.0);
  out.value = out.partial + out.tail_model;

  const double sigma = s.real();
  const double a_pow_shift = std::pow(radius, 2.0 - 2.0 * sigma);
  const double a_pow = std::pow(radius, -2.0 * sigma);
  const double upper =
      sigma * stats.tau_hat *
          (a_pow_shift / (2.0 * sigma - 2.0) + a_pow / (2.0 * sigma)) -
      0.5 * static_cast<double>(stats.terms) * a_pow;
  out.tail_upper = std::max(0.0, upper);
  return out;
}

/// Polynomial extrapolation of (x_k, v_k) to x = 0 (Neville's scheme — the
/// Richardson table for a general grid).
inline double extrapolate_to_zero(const std::vector<double>& xs,
                                  const std::vector<double>& vs) {
  std::vector<double> p = vs;
  const size_t n = p.size();
  for (size_t j = 1; j < n; ++j)
    for (size_t i = n - 1; i >= j; --i)
      p[i] = (xs[i - j] * p[i] - xs[i] * p[i - 1]) / (xs[i - j] - xs[i]);
  return p[n - 1];
}

}  // namespace eisen_detail

/// E(z,s) truncated at ‖g_z w‖ < radius with tail model and rigorous bracket.
/// Throws convergence_error (carrying the partial value and the bracket
/// width) when the bracket exceeds tail_tol.
inline EisensteinValue eisenstein_primitive_sum(
    const UpperHalfPoint& z, std::complex<double> s, double radius,
    double tail_tol = std::numeric_limits<double>::infinity()) {
  if (!(s.real() > 1.0))
    throw precondition_error("eisenstein_primitive_sum: need Re s > 1");
  const eisen_detail::ScanStats stats = eisen_detail::scan(z, radius, {s});
  EisensteinValue out = eisen_detail::assemble(stats, s, 0, radius);
  if (!(out.tail_upper <= tail_tol)) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "eisenstein_primitive_sum: tail bracket %.3e exceeds "
                  "tolerance %.3e at radius %.6g",
                  out.tail_upper, tail_tol, radius);
    throw convergence_error(msg, std::abs(out.value), out.tail_upper);
  }
  return out;
}

struct ResidueProbeRow {
  double s = 0.0;      ///< 1 + ε
  double value = 0.0;  ///< (s-1) E(z,s)
};

struct ResidueProbeReport {
  double sigma = 0.0;  ///< nontangential aperture the real-axis path sits in
  std::vector<ResidueProbeRow> rows;
  double extrapolant = 0.0;  ///< Richardson value at ε = 0; limit is 3/π
};

/// (s-1)E(z,s) along s = 1 + ε for a decreasing ε grid, with polynomial
/// extrapolation to the pole. All rows share one orbit scan.
inline ResidueProbeReport residue_probe(const UpperHalfPoint& z, double sigma,
                                        const std::vector<double>& eps_grid,
                                        double radius = 2000.0) {
  require(std::isfinite(sigma) && sigma > 0.0,
          "residue_probe: aperture sigma must be positive");
  require(eps_grid.size() >= 2, "residue_probe: need at least two epsilons");
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    require(std::isfinite(eps_grid[i]) && eps_grid[i] > 0.0,
            "residue_probe: epsilons must be positive");
    if (i > 0)
      require(eps_grid[i] < eps_grid[i - 1],
              "residue_probe: epsilon grid must be strictly decreasing");
  }
  std::vector<std::complex<double>> exponents;
  exponents.reserve(eps_grid.size());
  for (double eps : eps_grid) exponents.emplace_back(1.0 + eps, 0.0);
  const eisen_detail::ScanStats stats =
      eisen_detail::scan(z, radius, exponents);

  ResidueProbeReport report;
  report.sigma = sigma;
  std::vector<double> xs, vs;
  for (size_t k = 0; k < eps_grid.size(); ++k) {
    const EisensteinValue ev =
        eisen_detail::assemble(stats, exponents[k], k, radius);
    ResidueProbeRow row;
    row.s = 1.0 + eps_grid[k];
    row.value = eps_grid[k] * ev.value.real();
    report.rows.push_back(row);
    xs.push_back(eps_grid[k]);
    vs.push_back(row.value);
  }
  report.extrapolant = eisen_detail::extrapolate_to_zero(xs, vs);
  return report;
}

struct StieltjesReport {
  double lhs = 0.0;  ///< (s-1) E(z,s), tail-corrected
  double rhs = 0.0;  ///< s(s-1) ∫ N(g_z,R) R^{-1-2s} dR, tail-corrected
  double gap = 0.0;  ///< lhs - rhs
  double lhs_low = 0.0, lhs_high = 0.0;  ///< rigorous bracket for the lhs
  double rhs_low = 0.0, rhs_high = 0.0;  ///< rigorous bracket for the rhs
  bool brackets_overlap = false;
};

/// Verify (s-1)E(z,s) = s(s-1) ∫_{R₀}^{∞} N(g_z,R) R^{-1-2s} dR. The
/// integral is exact piecewise below R_max (N is a step function) plus a
/// bracketed tail; the lhs is evaluated at its own, strictly larger radius
/// so the two sides share no truncation artifacts.
inline StieltjesReport stieltjes_representation_check(const UpperHalfPoint& z,
                                                      double s, double R_max) {
  require(s > 1.0, "stieltjes_representation_check: need s > 1");
  require(std::isfinite(R_max) && R_max > 0.0,
          "stieltjes_representation_check: need R_max > 0");

  const double lhs_radius = std::max(2.0 * R_max, 600.0);
  const EisensteinValue ev =
      eisenstein_primitive_sum(z, {s, 0.0}, lhs_radius);

  StieltjesReport report;
  report.lhs = (s - 1.0) * ev.value.real();
  report.lhs_low = (s - 1.0) * ev.bracket_low();
  report.lhs_high = (s - 1.0) * ev.bracket_high();

  // Jump radii of N(g_z, ·) below R_max.
  std::vector<double> qs;
  scan_orbit(OrbitSpec{OrbitKind::primitive, 1}, z.matrix(), R_max,
             [&](std::int64_t, std::int64_t, double q) { qs.push_back(q); });
  std::sort(qs.begin(), qs.end());

  const double two_s = 2.0 * s;
  double pieces = 0.0;
  std::uint64_t count = 0;
  for (size_t i = 0; i < qs.size();) {
    size_t j = i;
    while (j < qs.size() && qs[j] == qs[i]) ++j;
    count += j - i;
    const double r_lo = std::sqrt(qs[i]);
    const double r_hi = (j < qs.size()) ? std::sqrt(qs[j]) : R_max;
    pieces += static_cast<double>(count) *
              (std::pow(r_lo, -two_s) - std::pow(r_hi, -two_s)) / two_s;
    i = j;
  }
  const double front = s * (s - 1.0);
  const double r_pow_shift = std::pow(R_max, 2.0 - two_s);
  const double r_pow = std::pow(R_max, -two_s);
  const double tail_model = ev.c_hat * r_pow_shift / (two_s - 2.0);
  const double tail_lower = static_cast<double>(count) * r_pow / two_s;
  const double tail_upper =
      ev.tau_hat * (r_pow_shift / (two_s - 2.0) + r_pow / two_s);

  report.rhs = front * (pieces + tail_model);
  report.rhs_low = front * (pieces + tail_lower);
  report.rhs_high = front * (pieces + tail_upper);
  report.gap = report.lhs - report.rhs;
  report.brackets_overlap =
      std::max(report.lhs_low, report.rhs_low) <=
      std::min(report.lhs_high, report.rhs_high);
  return report;
}

}  // namespace siegellab
