#pragma once

/// @file identity.hpp
/// The basic counting identity relating an even atomic measure ν tested
/// against the orthogonal-average function F_N to a weighted radial integral
/// of its growth function.
///
/// For a probe scaling a = diag(a_1 > … > a_N) with det a = 1,
///
///   lhs(ν, a) = Σ_{0 < ‖x‖ < 1/a_N} ν{x} · F_N(‖x‖·a)
///   rhs(ν, a) = (2σ_{N-1}/σ_N) ∫₀¹ N_ν(τ/a_N) (τ/a_N)^{-N} (1-τ²)^{(N-3)/2} dτ
///
/// where N_ν(r) = ν(B(0,r)) and σ_k is the area of S^{k-1}. Both sides are
/// finite sums/integrals once ‖x‖ ≥ 1/a_N is cut off (F_N vanishes there),
/// and they agree in the limit of eccentric probes: the error decays like a
/// power of the aspect ratio a_N/a_{N-1}. error_decay_fit measures that
/// power on the geodesic family a(t) = diag(e^t, e^{-t}).
///
/// N = 2 admits an exact rhs: the integrand between atom radii is
/// cum_k · τ^{-2}(1-τ²)^{-1/2} · a_2², with antiderivative
/// G(τ) = -sqrt(1-τ²)/τ, so the integral telescopes over the jumps of N_ν.
/// N ≥ 3 integrates each inter-atom piece adaptively.

#include "siegellab/measures.hpp"
#include "siegellab/spherical.hpp"

namespace siegellab {

/// A unimodular diagonal probe, eccentric enough for the identity regime:
/// det a = 1 (within 1e-12) and a_N/a_{N-1} < 1/4.
struct IdentityProbe {
  DiagonalScaling a;

  explicit IdentityProbe(DiagonalScaling scaling) : a(std::move(scaling)) {
    double det = 1.0;
    for (double e : a.entries()) det *= e;
    require(std::abs(det - 1.0) <= 1e-12,
            "IdentityProbe: product of entries must be 1");
    const int n = a.n();
    require(a[n - 1] / a[n - 2] < 0.25,
            "IdentityProbe: need a_N/a_{N-1} < 1/4");
  }

  /// The geodesic family diag(e^t, e^{-t}); aspect ratio e^{-2t}.
  static IdentityProbe geodesic(double t) {
    require(std::isfinite(t) && t > std::log(2.0),
            "IdentityProbe::geodesic: need t > log 2 for aspect < 1/4");
    return IdentityProbe(DiagonalScaling({std::exp(t), std::exp(-t)}));
  }

  double aspect_ratio() const { return a[a.n() - 1] / a[a.n() - 2]; }
};

namespace identity_detail {

struct GrowthStep {
  double radius;  ///< atom radius (ascending)
  double cum;     ///< total ν-mass strictly inside this radius is the PREVIOUS cum
};

/// Jumps of N_ν below `cutoff`: ascending radii with cumulative mass AFTER
/// each jump. N_ν(r) for r in (radius_k, radius_{k+1}] equals cum_k.
inline std::vector<GrowthStep> growth_steps(const AtomicMeasure& nu,
                                            double cutoff) {
  std::vector<GrowthStep> steps;
  double cum = 0.0;
  nu.visit_profile(cutoff, [&](double norm, double weight) {
    cum += weight;
    steps.push_back({norm, cum});
  });
  return steps;
}

inline double g_antiderivative(double tau) {
  return -std::sqrt(std::max(0.0, 1.0 - tau * tau)) / tau;
}

}  // namespace identity_detail

/// Σ ν{x} F_N(‖x‖ a) over 0 < ‖x‖ < 1/a_N (all other atoms contribute 0).
inline double identity_lhs(const AtomicMeasure& nu, const IdentityProbe& probe,
                           const QuadratureConfig& cfg = {}) {
  require(nu.dim() == probe.a.n(), "identity_lhs: dimension mismatch");
  require(nu.even(), "identity_lhs: measure must be even");
  const double cutoff = 1.0 / probe.a.back();
  double total = 0.0;
  nu.visit_profile(cutoff, [&](double norm, double weight) {
    total += weight * fN(probe.a.scaled(norm), cfg);
  });
  return total;
}

/// (2σ_{N-1}/σ_N) ∫₀¹ N_ν(τ/a_N)(τ/a_N)^{-N}(1-τ²)^{(N-3)/2} dτ, exact for
/// N = 2 (telescoping antiderivative), adaptive per inter-atom piece for
/// N ≥ 3.
inline double identity_rhs(const AtomicMeasure& nu, const IdentityProbe& probe,
                           const QuadratureConfig& cfg = {}) {
  require(nu.dim() == probe.a.n(), "identity_rhs: dimension mismatch");
  require(nu.even(), "identity_rhs: measure must be even");
  const int n = nu.dim();
  const double a_last = probe.a.back();
  const double cutoff = 1.0 / a_last;
  const std::vector<identity_detail::GrowthStep> steps =
      identity_detail::growth_steps(nu, cutoff);
  if (steps.empty()) return 0.0;

  const double front = 2.0 * sphere_area(n - 1) / sphere_area(n);
  double total = 0.0;
  for (size_t k = 0; k < steps.size(); ++k) {
    const double cum = steps[k].cum;
    const double tau_lo = std::min(1.0, a_last * steps[k].radius);
    const double tau_hi = (k + 1 < steps.size())
                              ? std::min(1.0, a_last * steps[k + 1].radius)
                              : 1.0;
    if (!(tau_hi > tau_lo)) continue;
    if (n == 2) {
      total += cum * (identity_detail::g_antiderivative(tau_hi) -
                      identity_detail::g_antiderivative(tau_lo));
    } else {
      const double half_exp = 0.5 * (n - 3);
      const IntegrationResult piece = integrate(
          [&](double tau) {
            const double shrink = 1.0 - tau * tau;
            const double weight =
                (half_exp == 0.0) ? 1.0
                                  : std::pow(std::max(0.0, shrink), half_exp);
            return std::pow(tau, -n) * weight;
          },
          tau_lo, tau_hi, cfg);
      total += cum * piece.value;
    }
  }
  const double scale = std::pow(a_last, n);  // (τ/a_N)^{-N} = a_N^N τ^{-N}
  return front * scale * total;
}

struct IdentityRow {
  double t = 0.0;          ///< geodesic parameter
  double ratio = 0.0;      ///< probe aspect ratio a_N/a_{N-1} = e^{-2t}
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_error = 0.0;  ///< |lhs - rhs|
};

/// Both sides of the identity along the geodesic probe family.
inline std::vector<IdentityRow> identity_error_table(
    const AtomicMeasure& nu, const std::vector<double>& t_grid,
    const QuadratureConfig& cfg = {}) {
  require(nu.dim() == 2, "identity_error_table: geodesic probes are 2-d");
  require(!t_grid.empty(), "identity_error_table: empty t grid");
  std::vector<IdentityRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const IdentityProbe probe = IdentityProbe::geodesic(t);
    IdentityRow row;
    row.t = t;
    row.ratio = probe.aspect_ratio();
    row.lhs = identity_lhs(nu, probe, cfg);
    row.rhs = identity_rhs(nu, probe, cfg);
    row.abs_error = std::abs(row.lhs - row.rhs);
    rows.push_back(row);
  }
  return rows;
}

struct DecayFit {
  double slope = 0.0;      ///< d log(error) / d log(ratio)
  double intercept = 0.0;  ///< log(error) at log(ratio) = 0
  std::vector<double> residuals;
};

/// Least-squares fit of log |lhs-rhs| against log aspect-ratio over the
/// geodesic family. Rows with exactly zero error carry no log information
/// and are dropped; fewer than two usable rows yields slope = +inf (the
/// error has already hit the floor — decay unmeasurably fast).
inline DecayFit error_decay_fit(const AtomicMeasure& nu,
                                const std::vector<double>& t_grid,
                                const QuadratureConfig& cfg = {}) {
  const std::vector<IdentityRow> rows = identity_error_table(nu, t_grid, cfg);
  std::vector<double> xs, ys;
  for (const IdentityRow& row : rows) {
    if (row.abs_error <= 0.0) continue;
    xs.push_back(std::log(row.ratio));
    ys.push_back(std::log(row.abs_error));
  }
  DecayFit out;
  if (xs.size() < 2) {
    out.slope = std::numeric_limits<double>::infinity();
    out.intercept = 0.0;
    return out;
  }
  const LineFit fit = fit_line(xs, ys);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.residuals.reserve(xs.size());
  for (size_t i = 0; i < xs.size(); ++i)
    out.residuals.push_back(ys[i] - (fit.slope * xs[i] + fit.intercept));
  return out;
}

}  // namespace siegellab
