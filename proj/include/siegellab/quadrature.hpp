#pragma once

/// @file quadrature.hpp
/// Adaptive one-dimensional integration: panels are evaluated with the
/// embedded 7-point Gauss / 15-point Kronrod pair (the Gauss nodes are
/// Legendre nodes; the Kronrod extension gives a per-panel error estimate),
/// and the panel with the largest estimated error is bisected until the
/// requested tolerance or the panel budget is reached.
///
/// The budget is a hard cap: exhausting it with the tolerance unmet throws
/// convergence_error carrying the last estimate, so callers can still report
/// a partial result.

#include <cstdio>
#include <queue>
#include <utility>

#include "siegellab/base.hpp"

namespace siegellab {

/// Tolerances and panel budget for the adaptive integrator. One instance is
/// threaded through every recursive evaluation level unchanged.
struct QuadratureConfig {
  int panel_count = 512;   ///< max panels per one-dimensional integral
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;

  void validate() const {
    require(panel_count >= 8, "QuadratureConfig: panel_count must be >= 8");
    require(abs_tol > 0.0 && rel_tol > 0.0,
            "QuadratureConfig: tolerances must be positive");
  }
};

struct IntegrationResult {
  double value = 0.0;
  double error_bound = 0.0;
  int panels = 0;
};

namespace quad_detail {

// Abscissae of the 15-point Kronrod rule on [-1, 1] (positive half; the rule
// is symmetric). Odd indices are the embedded 7-point Gauss-Legendre nodes.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};

inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

// Weights of the embedded 7-point Gauss rule, matching kXgk[1,3,5] and the
// center node kXgk[7].
inline constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

template <class F>
inline void gauss_kronrod_15(const F& f, double a, double b, double* value,
                             double* error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(mid - half * kXgk[i]);
    fv[14 - i] = f(mid + half * kXgk[i]);
  }
  fv[7] = f(mid);

  double kronrod = kWgk[7] * fv[7];
  for (int i = 0; i < 7; ++i) kronrod += kWgk[i] * (fv[i] + fv[14 - i]);

  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 3; ++i)
    gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

  *value = kronrod * half;
  *error = std::abs(kronrod - gauss) * half;
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace quad_detail

/// Integrate f over [a, b]. Throws convergence_error (with the running
/// estimate attached) if the panel budget is exhausted above tolerance.
template <class F>
IntegrationResult integrate(const F& f, double a, double b,
                            const QuadratureConfig& cfg) {
  cfg.validate();
  if (a == b) return {0.0, 0.0, 0};
  using quad_detail::Panel;

  Panel root{a, b, 0.0, 0.0};
  quad_detail::gauss_kronrod_15(f, a, b, &root.value, &root.error);

  std::priority_queue<Panel> heap;
  heap.push(root);
  double total_value = root.value;
  double total_error = root.error;
  int panels = 1;

  auto tolerance = [&] {
    return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total_value));
  };

  while (total_error > tolerance() && panels < cfg.panel_count) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left{worst.a, mid, 0.0, 0.0};
    Panel right{mid, worst.b, 0.0, 0.0};
    quad_detail::gauss_kronrod_15(f, left.a, left.b, &left.value, &left.error);
    quad_detail::gauss_kronrod_15(f, right.a, right.b, &right.value,
                                  &right.error);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  if (total_error > tolerance()) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "integrate: %d panels exhausted, error %.3e above tolerance "
                  "%.3e",
                  panels, total_error, tolerance());
    throw convergence_error(msg, total_value, total_error);
  }
  return {total_value, total_error, panels};
}

}  // namespace siegellab
