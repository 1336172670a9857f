#pragma once

/// @file random_lattices.hpp
/// Haar-random unimodular planar lattices and Monte Carlo verification of the
/// mean-value identities for lattice sums:
///
///   E[ Σ_{v ∈ L, v≠0} ψ(v) ]        = ∫ψ dm          (all nonzero vectors)
///   E[ Σ_{v ∈ L primitive} ψ(v) ]   = ∫ψ dm / ζ(2)   (primitive vectors)
///
/// together with the L¹ convergence of the normalized counting function
/// N_L(R)/R² to π.
///
/// Sampling: a point (x, y) of the classical fundamental domain
/// {|x| ≤ 1/2, x² + y² ≥ 1} under dx dy/y², drawn by rejection on x
/// (marginal density ∝ (1-x²)^{-1/2}) and inverse-CDF on y, plus an
/// independent uniform rotation angle. Exact i.i.d. draws — no MCMC — so
/// reported standard errors are honest.

#include "siegellab/orbits.hpp"

#include <cstdlib>
#include <thread>

namespace siegellab {

/// A covolume-1 planar lattice, carrying the fundamental-domain point and
/// fiber angle it was built from. Columns of `basis` span the lattice:
/// L = basis·Z².
///
/// The column span of rotation(θ)·(1/√y)·[[y, 0],[x, 1]] is a rotated copy of
/// the lattice Z + Z(x+iy) rescaled to covolume 1, so with (x, y)
/// hyperbolic-uniform on the fundamental domain and θ uniform the draw
/// realizes the rotation-invariant probability on covolume-1 lattices.
/// (Caution: the transposed inner factor [[y, x],[0, 1]] instead yields the
/// lattice of shape (x+i)/y, whose push-forward is a different, non-invariant
/// measure — the mean lattice-point counts come out visibly wrong.)
struct Lattice2D {
  Mat2 basis = Mat2::identity();  ///< columns span the lattice
  double x = 0.0;                 ///< fundamental-domain abscissa, |x| <= 1/2
  double y = 1.0;                 ///< fundamental-domain height, x² + y² >= 1
  double theta = 0.0;             ///< rotation fiber angle

  void validate() const {
    require(std::abs(basis.det() - 1.0) <= 1e-10,
            "Lattice2D: basis must have determinant 1 (covolume 1)");
    require(y > 0.0, "Lattice2D: y > 0");
    require(std::abs(x) <= 0.5 + 1e-12, "Lattice2D: |x| <= 1/2");
    require(x * x + y * y >= 1.0 - 1e-12, "Lattice2D: x^2 + y^2 >= 1");
  }

  /// Basis renormalized to determinant exactly 1 (up to one rounding), so it
  /// passes the stricter unimodularity gate of the counting engine.
  Mat2 unimodular_basis() const {
    const double scale = 1.0 / std::sqrt(basis.det());
    return Mat2{basis.a * scale, basis.b * scale, basis.c * scale,
                basis.d * scale};
  }
};

/// One Haar draw from the space of covolume-1 lattices (consumes a variable
/// number of rejection proposals from the stream).
inline Lattice2D sample_lattice(Rng& rng) {
  const double root3_half = std::sqrt(3.0) / 2.0;
  double x = 0.0;
  for (;;) {
    x = rng.uniform(-0.5, 0.5);
    const double accept = root3_half / std::sqrt(1.0 - x * x);
    if (rng.unit() < accept) break;
  }
  const double floor_y = std::sqrt(1.0 - x * x);
  const double u = rng.unit_pos();  // (0, 1]
  const double y = floor_y / u;
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const double root_y = std::sqrt(y);
  const Mat2 shear{y / root_y, 0.0, x / root_y, 1.0 / root_y};
  Lattice2D lattice;
  lattice.basis = Mat2::rotation(theta).mul(shear);
  lattice.x = x;
  lattice.y = y;
  lattice.theta = theta;
  return lattice;
}

/// The shortest nonzero lattice vector (image coordinates). For a reduced
/// fundamental-domain basis the minimum is attained with coefficients in
/// {-1, 0, 1}; the window below leaves generous margin.
inline Vec2 shortest_vector(const Lattice2D& lattice) {
  const Mat2 g = lattice.unimodular_basis();
  Vec2 best{0.0, 0.0};
  double best_norm2 = std::numeric_limits<double>::infinity();
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) {
      if (i == 0 && j == 0) continue;
      const Vec2 v = g.apply({static_cast<double>(i), static_cast<double>(j)});
      if (v.norm2() < best_norm2) {
        best_norm2 = v.norm2();
        best = v;
      }
    }
  return best;
}

/// Σ ψ(basis·w) over nonzero (optionally primitive) integer vectors w. The
/// sum is finite because ψ has compact support; enumeration reuses the
/// ellipse scan with g = basis.
inline double siegel_transform(const Lattice2D& lattice, const TestFunction& psi,
                               bool primitive_only) {
  lattice.validate();
  const Mat2 g = lattice.unimodular_basis();
  const double radius = psi.support_radius(2);
  const OrbitSpec spec{primitive_only ? OrbitKind::primitive
                                      : OrbitKind::full_lattice,
                       1};
  double total = 0.0;
  if (psi.radial()) {
    scan_orbit(spec, g, radius, [&](std::int64_t, std::int64_t, double q) {
      total += psi.radial_value(std::sqrt(q));
    });
  } else {
    scan_orbit(spec, g, radius, [&](std::int64_t m, std::int64_t n, double) {
      const Vec2 image =
          g.apply({static_cast<double>(m), static_cast<double>(n)});
      total += psi.value({image.x, image.y});
    });
  }
  return total;
}

struct SiegelEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  double target = 0.0;

  void validate() const {
    require(std_error >= 0.0, "SiegelEstimate: std_error >= 0");
  }
};

/// Worker-thread count for the Monte Carlo drivers (SIEGELLAB_THREADS,
/// default 1). Results never depend on it: work is cut into a fixed number
/// of seed-derived chunks reduced by a stable pairwise sum.
inline int thread_count_from_env() {
  const char* env = std::getenv("SIEGELLAB_THREADS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  const long parsed = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || parsed < 1) return 1;
  return static_cast<int>(std::min(parsed, 64L));
}

namespace lattice_detail {

inline constexpr int kChunks = 256;

/// Run fn(chunk_index, samples_in_chunk, rng) for every chunk, distributing
/// chunks over `threads` workers. Each chunk owns a seed derived from
/// (seed, chunk_index), so the sample stream is identical for every thread
/// count. Exceptions are re-thrown in chunk order.
template <class Fn>
inline void run_chunked(std::int64_t n_samples, std::uint64_t seed, int threads,
                        Fn&& fn) {
  const std::int64_t base = n_samples / kChunks;
  const std::int64_t rem = n_samples % kChunks;
  std::vector<std::exception_ptr> errors(kChunks);
  auto run_chunk = [&](int c) {
    try {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
      const std::int64_t n_c = base + (c < rem ? 1 : 0);
      fn(c, n_c, rng);
    } catch (...) {
      errors[static_cast<size_t>(c)] = std::current_exception();
    }
  };
  if (threads <= 1) {
    for (int c = 0; c < kChunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int c = t; c < kChunks; c += threads) run_chunk(c);
      });
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);
}

/// Stable pairwise sum: adjacent pairs are combined until one value remains,
/// independent of thread scheduling.
inline double pairwise_sum(std::vector<double> values) {
  if (values.empty()) return 0.0;
  while (values.size() > 1) {
    std::vector<double> next((values.size() + 1) / 2);
    for (size_t i = 0; i < next.size(); ++i) {
      const size_t a = 2 * i, b = 2 * i + 1;
      next[i] = (b < values.size()) ? values[a] + values[b] : values[a];
    }
    values = std::move(next);
  }
  return values[0];
}

}  // namespace lattice_detail

/// Monte Carlo check of the mean-value identity for ψ: the sample mean of
/// siegel_transform over Haar draws, its standard error, and the closed–form
/// target ∫ψ (full) or ∫ψ/ζ(2) (primitive).
inline SiegelEstimate verify_siegel(const TestFunction& psi, bool primitive_only,
                                    std::int64_t n_samples, std::uint64_t seed) {
  require(n_samples >= 1000, "verify_siegel: need n_samples >= 1000");
  const int threads = thread_count_from_env();
  std::vector<double> sums(lattice_detail::kChunks, 0.0);
  std::vector<double> sumsqs(lattice_detail::kChunks, 0.0);
  lattice_detail::run_chunked(
      n_samples, seed, threads, [&](int c, std::int64_t n_c, Rng& rng) {
        double s = 0.0, s2 = 0.0;
        for (std::int64_t i = 0; i < n_c; ++i) {
          const Lattice2D lattice = sample_lattice(rng);
          const double v = siegel_transform(lattice, psi, primitive_only);
          s += v;
          s2 += v * v;
        }
        sums[static_cast<size_t>(c)] = s;
        sumsqs[static_cast<size_t>(c)] = s2;
      });
  const double sum = lattice_detail::pairwise_sum(std::move(sums));
  const double sumsq = lattice_detail::pairwise_sum(std::move(sumsqs));
  SiegelEstimate est;
  est.n_samples = n_samples;
  est.mean = sum / static_cast<double>(n_samples);
  const double var =
      std::max(0.0, (sumsq - static_cast<double>(n_samples) * est.mean * est.mean) /
                        static_cast<double>(n_samples - 1));
  est.std_error = std::sqrt(var / static_cast<double>(n_samples));
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  est.target = psi.integral(2) / (primitive_only ? zeta2 : 1.0);
  return est;
}

struct GrowthDeviationRow {
  double R = 0.0;
  double mean_abs_dev = 0.0;  ///< E |N_L(R)/R² − π|
  double std_error = 0.0;
};

/// L¹ distance of the normalized counting function from its limit π, per
/// radius, over Haar-random lattices. The deviation must trend to zero as R
/// grows.
inline std::vector<GrowthDeviationRow> growth_l1_convergence(
    const std::vector<double>& r_grid, std::int64_t n_samples,
    std::uint64_t seed) {
  require(n_samples >= 1000, "growth_l1_convergence: need n_samples >= 1000");
  require(!r_grid.empty(), "growth_l1_convergence: empty R grid");
  for (double r : r_grid)
    require(std::isfinite(r) && r > 0.0,
            "growth_l1_convergence: radii must be positive");
  const size_t nr = r_grid.size();
  const int threads = thread_count_from_env();
  const OrbitSpec full{OrbitKind::full_lattice, 1};
  std::vector<std::vector<double>> sums(nr),
      sumsqs(nr);  // [radius][chunk]
  for (size_t k = 0; k < nr; ++k) {
    sums[k].assign(lattice_detail::kChunks, 0.0);
    sumsqs[k].assign(lattice_detail::kChunks, 0.0);
  }
  lattice_detail::run_chunked(
      n_samples, seed, threads, [&](int c, std::int64_t n_c, Rng& rng) {
        for (std::int64_t i = 0; i < n_c; ++i) {
          const Lattice2D lattice = sample_lattice(rng);
          const Mat2 g = lattice.unimodular_basis();
          for (size_t k = 0; k < nr; ++k) {
            const double r = r_grid[k];
            const double normalized =
                static_cast<double>(count_orbit(full, {g, r})) / (r * r);
            const double dev = std::abs(normalized - std::numbers::pi);
            sums[k][static_cast<size_t>(c)] += dev;
            sumsqs[k][static_cast<size_t>(c)] += dev * dev;
          }
        }
      });
  std::vector<GrowthDeviationRow> rows(nr);
  for (size_t k = 0; k < nr; ++k) {
    const double sum = lattice_detail::pairwise_sum(std::move(sums[k]));
    const double sumsq = lattice_detail::pairwise_sum(std::move(sumsqs[k]));
    rows[k].R = r_grid[k];
    rows[k].mean_abs_dev = sum / static_cast<double>(n_samples);
    const double var = std::max(
        0.0, (sumsq - static_cast<double>(n_samples) * rows[k].mean_abs_dev *
                          rows[k].mean_abs_dev) /
                 static_cast<double>(n_samples - 1));
    rows[k].std_error = std::sqrt(var / static_cast<double>(n_samples));
  }
  return rows;
}

}  // namespace siegellab
