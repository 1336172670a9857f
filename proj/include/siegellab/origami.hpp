#pragma once

/// @file origami.hpp
/// Square-tiled translation surfaces as permutation pairs, their cylinder
/// decompositions in rational directions, and the holonomy point sets those
/// cylinders generate.
///
/// An origami is n unit squares with right-neighbor gluing h and top-neighbor
/// gluing v (transitive, so the surface is connected). The straight-line flow
/// in any primitive rational direction is completely periodic: the surface
/// splits into maximal cylinders, each carrying a symmetric pair ±w of
/// holonomy vectors. Collecting ±w over all directions, filtered by a lower
/// bound s on the cylinder's area fraction, yields an even atomic measure
/// whose ball counts grow quadratically with a step-function dependence on s.
///
/// Generator action on pairs (the linear SL(2,Z) action re-expressed on the
/// gluing data; the convention is pinned by the equivariance tests against
/// direct flow tracing):
///
///   R = [[1,1],[0,1]] : (h, v) -> (h, v∘h⁻¹)
///   L = [[1,0],[1,1]] : (h, v) -> (h∘v⁻¹, v)
///   S = [[0,-1],[1,0]]: (h, v) -> (v⁻¹, h)
///
/// direction_cylinders reduces (p,q) to (1,0) by a subtractive Euclidean word
/// in R⁻ᵏ and S, applies the same word to the pair, reads off horizontal
/// cylinders, and maps holonomies back (the word sends (p,q) to (1,0), so its
/// inverse sends the horizontal holonomy c·(1,0) to c·(p,q)).

#include "siegellab/measures.hpp"

#include <cctype>
#include <sstream>
#include <string>

namespace siegellab {

/// Permutations are 0-based image tables: f[i] is the image of i.
using Perm = std::vector<int>;

inline bool is_permutation(const Perm& f) {
  std::vector<bool> seen(f.size(), false);
  for (int x : f) {
    if (x < 0 || static_cast<size_t>(x) >= f.size() || seen[static_cast<size_t>(x)])
      return false;
    seen[static_cast<size_t>(x)] = true;
  }
  return true;
}

inline Perm perm_identity(int n) {
  Perm f(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = i;
  return f;
}

/// Composition f∘g: (f∘g)(i) = f(g(i)).
inline Perm perm_compose(const Perm& f, const Perm& g) {
  require(f.size() == g.size(), "perm_compose: size mismatch");
  Perm out(f.size());
  for (size_t i = 0; i < g.size(); ++i)
    out[i] = f[static_cast<size_t>(g[i])];
  return out;
}

inline Perm perm_inverse(const Perm& f) {
  Perm out(f.size());
  for (size_t i = 0; i < f.size(); ++i)
    out[static_cast<size_t>(f[i])] = static_cast<int>(i);
  return out;
}

inline std::vector<std::vector<int>> perm_cycles(const Perm& f) {
  std::vector<std::vector<int>> cycles;
  std::vector<bool> seen(f.size(), false);
  for (size_t start = 0; start < f.size(); ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    int i = static_cast<int>(start);
    while (!seen[static_cast<size_t>(i)]) {
      seen[static_cast<size_t>(i)] = true;
      cycle.push_back(i);
      i = f[static_cast<size_t>(i)];
    }
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

/// f^k for any integer k (negative = inverse powers), in O(n) via cycles.
inline Perm perm_power(const Perm& f, std::int64_t k) {
  Perm out(f.size());
  for (const std::vector<int>& cycle : perm_cycles(f)) {
    const std::int64_t len = static_cast<std::int64_t>(cycle.size());
    const std::int64_t shift = ((k % len) + len) % len;
    for (std::int64_t i = 0; i < len; ++i)
      out[static_cast<size_t>(cycle[static_cast<size_t>(i)])] =
          cycle[static_cast<size_t>((i + shift) % len)];
  }
  return out;
}

/// A connected square-tiled surface. When normalize_area is set, lengths are
/// scaled by 1/√n so the total area is 1 and growth constants are comparable
/// across surfaces.
class Origami {
 public:
  Origami(Perm h, Perm v, bool normalize_area = true)
      : h_(std::move(h)), v_(std::move(v)), normalize_(normalize_area) {
    require(!h_.empty() && h_.size() == v_.size(),
            "Origami: h and v must be nonempty and the same size");
    require(is_permutation(h_), "Origami: h must be a permutation");
    require(is_permutation(v_), "Origami: v must be a permutation");
    require(transitive(), "Origami: <h, v> must act transitively (connected)");
  }

  int n() const { return static_cast<int>(h_.size()); }
  const Perm& h() const { return h_; }
  const Perm& v() const { return v_; }
  bool normalize_area() const { return normalize_; }
  double scale() const {
    return normalize_ ? 1.0 / std::sqrt(static_cast<double>(n())) : 1.0;
  }

  static Origami torus() { return Origami({0}, {0}); }

  /// Three squares in an L: squares 1,2 side by side, square 3 on top of 2
  /// (1-based: h = (1 2), v = (2 3)).
  static Origami staircase3() { return Origami({1, 0, 2}, {0, 2, 1}); }

  static Origami parse(const std::string& text);
  std::string to_text() const;

 private:
  bool transitive() const {
    std::vector<bool> seen(h_.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t reached = 1;
    const Perm hi = perm_inverse(h_), vi = perm_inverse(v_);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (const Perm* f : {&h_, &v_, &hi, &vi}) {
        const int j = (*f)[static_cast<size_t>(i)];
        if (!seen[static_cast<size_t>(j)]) {
          seen[static_cast<size_t>(j)] = true;
          stack.push_back(j);
          ++reached;
        }
      }
    }
    return reached == h_.size();
  }

  Perm h_, v_;
  bool normalize_;
};

// --- SL(2,Z) generator actions ---------------------------------------------

inline Origami act_R(const Origami& o) {
  return Origami(o.h(), perm_compose(o.v(), perm_inverse(o.h())),
                 o.normalize_area());
}
inline Origami act_R_inv(const Origami& o) {
  return Origami(o.h(), perm_compose(o.v(), o.h()), o.normalize_area());
}
inline Origami act_L(const Origami& o) {
  return Origami(perm_compose(o.h(), perm_inverse(o.v())), o.v(),
                 o.normalize_area());
}
inline Origami act_L_inv(const Origami& o) {
  return Origami(perm_compose(o.h(), o.v()), o.v(), o.normalize_area());
}
inline Origami act_S(const Origami& o) {
  return Origami(perm_inverse(o.v()), o.h(), o.normalize_area());
}

/// A maximal cylinder of closed geodesics in a primitive rational direction.
struct Cylinder {
  int p = 1, q = 0;               ///< primitive direction
  double circumference = 0.0;     ///< geometric length of a core geodesic
  double height = 0.0;            ///< geometric transversal width
  double area_fraction = 0.0;     ///< exact circ_units·height_units/n
  Vec2 holonomy{1.0, 0.0};        ///< circ_units·(p,q)·scale (one of the ± pair)
  std::int64_t circ_units = 0;    ///< squares per core-circle period
  std::int64_t height_units = 0;  ///< stacked rows
};

/// Cylinders of the horizontal flow. Cycles of h are the rows; the seam above
/// a row C is singularity-free iff h∘v = v∘h on C, in which case v maps C to
/// the row above it. Maximal chains of seam-free rows are the cylinders.
inline std::vector<Cylinder> horizontal_cylinders(const Origami& o) {
  const Perm& h = o.h();
  const Perm& v = o.v();
  const std::vector<std::vector<int>> rows = perm_cycles(h);
  const size_t n_rows = rows.size();

  std::vector<int> row_of(h.size(), -1);
  for (size_t r = 0; r < n_rows; ++r)
    for (int i : rows[r]) row_of[static_cast<size_t>(i)] = static_cast<int>(r);

  std::vector<bool> seam_free(n_rows, true);
  std::vector<int> row_above(n_rows, -1);
  std::vector<bool> has_pred(n_rows, false);
  for (size_t r = 0; r < n_rows; ++r) {
    for (int i : rows[r])
      if (h[static_cast<size_t>(v[static_cast<size_t>(i)])] !=
          v[static_cast<size_t>(h[static_cast<size_t>(i)])]) {
        seam_free[r] = false;
        break;
      }
    if (seam_free[r])
      row_above[r] = row_of[static_cast<size_t>(v[static_cast<size_t>(rows[r][0])])];
  }
  for (size_t r = 0; r < n_rows; ++r)
    if (seam_free[r]) has_pred[static_cast<size_t>(row_above[r])] = true;

  const double scale = o.scale();
  std::vector<bool> used(n_rows, false);
  std::vector<Cylinder> cylinders;
  auto emit = [&](const std::vector<size_t>& chain) {
    Cylinder cyl;
    cyl.p = 1;
    cyl.q = 0;
    cyl.circ_units = static_cast<std::int64_t>(rows[chain[0]].size());
    cyl.height_units = static_cast<std::int64_t>(chain.size());
    cyl.circumference = static_cast<double>(cyl.circ_units) * scale;
    cyl.height = static_cast<double>(cyl.height_units) * scale;
    cyl.area_fraction =
        static_cast<double>(cyl.circ_units * cyl.height_units) / o.n();
    cyl.holonomy = Vec2{static_cast<double>(cyl.circ_units) * scale, 0.0};
    cylinders.push_back(cyl);
  };

  // Chains anchored at a row with no seam-free row below it.
  for (size_t r = 0; r < n_rows; ++r) {
    if (has_pred[r]) continue;
    std::vector<size_t> chain;
    size_t cur = r;
    for (;;) {
      chain.push_back(cur);
      used[cur] = true;
      if (!seam_free[cur]) break;
      cur = static_cast<size_t>(row_above[cur]);
    }
    emit(chain);
  }
  // Leftover rows sit on all-seam-free loops (torus-like cylinders).
  for (size_t r = 0; r < n_rows; ++r) {
    if (used[r]) continue;
    std::vector<size_t> chain;
    size_t cur = r;
    do {
      chain.push_back(cur);
      used[cur] = true;
      cur = static_cast<size_t>(row_above[cur]);
    } while (cur != r);
    emit(chain);
  }

  std::int64_t covered = 0;
  for (const Cylinder& c : cylinders) covered += c.circ_units * c.height_units;
  require(covered == o.n(),
          "horizontal_cylinders: cylinders must partition the squares");
  return cylinders;
}

/// Cylinders of the flow in primitive direction (p, q), via the Euclidean
/// word to (1, 0).
inline std::vector<Cylinder> direction_cylinders(const Origami& o, int p, int q) {
  if (std::gcd(std::abs(p), std::abs(q)) != 1)
    throw precondition_error("direction_cylinders: (p, q) must be primitive");
  std::int64_t pp = p, qq = q;
  Perm h = o.h(), v = o.v();
  while (qq != 0) {
    const std::int64_t k = floor_div(pp, qq);
    // R^{-k}: (h, v) -> (h, v∘hᵏ), direction -> (p - kq, q)
    v = perm_compose(v, perm_power(h, k));
    pp -= k * qq;
    // S: (h, v) -> (v⁻¹, h), direction -> (-q, p)
    Perm new_h = perm_inverse(v);
    v = h;
    h = std::move(new_h);
    const std::int64_t t = pp;
    pp = -qq;
    qq = t;
  }
  if (pp == -1) {  // S²: (h, v) -> (h⁻¹, v⁻¹), direction -> (1, 0)
    h = perm_inverse(h);
    v = perm_inverse(v);
    pp = 1;
  }

  std::vector<Cylinder> cylinders =
      horizontal_cylinders(Origami(std::move(h), std::move(v), o.normalize_area()));
  const double dir_norm = std::sqrt(static_cast<double>(p) * p +
                                    static_cast<double>(q) * q);
  const double scale = o.scale();
  for (Cylinder& cyl : cylinders) {
    cyl.p = p;
    cyl.q = q;
    const double c_u = static_cast<double>(cyl.circ_units);
    cyl.holonomy = Vec2{c_u * p * scale, c_u * q * scale};
    cyl.circumference = c_u * dir_norm * scale;
    cyl.height = static_cast<double>(cyl.height_units) * scale / dir_norm;
  }
  return cylinders;
}

namespace origami_detail {

/// Canonical half of the primitive directions (q > 0, plus (1,0)) with
/// |(p,q)| < bound, in deterministic order.
template <class Fn>
inline void for_each_direction(double bound, Fn&& fn) {
  const auto cap = static_cast<std::int64_t>(std::floor(bound)) + 1;
  if (1.0 < bound) fn(1, 0);
  for (std::int64_t q = 1; q <= cap; ++q)
    for (std::int64_t p = -cap; p <= cap; ++p) {
      if (static_cast<double>(p * p + q * q) >= bound * bound) continue;
      if (std::gcd(std::abs(p), q) != 1) continue;
      fn(static_cast<int>(p), static_cast<int>(q));
    }
}

}  // namespace origami_detail

/// The even point set of cylinder holonomies: ±w for every cylinder with
/// area_fraction > s and ‖w‖ < R, over all primitive directions.
inline FiniteAtomicMeasure holonomy_spectrum(const Origami& o, double s,
                                             double R) {
  require(s >= 0.0 && s < 1.0, "holonomy_spectrum: need 0 <= s < 1");
  require(std::isfinite(R) && R > 0.0, "holonomy_spectrum: need R > 0");
  const double scale = o.scale();
  std::vector<Atom> atoms;
  origami_detail::for_each_direction(R / scale, [&](int p, int q) {
    for (const Cylinder& cyl : direction_cylinders(o, p, q)) {
      if (!(cyl.area_fraction > s)) continue;
      const double norm = cyl.holonomy.norm();
      if (!(norm < R)) continue;
      atoms.push_back(Atom{{cyl.holonomy.x, cyl.holonomy.y}, 1.0, norm});
      atoms.push_back(Atom{{-cyl.holonomy.x, -cyl.holonomy.y}, 1.0, norm});
    }
  });
  return FiniteAtomicMeasure(2, true, std::move(atoms));
}

struct SpectrumGrowthRow {
  double s = 0.0;
  GrowthReport report;  ///< samples: (R, count/(πR²)); fitted constant c(·, s)
};

/// Growth constants of the holonomy count N(o, s, R) ≈ c(s)·πR² per filter
/// level: one direction sweep at max R, then counting per (s, R).
inline std::vector<SpectrumGrowthRow> growth_constants(
    const Origami& o, const std::vector<double>& s_grid,
    const std::vector<double>& r_grid) {
  require(!s_grid.empty() && !r_grid.empty(),
          "growth_constants: grids must be nonempty");
  for (double s : s_grid)
    require(s >= 0.0 && s < 1.0, "growth_constants: s values in [0,1)");
  double r_max = 0.0;
  for (double r : r_grid) {
    require(std::isfinite(r) && r > 0.0, "growth_constants: radii positive");
    r_max = std::max(r_max, r);
  }

  struct Record {
    double norm, area;
  };
  std::vector<Record> records;
  const double scale = o.scale();
  origami_detail::for_each_direction(r_max / scale, [&](int p, int q) {
    for (const Cylinder& cyl : direction_cylinders(o, p, q))
      records.push_back({cyl.holonomy.norm(), cyl.area_fraction});
  });

  std::vector<SpectrumGrowthRow> rows;
  rows.reserve(s_grid.size());
  for (double s : s_grid) {
    std::vector<GrowthSample> samples;
    samples.reserve(r_grid.size());
    for (double r : r_grid) {
      std::int64_t count = 0;
      for (const Record& rec : records)
        if (rec.area > s && rec.norm < r) count += 2;  // the ± pair
      samples.push_back(
          {r, static_cast<double>(count) / (std::numbers::pi * r * r)});
    }
    SpectrumGrowthRow row;
    row.s = s;
    row.report = make_growth_report(std::move(samples));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Sorted distinct cylinder area fractions over all primitive directions with
/// |(p,q)| ≤ dir_bound — the candidate jump locations of s ↦ c(·, s).
inline std::vector<double> area_fraction_values(const Origami& o,
                                                double dir_bound) {
  require(std::isfinite(dir_bound) && dir_bound >= 1.0,
          "area_fraction_values: need dir_bound >= 1");
  std::vector<double> areas;
  origami_detail::for_each_direction(dir_bound + 1e-9, [&](int p, int q) {
    for (const Cylinder& cyl : direction_cylinders(o, p, q))
      areas.push_back(cyl.area_fraction);
  });
  std::sort(areas.begin(), areas.end());
  areas.erase(std::unique(areas.begin(), areas.end()), areas.end());
  return areas;
}

// --- text round-trip --------------------------------------------------------

namespace origami_detail {

/// "(1 2)(3 4)" (1-based cycles, "()" = identity) or "2 1 3" (one-line
/// images, 1-based).
inline Perm parse_perm(const std::string& text, int n) {
  Perm f = perm_identity(n);
  const size_t first = text.find_first_not_of(" \t");
  require(first != std::string::npos, "origami parse: empty permutation");
  if (text[first] == '(') {
    std::vector<bool> moved(static_cast<size_t>(n), false);
    size_t pos = first;
    while (pos < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        continue;
      }
      require(text[pos] == '(', "origami parse: expected '('");
      const size_t close = text.find(')', pos);
      require(close != std::string::npos, "origami parse: unbalanced '('");
      std::istringstream cyc(text.substr(pos + 1, close - pos - 1));
      std::vector<int> entries;
      int value = 0;
      while (cyc >> value) {
        require(value >= 1 && value <= n, "origami parse: label out of range");
        require(!moved[static_cast<size_t>(value - 1)],
                "origami parse: repeated label");
        moved[static_cast<size_t>(value - 1)] = true;
        entries.push_back(value - 1);
      }
      for (size_t i = 0; i < entries.size(); ++i)
        f[static_cast<size_t>(entries[i])] =
            entries[(i + 1) % entries.size()];
      pos = close + 1;
    }
    return f;
  }
  std::istringstream line(text);
  int image = 0;
  for (int i = 0; i < n; ++i) {
    require(static_cast<bool>(line >> image),
            "origami parse: one-line form needs n images");
    require(image >= 1 && image <= n, "origami parse: label out of range");
    f[static_cast<size_t>(i)] = image - 1;
  }
  return f;
}

inline std::string format_perm(const Perm& f) {
  std::ostringstream out;
  bool any = false;
  for (const std::vector<int>& cycle : perm_cycles(f)) {
    if (cycle.size() < 2) continue;
    any = true;
    out << '(';
    for (size_t i = 0; i < cycle.size(); ++i)
      out << (i ? " " : "") << cycle[i] + 1;
    out << ')';
  }
  if (!any) return "()";
  return out.str();
}

}  // namespace origami_detail

/// Text format, one field per line:  n=3 / h=(1 2) / v=(2 3)
/// [/ normalize=0|1, optional, default 1].
inline Origami Origami::parse(const std::string& text) {
  int n = 0;
  std::string h_text, v_text;
  bool normalize = true;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n")
      n = std::stoi(value);
    else if (key == "h")
      h_text = value;
    else if (key == "v")
      v_text = value;
    else if (key == "normalize")
      normalize = std::stoi(value) != 0;
    else
      throw precondition_error("origami parse: unknown field");
  }
  require(n >= 1, "origami parse: need n >= 1");
  require(!h_text.empty() && !v_text.empty(),
          "origami parse: need both h= and v=");
  return Origami(origami_detail::parse_perm(h_text, n),
                 origami_detail::parse_perm(v_text, n), normalize);
}

inline std::string Origami::to_text() const {
  std::ostringstream out;
  out << "n=" << n() << "\n";
  out << "h=" << origami_detail::format_perm(h_) << "\n";
  out << "v=" << origami_detail::format_perm(v_) << "\n";
  if (!normalize_) out << "normalize=0\n";
  return out.str();
}

}  // namespace siegellab
