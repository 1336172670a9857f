/// @file siegellab_cli.cpp
/// Command-line front end for the siegellab library: every module is exposed
/// as a subcommand that emits machine-readable JSON or CSV. Output carries a
/// provenance header (tool version, seed, config hash) so a table can always
/// be traced back to the parameters that produced it. Identical parameters
/// and seed produce byte-identical output except for the wall_time_ms field.
///
/// Exit codes: 0 success, 2 domain/precondition failure, 3 convergence
/// failure (partial results are still written), 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "siegellab/siegellab.hpp"

namespace {

using siegellab::AtomicMeasure;
using siegellab::convergence_error;
using siegellab::precondition_error;
using siegellab::size_error;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Formatting and output plumbing
// ---------------------------------------------------------------------------

/// Shortest exact decimal for CSV cells: %.17g always round-trips a double.
std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join17(const std::vector<double>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt17(xs[i]);
  }
  return out;
}

struct CommonOpts {
  std::string format = "json";
  std::string out_path;  // empty = stdout
  std::uint64_t seed = 0;
};

/// Everything the provenance header shows. The config string is a canonical
/// rendering of the parsed parameters (not raw argv), so `--R 5` and `--R=5`
/// hash identically.
struct Provenance {
  std::string subcommand;
  std::uint64_t seed = 0;
  std::string config;
  double wall_ms = 0.0;

  std::string hash_hex() const {
    const std::uint64_t h =
        siegellab::fnv1a64(subcommand + ' ' + config + " seed=" +
                           std::to_string(seed));
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
  }
};

std::string render_json(const Provenance& p, const ordered_json& results) {
  ordered_json doc;
  doc["tool"] = "siegellab";
  doc["version"] = siegellab::kVersion;
  doc["subcommand"] = p.subcommand;
  doc["seed"] = p.seed;
  doc["config"] = p.config;
  doc["config_hash"] = p.hash_hex();
  doc["wall_time_ms"] = p.wall_ms;
  doc["results"] = results;
  return doc.dump(2) + "\n";
}

/// CSV with `# key value` provenance comments, a header row, and data rows.
class CsvDoc {
 public:
  explicit CsvDoc(const Provenance& p) {
    comment("siegellab", siegellab::kVersion);
    comment("subcommand", p.subcommand);
    comment("seed", std::to_string(p.seed));
    comment("config", p.config);
    comment("config_hash", p.hash_hex());
    comment("wall_time_ms", fmt17(p.wall_ms));
  }

  void comment(const std::string& key, const std::string& value) {
    text_ += "# " + key + ' ' + value + '\n';
  }
  void comment(const std::string& key, double value) {
    comment(key, fmt17(value));
  }

  void columns(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += names[i];
    }
    text_ += '\n';
  }

  void row(const std::vector<double>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += fmt17(cells[i]);
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

void write_output(const CommonOpts& common, const std::string& text) {
  if (common.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + common.out_path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + common.out_path);
}

/// Millisecond wall clock for the provenance header (excluded from the
/// determinism contract).
class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

siegellab::OrbitSpec make_orbit_spec(const std::string& name, int level) {
  siegellab::OrbitSpec spec;
  if (name == "full") {
    spec.kind = siegellab::OrbitKind::full_lattice;
  } else if (name == "primitive") {
    spec.kind = siegellab::OrbitKind::primitive;
  } else {
    spec.kind = siegellab::OrbitKind::gamma0;
    spec.level = level;
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// spherical: orthogonal-average function F and its Monte Carlo oracle
// ---------------------------------------------------------------------------

struct SphericalOpts {
  CommonOpts common;
  std::vector<double> lambda;
  std::uint64_t oracle_samples = 0;
};

int run_spherical(const SphericalOpts& o, const WallClock& clock) {
  const siegellab::DiagonalScaling lam(o.lambda);
  const double value = siegellab::fN(lam, siegellab::QuadratureConfig{});

  ordered_json res;
  res["lambda"] = o.lambda;
  res["dim"] = lam.n();
  res["eccentricity"] = siegellab::eccentricity(lam);
  res["F"] = value;
  siegellab::OracleEstimate oracle{};
  if (o.oracle_samples > 0) {
    oracle = siegellab::fN_oracle(lam, o.oracle_samples, o.common.seed);
    res["oracle"] = {{"estimate", oracle.estimate},
                     {"std_error", oracle.std_error},
                     {"samples", o.oracle_samples},
                     {"abs_gap", std::abs(value - oracle.estimate)}};
  }

  Provenance p{"spherical", o.common.seed,
               "lambda=" + join17(o.lambda) +
                   " oracle_samples=" + std::to_string(o.oracle_samples) +
                   " format=" + o.common.format,
               clock.elapsed_ms()};
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    csv.comment("lambda", join17(o.lambda));
    if (o.oracle_samples > 0) {
      csv.columns({"dim", "eccentricity", "F", "oracle_estimate",
                   "oracle_std_error"});
      csv.row({static_cast<double>(lam.n()), siegellab::eccentricity(lam),
               value, oracle.estimate, oracle.std_error});
    } else {
      csv.columns({"dim", "eccentricity", "F"});
      csv.row({static_cast<double>(lam.n()), siegellab::eccentricity(lam),
               value});
    }
    write_output(o.common, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// identity: lhs/rhs error table along the geodesic probe family
// ---------------------------------------------------------------------------

struct IdentityOpts {
  CommonOpts common;
  std::string orbit = "full";
  int level = 2;
  std::vector<double> t_grid = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
};

int run_identity(const IdentityOpts& o, const WallClock& clock) {
  const siegellab::OrbitSpec spec = make_orbit_spec(o.orbit, o.level);
  const auto nu = siegellab::orbit_measure(spec);
  const std::vector<siegellab::IdentityRow> rows =
      siegellab::identity_error_table(*nu, o.t_grid);
  const siegellab::DecayFit fit = siegellab::error_decay_fit(*nu, o.t_grid);

  ordered_json res;
  res["orbit"] = o.orbit;
  res["rows"] = ordered_json::array();
  for (const auto& r : rows)
    res["rows"].push_back({{"t", r.t},
                           {"ratio", r.ratio},
                           {"lhs", r.lhs},
                           {"rhs", r.rhs},
                           {"abs_error", r.abs_error}});
  res["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}};

  Provenance p{"identity", o.common.seed,
               "orbit=" + o.orbit + " level=" + std::to_string(spec.level) +
                   " t_grid=" + join17(o.t_grid) +
                   " format=" + o.common.format,
               clock.elapsed_ms()};
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    csv.comment("fit_slope", fit.slope);
    csv.comment("fit_intercept", fit.intercept);
    csv.columns({"t", "ratio", "lhs", "rhs", "abs_error"});
    for (const auto& r : rows)
      csv.row({r.t, r.ratio, r.lhs, r.rhs, r.abs_error});
    write_output(o.common, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// count: normalized orbit counts N(R)/R² over a radius grid
// ---------------------------------------------------------------------------

struct CountOpts {
  CommonOpts common;
  std::string orbit = "full";
  int level = 2;
  std::vector<double> g = {1.0, 0.0, 0.0, 1.0};
  double R = 1000.0;
  std::vector<double> r_grid;
  std::string points_path;
  double points_R = 0.0;
};

int run_count(const CountOpts& o, const WallClock& clock) {
  const siegellab::OrbitSpec spec = make_orbit_spec(o.orbit, o.level);
  const siegellab::Mat2 g{o.g[0], o.g[1], o.g[2], o.g[3]};
  std::vector<double> grid = o.r_grid;
  if (grid.empty())
    for (int k = 1; k <= 5; ++k) grid.push_back(o.R * k / 5.0);
  const siegellab::GrowthReport report =
      siegellab::count_asymptotic(spec, g, grid);

  ordered_json res;
  res["orbit"] = o.orbit;
  res["g"] = o.g;
  res["samples"] = ordered_json::array();
  for (const auto& s : report.samples)
    res["samples"].push_back({{"R", s.R}, {"normalized_count", s.value}});
  res["fitted_constant"] = report.fitted_constant;
  res["max_abs_residual_tail"] = report.max_abs_residual_tail;

  if (!o.points_path.empty()) {
    const double pr = o.points_R > 0.0 ? o.points_R : std::min(o.R, 50.0);
    const siegellab::FiniteAtomicMeasure points =
        siegellab::enumerate_orbit(spec, {g, pr});
    const std::string id = "orbit " + o.orbit +
                           " level=" + std::to_string(spec.level) +
                           " g=" + join17(o.g) + " R=" + fmt17(pr);
    siegellab::write_point_set_file(o.points_path, points, pr, id);
    res["points_file"] = {{"path", o.points_path},
                          {"radius", pr},
                          {"count", points.size()}};
  }

  Provenance p{"count", o.common.seed,
               "orbit=" + o.orbit + " level=" + std::to_string(spec.level) +
                   " g=" + join17(o.g) + " grid=" + join17(grid) +
                   " format=" + o.common.format,
               clock.elapsed_ms()};
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    csv.comment("fitted_constant", report.fitted_constant);
    csv.comment("max_abs_residual_tail", report.max_abs_residual_tail);
    csv.columns({"R", "normalized_count"});
    for (const auto& s : report.samples) csv.row({s.R, s.value});
    write_output(o.common, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// siegel-mc: Monte Carlo average of a lattice sum over random unimodular
// lattices, compared against the closed-form target
// ---------------------------------------------------------------------------

struct SiegelOpts {
  CommonOpts common;
  std::string psi;
  std::uint64_t samples = 10000;
  bool primitive = false;
};

int run_siegel_mc(const SiegelOpts& o, const WallClock& clock) {
  const siegellab::TestFunction psi = siegellab::TestFunction::parse(o.psi);
  const siegellab::SiegelEstimate est = siegellab::verify_siegel(
      psi, o.primitive, static_cast<std::int64_t>(o.samples), o.common.seed);
  const double gap = std::abs(est.mean - est.target);

  ordered_json res;
  res["psi"] = psi.descriptor();
  res["primitive"] = o.primitive;
  res["n_samples"] = est.n_samples;
  res["threads"] = siegellab::thread_count_from_env();
  res["mean"] = est.mean;
  res["std_error"] = est.std_error;
  res["target"] = est.target;
  res["abs_gap"] = gap;
  res["gap_in_std_errors"] =
      est.std_error > 0.0 ? gap / est.std_error
                          : std::numeric_limits<double>::infinity();

  Provenance p{"siegel-mc", o.common.seed,
               "psi=" + psi.descriptor() +
                   " primitive=" + (o.primitive ? std::string("1") : "0") +
                   " samples=" + std::to_string(o.samples) +
                   " format=" + o.common.format,
               clock.elapsed_ms()};
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    csv.comment("psi", psi.descriptor());
    csv.columns({"n_samples", "mean", "std_error", "target", "abs_gap"});
    csv.row({static_cast<double>(est.n_samples), est.mean, est.std_error,
             est.target, gap});
    write_output(o.common, csv.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eisenstein: truncated series values, residue probe, integral representation
// ---------------------------------------------------------------------------

struct EisensteinOpts {
  CommonOpts common;
  std::string mode = "value";
  double x = 0.0;
  double y = 1.0;
  double s_re = 2.0;
  double s_im = 0.0;
  double radius = 0.0;  // 0 = per-mode default
  double tail_tol = std::numeric_limits<double>::infinity();
  double sigma = 0.5;
  std::vector<double> eps_grid = {0.5, 0.25, 0.125};
  double R_max = 100.0;
};

int run_eisenstein(const EisensteinOpts& o, const WallClock& clock) {
  const siegellab::UpperHalfPoint z{o.x, o.y};
  const double radius =
      o.radius > 0.0 ? o.radius : (o.mode == "residue" ? 2000.0 : 500.0);

  std::ostringstream cfg;
  cfg << "mode=" << o.mode << " x=" << fmt17(o.x) << " y=" << fmt17(o.y);
  if (o.mode == "value")
    cfg << " s=" << fmt17(o.s_re) << '+' << fmt17(o.s_im) << 'i'
        << " radius=" << fmt17(radius) << " tail_tol=" << fmt17(o.tail_tol);
  else if (o.mode == "residue")
    cfg << " sigma=" << fmt17(o.sigma) << " eps_grid=" << join17(o.eps_grid)
        << " radius=" << fmt17(radius);
  else
    cfg << " s=" << fmt17(o.s_re) << " R_max=" << fmt17(o.R_max);
  cfg << " format=" << o.common.format;
  Provenance p{"eisenstein", o.common.seed, cfg.str(), 0.0};

  ordered_json res;
  int status = 0;
  if (o.mode == "value") {
    res["x"] = o.x;
    res["y"] = o.y;
    res["s_re"] = o.s_re;
    res["s_im"] = o.s_im;
    res["radius"] = radius;
    try {
      const siegellab::EisensteinValue ev = siegellab::eisenstein_primitive_sum(
          z, {o.s_re, o.s_im}, radius, o.tail_tol);
      res["converged"] = true;
      res["value_re"] = ev.value.real();
      res["value_im"] = ev.value.imag();
      res["bracket_low"] = ev.bracket_low();
      res["bracket_high"] = ev.bracket_high();
      res["tail_upper"] = ev.tail_upper;
      res["terms"] = ev.terms;
      res["c_hat"] = ev.c_hat;
      res["tau_hat"] = ev.tau_hat;
    } catch (const convergence_error& e) {
      res["converged"] = false;
      res["estimate_abs"] = e.estimate();
      res["error_bound"] = e.error_bound();
      res["tail_tol"] = o.tail_tol;
      status = 3;
      std::cerr << "siegellab: " << e.what() << " (partial results written)\n";
    }
  } else if (o.mode == "residue") {
    const siegellab::ResidueProbeReport report =
        siegellab::residue_probe(z, o.sigma, o.eps_grid, radius);
    res["x"] = o.x;
    res["y"] = o.y;
    res["sigma"] = report.sigma;
    res["radius"] = radius;
    res["rows"] = ordered_json::array();
    for (const auto& r : report.rows)
      res["rows"].push_back({{"s", r.s}, {"value", r.value}});
    res["extrapolant"] = report.extrapolant;
  } else {
    const siegellab::StieltjesReport report =
        siegellab::stieltjes_representation_check(z, o.s_re, o.R_max);
    res["x"] = o.x;
    res["y"] = o.y;
    res["s"] = o.s_re;
    res["R_max"] = o.R_max;
    res["lhs"] = report.lhs;
    res["rhs"] = report.rhs;
    res["gap"] = report.gap;
    res["lhs_low"] = report.lhs_low;
    res["lhs_high"] = report.lhs_high;
    res["rhs_low"] = report.rhs_low;
    res["rhs_high"] = report.rhs_high;
    res["brackets_overlap"] = report.brackets_overlap;
  }

  p.wall_ms = clock.elapsed_ms();
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    auto cell = [&res](const char* key) { return res[key].get<double>(); };
    if (o.mode == "value") {
      if (status == 0) {
        csv.columns({"s_re", "s_im", "radius", "value_re", "value_im",
                     "bracket_low", "bracket_high", "tail_upper", "c_hat"});
        csv.row({cell("s_re"), cell("s_im"), cell("radius"), cell("value_re"),
                 cell("value_im"), cell("bracket_low"), cell("bracket_high"),
                 cell("tail_upper"), cell("c_hat")});
      } else {
        csv.comment("converged", "0");
        csv.columns({"s_re", "s_im", "radius", "estimate_abs", "error_bound"});
        csv.row({cell("s_re"), cell("s_im"), cell("radius"),
                 cell("estimate_abs"), cell("error_bound")});
      }
    } else if (o.mode == "residue") {
      csv.comment("extrapolant", cell("extrapolant"));
      csv.columns({"s", "value"});
      for (const auto& r : res["rows"])
        csv.row({r["s"].get<double>(), r["value"].get<double>()});
    } else {
      csv.comment("brackets_overlap", res["brackets_overlap"].get<bool>()
                                          ? "1"
                                          : "0");
      csv.columns({"s", "R_max", "lhs", "rhs", "gap"});
      csv.row({cell("s"), cell("R_max"), cell("lhs"), cell("rhs"),
               cell("gap")});
    }
    write_output(o.common, csv.str());
  }
  return status;
}

// ---------------------------------------------------------------------------
// origami: cylinder decompositions, holonomy spectra, growth constants
// ---------------------------------------------------------------------------

struct OrigamiOpts {
  CommonOpts common;
  std::string surface = "staircase3";
  std::string file;
  std::string mode = "cylinders";
  int p = 1;
  int q = 0;
  double saddle_min = 0.0;
  double R = 10.0;
  std::vector<double> s_grid = {0.0, 0.34, 0.67};
  std::vector<double> r_grid = {10.0, 15.0, 20.0, 25.0, 30.0};
  double dir_bound = 5.0;
  std::string points_path;
};

siegellab::Origami load_origami(const OrigamiOpts& o) {
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in)
      throw precondition_error("origami: cannot read surface file: " + o.file);
    std::ostringstream text;
    text << in.rdbuf();
    return siegellab::Origami::parse(text.str());
  }
  if (o.surface == "torus") return siegellab::Origami::torus();
  return siegellab::Origami::staircase3();
}

int run_origami(const OrigamiOpts& o, const WallClock& clock) {
  const siegellab::Origami surf = load_origami(o);
  const std::string surface_id =
      o.file.empty() ? o.surface : ("file:" + o.file);

  std::ostringstream cfg;
  cfg << "surface=" << surface_id << " mode=" << o.mode;
  if (o.mode == "cylinders")
    cfg << " p=" << o.p << " q=" << o.q;
  else if (o.mode == "spectrum")
    cfg << " saddle_min=" << fmt17(o.saddle_min) << " R=" << fmt17(o.R);
  else if (o.mode == "growth")
    cfg << " s_grid=" << join17(o.s_grid) << " r_grid=" << join17(o.r_grid);
  else
    cfg << " dir_bound=" << fmt17(o.dir_bound);
  cfg << " format=" << o.common.format;
  Provenance p{"origami", o.common.seed, cfg.str(), 0.0};

  ordered_json res;
  res["surface"] = surface_id;
  res["squares"] = surf.n();

  if (o.mode == "cylinders") {
    const std::vector<siegellab::Cylinder> cyls =
        siegellab::direction_cylinders(surf, o.p, o.q);
    res["p"] = o.p;
    res["q"] = o.q;
    res["cylinders"] = ordered_json::array();
    for (const auto& c : cyls)
      res["cylinders"].push_back({{"circumference", c.circumference},
                                  {"height", c.height},
                                  {"area_fraction", c.area_fraction},
                                  {"holonomy", {c.holonomy.x, c.holonomy.y}},
                                  {"circ_units", c.circ_units},
                                  {"height_units", c.height_units}});
    p.wall_ms = clock.elapsed_ms();
    CsvDoc table(p);
    table.columns({"circumference", "height", "area_fraction", "holonomy_x",
                   "holonomy_y", "circ_units", "height_units"});
    for (const auto& c : cyls)
      table.row({c.circumference, c.height, c.area_fraction, c.holonomy.x,
                 c.holonomy.y, static_cast<double>(c.circ_units),
                 static_cast<double>(c.height_units)});
    write_output(o.common, o.common.format == "json" ? render_json(p, res)
                                                     : table.str());
    return 0;
  }

  if (o.mode == "spectrum") {
    const siegellab::FiniteAtomicMeasure spec =
        siegellab::holonomy_spectrum(surf, o.saddle_min, o.R);
    res["saddle_min"] = o.saddle_min;
    res["R"] = o.R;
    res["count"] = spec.size();
    res["atoms"] = ordered_json::array();
    for (size_t i = 0; i < spec.size(); ++i)
      res["atoms"].push_back({{"x", spec.coords_at(i)[0]},
                              {"y", spec.coords_at(i)[1]},
                              {"weight", spec.weight_at(i)},
                              {"norm", spec.norm_at(i)}});
    if (!o.points_path.empty()) {
      const std::string id = "origami " + surface_id +
                             " saddle_min=" + fmt17(o.saddle_min) +
                             " R=" + fmt17(o.R);
      siegellab::write_point_set_file(o.points_path, spec, o.R, id);
      res["points_file"] = o.points_path;
    }
    p.wall_ms = clock.elapsed_ms();
    CsvDoc table(p);
    table.comment("count", static_cast<double>(spec.size()));
    table.columns({"x", "y", "weight", "norm"});
    for (size_t i = 0; i < spec.size(); ++i)
      table.row({spec.coords_at(i)[0], spec.coords_at(i)[1],
                 spec.weight_at(i), spec.norm_at(i)});
    write_output(o.common, o.common.format == "json" ? render_json(p, res)
                                                     : table.str());
    return 0;
  }

  if (o.mode == "growth") {
    const std::vector<siegellab::SpectrumGrowthRow> rows =
        siegellab::growth_constants(surf, o.s_grid, o.r_grid);
    res["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json samples = ordered_json::array();
      for (const auto& s : r.report.samples)
        samples.push_back({{"R", s.R}, {"normalized_count", s.value}});
      res["rows"].push_back({{"s", r.s},
                             {"fitted_constant", r.report.fitted_constant},
                             {"samples", samples}});
    }
    p.wall_ms = clock.elapsed_ms();
    CsvDoc table(p);
    table.columns({"s", "R", "normalized_count", "fitted_constant"});
    for (const auto& r : rows)
      for (const auto& s : r.report.samples)
        table.row({r.s, s.R, s.value, r.report.fitted_constant});
    write_output(o.common, o.common.format == "json" ? render_json(p, res)
                                                     : table.str());
    return 0;
  }

  // mode == "areas"
  const std::vector<double> values =
      siegellab::area_fraction_values(surf, o.dir_bound);
  res["dir_bound"] = o.dir_bound;
  res["area_fractions"] = values;
  p.wall_ms = clock.elapsed_ms();
  CsvDoc table(p);
  table.columns({"area_fraction"});
  for (double v : values) table.row({v});
  write_output(o.common, o.common.format == "json" ? render_json(p, res)
                                                   : table.str());
  return 0;
}

// ---------------------------------------------------------------------------
// equidist: Weyl-criterion probes on orbit measures, and the L¹ deviation of
// random-lattice counting functions
// ---------------------------------------------------------------------------

struct EquidistOpts {
  CommonOpts common;
  std::string mode = "weyl";
  std::string orbit = "primitive";
  std::uint64_t probes = 10;
  std::vector<double> r_grid;
  std::uint64_t samples = 2000;
};

int run_equidist(const EquidistOpts& o, const WallClock& clock) {
  ordered_json res;
  std::ostringstream cfg;
  int status = 0;

  if (o.mode == "weyl") {
    const std::vector<double> grid =
        o.r_grid.empty() ? std::vector<double>{250.0, 500.0, 1000.0, 2000.0}
                         : o.r_grid;
    const siegellab::OrbitSpec spec = make_orbit_spec(o.orbit, 2);
    const auto nu = siegellab::orbit_measure(spec);
    const double density =
        spec.kind == siegellab::OrbitKind::primitive
            ? 6.0 / (std::numbers::pi * std::numbers::pi)
            : 1.0;

    siegellab::Rng rng(o.common.seed);
    std::vector<siegellab::WeylProbe> probes;
    std::vector<std::array<double, 5>> probe_params;  // g entries + t
    for (std::uint64_t i = 0; i < o.probes; ++i) {
      const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double shear = rng.uniform(-1.5, 1.5);
      const double u = rng.uniform(-0.6, 0.6);
      const double t = rng.uniform(0.5, 2.0);
      const siegellab::Mat2 g =
          siegellab::Mat2::rotation(theta)
              .mul(siegellab::Mat2{1.0, shear, 0.0, 1.0})
              .mul(siegellab::Mat2::diagonal(std::exp(u), std::exp(-u)));
      probes.push_back({siegellab::MatN::from(g), t});
      probe_params.push_back({g.a, g.b, g.c, g.d, t});
    }
    const std::vector<siegellab::WeylReport> reports =
        siegellab::weyl_criterion(*nu, grid, probes, density);

    res["orbit"] = o.orbit;
    res["density"] = density;
    res["probes"] = ordered_json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
      const auto& w = reports[i];
      const double fitted = w.report.fitted_constant;
      res["probes"].push_back(
          {{"g", {probe_params[i][0], probe_params[i][1], probe_params[i][2],
                  probe_params[i][3]}},
           {"t", probe_params[i][4]},
           {"expected", w.expected},
           {"fitted_constant", fitted},
           {"rel_gap", std::abs(fitted - w.expected) / w.expected}});
    }
    cfg << "mode=weyl orbit=" << o.orbit << " probes=" << o.probes
        << " r_grid=" << join17(grid);

    cfg << " format=" << o.common.format;
    Provenance p{"equidist", o.common.seed, cfg.str(), clock.elapsed_ms()};
    if (o.common.format == "json") {
      write_output(o.common, render_json(p, res));
    } else {
      CsvDoc csv(p);
      csv.columns({"probe", "g00", "g01", "g10", "g11", "t", "expected",
                   "fitted_constant", "rel_gap"});
      for (size_t i = 0; i < reports.size(); ++i)
        csv.row({static_cast<double>(i), probe_params[i][0],
                 probe_params[i][1], probe_params[i][2], probe_params[i][3],
                 probe_params[i][4], reports[i].expected,
                 reports[i].report.fitted_constant,
                 std::abs(reports[i].report.fitted_constant -
                          reports[i].expected) /
                     reports[i].expected});
      write_output(o.common, csv.str());
    }
    return status;
  }

  // mode == "l1"
  const std::vector<double> grid =
      o.r_grid.empty() ? std::vector<double>{5.0, 10.0, 20.0, 50.0} : o.r_grid;
  const std::vector<siegellab::GrowthDeviationRow> rows =
      siegellab::growth_l1_convergence(
          grid, static_cast<std::int64_t>(o.samples), o.common.seed);
  res["n_samples"] = o.samples;
  res["threads"] = siegellab::thread_count_from_env();
  res["rows"] = ordered_json::array();
  for (const auto& r : rows)
    res["rows"].push_back({{"R", r.R},
                           {"mean_abs_dev", r.mean_abs_dev},
                           {"std_error", r.std_error}});
  cfg << "mode=l1 r_grid=" << join17(grid) << " samples=" << o.samples
      << " format=" << o.common.format;
  Provenance p{"equidist", o.common.seed, cfg.str(), clock.elapsed_ms()};
  if (o.common.format == "json") {
    write_output(o.common, render_json(p, res));
  } else {
    CsvDoc csv(p);
    csv.columns({"R", "mean_abs_dev", "std_error"});
    for (const auto& r : rows) csv.row({r.R, r.mean_abs_dev, r.std_error});
    write_output(o.common, csv.str());
  }
  return status;
}

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--out", c.out_path, "Write output to this file (default stdout)");
  sub->add_option("--seed", c.seed, "Random seed recorded in the output header")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  const WallClock clock;
  CLI::App app{
      "siegellab: lattice point statistics laboratory.\n"
      "Counts orbit points, checks counting identities and equidistribution,\n"
      "sums truncated series over coprime pairs, and decomposes square-tiled\n"
      "surfaces into cylinders. Monte Carlo drivers honor SIEGELLAB_THREADS\n"
      "(default 1 worker); results are independent of the thread count."};
  app.require_subcommand(1);

  SphericalOpts spherical;
  CLI::App* sub_spherical = app.add_subcommand(
      "spherical", "Orthogonal average F(lambda) of the unit-ball indicator");
  sub_spherical
      ->add_option("--lambda", spherical.lambda,
                   "Strictly decreasing positive scalings, comma separated")
      ->required()
      ->delimiter(',');
  sub_spherical->add_option("--oracle-samples", spherical.oracle_samples,
                            "If > 0, also run the Monte Carlo oracle");
  add_common(sub_spherical, spherical.common);

  IdentityOpts identity;
  CLI::App* sub_identity = app.add_subcommand(
      "identity", "Counting-identity error table along geodesic probes");
  sub_identity
      ->add_option("--orbit", identity.orbit, "Orbit measure to test")
      ->check(CLI::IsMember({"full", "primitive", "gamma0"}))
      ->capture_default_str();
  sub_identity->add_option("--level", identity.level, "Congruence level (gamma0)")
      ->capture_default_str();
  sub_identity
      ->add_option("--t-grid", identity.t_grid,
                   "Geodesic parameters, each > log 2")
      ->delimiter(',');
  add_common(sub_identity, identity.common);

  CountOpts count;
  CLI::App* sub_count = app.add_subcommand(
      "count", "Normalized orbit counts N(R)/R^2 over a radius grid");
  sub_count->add_option("--orbit", count.orbit, "Orbit to count")
      ->check(CLI::IsMember({"full", "primitive", "gamma0"}))
      ->capture_default_str();
  sub_count->add_option("--level", count.level, "Congruence level (gamma0)")
      ->capture_default_str();
  sub_count
      ->add_option("--g", count.g, "Row-major 2x2 matrix applied to the orbit")
      ->expected(4)
      ->delimiter(',');
  sub_count->add_option("--R", count.R, "Max radius (grid = R/5..R)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_count
      ->add_option("--R-grid", count.r_grid,
                   "Explicit radius grid (overrides --R)")
      ->delimiter(',');
  sub_count->add_option("--emit-points", count.points_path,
                        "Also write the orbit as a point-set file");
  sub_count->add_option("--points-R", count.points_R,
                        "Radius for --emit-points (default min(R, 50))");
  add_common(sub_count, count.common);

  SiegelOpts siegel;
  CLI::App* sub_siegel = app.add_subcommand(
      "siegel-mc",
      "Monte Carlo lattice-sum average over random unimodular lattices");
  sub_siegel
      ->add_option("--psi", siegel.psi,
                   "Test function: ball:R, box:R, hat:R, or gauss:W,R")
      ->required();
  sub_siegel->add_option("--samples", siegel.samples, "Number of random lattices")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_siegel->add_flag("--primitive", siegel.primitive,
                       "Sum over primitive lattice vectors only");
  add_common(sub_siegel, siegel.common);

  EisensteinOpts eisen;
  CLI::App* sub_eisen = app.add_subcommand(
      "eisenstein",
      "Truncated coprime-pair series with rigorous tail brackets");
  sub_eisen->add_option("--mode", eisen.mode, "value, residue, or stieltjes")
      ->check(CLI::IsMember({"value", "residue", "stieltjes"}))
      ->capture_default_str();
  sub_eisen->add_option("--x", eisen.x, "Base point, real part")
      ->capture_default_str();
  sub_eisen->add_option("--y", eisen.y, "Base point, imaginary part (> 0)")
      ->capture_default_str();
  sub_eisen->add_option("--s-re", eisen.s_re, "Exponent, real part")
      ->capture_default_str();
  sub_eisen->add_option("--s-im", eisen.s_im, "Exponent, imaginary part")
      ->capture_default_str();
  sub_eisen->add_option("--radius", eisen.radius,
                        "Truncation radius (default 500; residue mode 2000)");
  sub_eisen->add_option("--tail-tol", eisen.tail_tol,
                        "Fail (exit 3) if the tail bound exceeds this");
  sub_eisen->add_option("--sigma", eisen.sigma, "Residue-probe aperture")
      ->capture_default_str();
  sub_eisen
      ->add_option("--eps-grid", eisen.eps_grid,
                   "Residue probe offsets, strictly decreasing")
      ->delimiter(',');
  sub_eisen->add_option("--R-max", eisen.R_max,
                        "Exact-integration cutoff (stieltjes mode)")
      ->capture_default_str();
  add_common(sub_eisen, eisen.common);

  OrigamiOpts origami;
  CLI::App* sub_origami = app.add_subcommand(
      "origami", "Cylinder decompositions and holonomy spectra of square-tiled surfaces");
  sub_origami->add_option("--surface", origami.surface, "Built-in surface")
      ->check(CLI::IsMember({"torus", "staircase3"}))
      ->capture_default_str();
  sub_origami->add_option("--file", origami.file,
                          "Read the surface from a text file instead");
  sub_origami
      ->add_option("--mode", origami.mode,
                   "cylinders, spectrum, growth, or areas")
      ->check(CLI::IsMember({"cylinders", "spectrum", "growth", "areas"}))
      ->capture_default_str();
  sub_origami->add_option("--p", origami.p, "Direction, first coordinate")
      ->capture_default_str();
  sub_origami->add_option("--q", origami.q, "Direction, second coordinate")
      ->capture_default_str();
  sub_origami->add_option("--saddle-min", origami.saddle_min,
                          "Keep cylinders with area fraction > this")
      ->capture_default_str();
  sub_origami->add_option("--R", origami.R, "Holonomy norm cutoff")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_origami
      ->add_option("--s-grid", origami.s_grid, "Area filter levels in [0,1)")
      ->delimiter(',');
  sub_origami
      ->add_option("--r-grid", origami.r_grid, "Radius grid (growth mode)")
      ->delimiter(',');
  sub_origami->add_option("--dir-bound", origami.dir_bound,
                          "Direction norm bound (areas mode)")
      ->capture_default_str();
  sub_origami->add_option("--emit-points", origami.points_path,
                          "Write the spectrum as a point-set file");
  add_common(sub_origami, origami.common);

  EquidistOpts equidist;
  CLI::App* sub_equidist = app.add_subcommand(
      "equidist",
      "Equidistribution checks: Weyl probes and random-lattice L1 deviation");
  sub_equidist->add_option("--mode", equidist.mode, "weyl or l1")
      ->check(CLI::IsMember({"weyl", "l1"}))
      ->capture_default_str();
  sub_equidist->add_option("--orbit", equidist.orbit, "Orbit measure (weyl mode)")
      ->check(CLI::IsMember({"full", "primitive"}))
      ->capture_default_str();
  sub_equidist->add_option("--probes", equidist.probes, "Number of random probes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_equidist
      ->add_option("--R-grid", equidist.r_grid, "Radius grid")
      ->delimiter(',');
  sub_equidist->add_option("--samples", equidist.samples,
                           "Random lattices per radius (l1 mode)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(sub_equidist, equidist.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (sub_spherical->parsed()) return run_spherical(spherical, clock);
    if (sub_identity->parsed()) return run_identity(identity, clock);
    if (sub_count->parsed()) return run_count(count, clock);
    if (sub_siegel->parsed()) return run_siegel_mc(siegel, clock);
    if (sub_eisen->parsed()) return run_eisenstein(eisen, clock);
    if (sub_origami->parsed()) return run_origami(origami, clock);
    if (sub_equidist->parsed()) return run_equidist(equidist, clock);
  } catch (const precondition_error& e) {
    std::cerr << "siegellab: " << e.what() << '\n';
    return 2;
  } catch (const size_error& e) {
    std::cerr << "siegellab: " << e.what() << '\n';
    return 2;
  } catch (const convergence_error& e) {
    std::cerr << "siegellab: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "siegellab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
