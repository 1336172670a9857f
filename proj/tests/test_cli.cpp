#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "siegellab/orbits.hpp"
#include "siegellab/pointset_io.hpp"

// End-to-end tests of the command-line binary (path injected at build time).
// Each case spawns the real executable and inspects exit status and output.

namespace {

using json = nlohmann::json;

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SIEGELLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int rc = pclose(pipe);
  RunResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = std::move(out);
  return r;
}

/// Output with every wall-time line removed: the determinism contract covers
/// everything else byte for byte.
std::string strip_wall_time(const std::string& text) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    if (line.find("wall_time_ms") == std::string::npos) out += line + '\n';
    pos = end + 1;
  }
  return out;
}

/// Data rows of a CSV document (comments and the header row skipped), split
/// into cells.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    size_t c = 0;
    while (true) {
      const size_t comma = line.find(',', c);
      cells.push_back(line.substr(c, comma - c));
      if (comma == std::string::npos) break;
      c = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TEST_CASE("spherical emits the closed-form value with provenance") {
  const RunResult r = run_cli("spherical --lambda 2,0.5");
  REQUIRE(r.status == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["tool"] == "siegellab");
  CHECK(doc["version"] == "0.1.0");
  CHECK(doc["subcommand"] == "spherical");
  CHECK(doc["seed"] == 0);
  CHECK(doc["config_hash"].get<std::string>().size() == 16);
  CHECK(doc["results"]["dim"] == 2);
  CHECK(doc["results"]["F"].get<double>() == 0.29516723530086653);
}

TEST_CASE("count CSV converges to the primitive density at R = 1000") {
  const RunResult r = run_cli("count --orbit primitive --R 1000 --format csv");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("# subcommand count") != std::string::npos);
  CHECK(r.out.find("# fitted_constant") != std::string::npos);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  REQUIRE(rows.back().size() == 2);
  CHECK(std::stod(rows.back()[0]) == 1000.0);
  CHECK(std::stod(rows.back()[1]) == Catch::Approx(1.9099).margin(2e-3));
}

TEST_CASE("usage errors exit 64") {
  CHECK(run_cli("siegel-mc --psi ball:1 --samples 0").status == 64);
  CHECK(run_cli("count --bogus-flag 3").status == 64);
  CHECK(run_cli("spherical").status == 64);  // required --lambda missing
  CHECK(run_cli("no-such-subcommand").status == 64);
  CHECK(run_cli("").status == 64);  // a subcommand is required
  CHECK(run_cli("count --format yaml").status == 64);
  CHECK(run_cli("equidist --mode central-limit").status == 64);
}

TEST_CASE("domain failures exit 2") {
  CHECK(run_cli("eisenstein --s-re 0.9").status == 2);
  CHECK(run_cli("spherical --lambda 1,2").status == 2);  // not decreasing
  CHECK(run_cli("identity --orbit gamma0 --level 1").status == 2);
  CHECK(run_cli("siegel-mc --psi ball:1 --samples 10").status == 2);
  CHECK(run_cli("eisenstein --y -1").status == 2);
  CHECK(run_cli("origami --file no_such_surface.txt").status == 2);
}

TEST_CASE("an unreachable tail tolerance exits 3 with partial results") {
  const RunResult r =
      run_cli("eisenstein --s-re 1.1 --radius 50 --tail-tol 1e-9");
  REQUIRE(r.status == 3);
  const json doc = json::parse(r.out);
  CHECK(doc["results"]["converged"] == false);
  CHECK(doc["results"]["estimate_abs"].get<double>() > 0.0);
  CHECK(doc["results"]["error_bound"].get<double>() > 1e-9);
}

TEST_CASE("identical config and seed reproduce byte-identical output") {
  const std::string cmd = "siegel-mc --psi ball:1 --samples 2000 --seed 7";
  const RunResult a = run_cli(cmd);
  const RunResult b = run_cli(cmd);
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(a.out.find("wall_time_ms") != std::string::npos);
  CHECK(strip_wall_time(a.out) == strip_wall_time(b.out));

  // A different seed changes the estimate (and only then).
  const RunResult c = run_cli(
      "siegel-mc --psi ball:1 --samples 2000 --seed 8");
  REQUIRE(c.status == 0);
  CHECK(json::parse(a.out)["results"]["mean"] !=
        json::parse(c.out)["results"]["mean"]);

  const RunResult csv_run = run_cli(cmd + " --format csv");
  const RunResult csv_rerun = run_cli(cmd + " --format csv");
  CHECK(strip_wall_time(csv_run.out) == strip_wall_time(csv_rerun.out));
}

TEST_CASE("eisenstein value mode brackets its own estimate") {
  const RunResult r = run_cli("eisenstein --radius 400");
  REQUIRE(r.status == 0);
  const json res = json::parse(r.out)["results"];
  const double oracle = 30.0 * 0.9159655941772190 /
                        (std::numbers::pi * std::numbers::pi);
  CHECK(res["converged"] == true);
  CHECK(std::abs(res["value_re"].get<double>() - oracle) < 1e-5);
  CHECK(res["bracket_low"].get<double>() <= oracle);
  CHECK(res["bracket_high"].get<double>() >= oracle);
}

TEST_CASE("origami subcommand reports cylinders and area levels") {
  const RunResult r =
      run_cli("origami --surface staircase3 --mode cylinders --p 1 --q 0");
  REQUIRE(r.status == 0);
  const json res = json::parse(r.out)["results"];
  REQUIRE(res["cylinders"].size() == 2);
  double total = 0.0;
  for (const auto& c : res["cylinders"])
    total += c["area_fraction"].get<double>();
  CHECK(total == Catch::Approx(1.0).margin(1e-12));

  const RunResult areas = run_cli("origami --mode areas");
  REQUIRE(areas.status == 0);
  const json values = json::parse(areas.out)["results"]["area_fractions"];
  REQUIRE(values.size() == 3);
  CHECK(values[0].get<double>() == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(values[1].get<double>() == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(values[2].get<double>() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("equidist probes stay close to the orbit density") {
  const RunResult r =
      run_cli("equidist --probes 3 --R-grid 100,200,400 --seed 5");
  REQUIRE(r.status == 0);
  const json res = json::parse(r.out)["results"];
  REQUIRE(res["probes"].size() == 3);
  for (const auto& probe : res["probes"])
    CHECK(probe["rel_gap"].get<double>() < 0.02);
}

TEST_CASE("--out writes the document to a file instead of stdout") {
  const std::string path = "cli_out_test.tmp";
  const RunResult r =
      run_cli("count --R 100 --format csv --out " + path);
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char buf[64] = {};
  const size_t n = fread(buf, 1, sizeof buf - 1, f);
  std::fclose(f);
  std::remove(path.c_str());
  CHECK(std::string(buf, n).find("# siegellab 0.1.0") == 0);
}

TEST_CASE("emitted point-set files reload with identical growth values") {
  const std::string path = "cli_points_test.tmp";
  const RunResult r = run_cli(
      "count --orbit primitive --R 100 --emit-points " + path +
      " --points-R 10 >/dev/null");
  REQUIRE(r.status == 0);
  siegellab::PointSetHeader header;
  const siegellab::FiniteAtomicMeasure loaded =
      siegellab::read_point_set_file(path, &header);
  std::remove(path.c_str());
  CHECK(header.generator.find("orbit primitive") == 0);
  const siegellab::OrbitSpec spec{siegellab::OrbitKind::primitive, 1};
  for (double radius : {2.5, 5.0, 10.0})
    CHECK(siegellab::growth_function(loaded, radius) ==
          static_cast<double>(siegellab::count_orbit(
              spec, {siegellab::Mat2::identity(), radius})));
}
