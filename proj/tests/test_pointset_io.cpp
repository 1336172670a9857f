#include "siegellab/pointset_io.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include "siegellab/orbits.hpp"

using namespace siegellab;

namespace {

/// Exact (coordinates..., weight) content of a planar measure, order-free:
/// atoms with tied norms have no canonical order, values must still match
/// bit for bit.
std::multiset<std::tuple<double, double, double>> content_2d(
    const FiniteAtomicMeasure& nu) {
  std::multiset<std::tuple<double, double, double>> out;
  for (size_t i = 0; i < nu.size(); ++i)
    out.emplace(nu.coords_at(i)[0], nu.coords_at(i)[1], nu.weight_at(i));
  return out;
}

}  // namespace

TEST_CASE("orbit snapshots survive a text round trip bit for bit") {
  const Mat2 g{2.0, 1.0, 3.0, 2.0};
  const FiniteAtomicMeasure original =
      enumerate_orbit(OrbitSpec{OrbitKind::primitive, 1}, {g, 9.0});
  REQUIRE(original.size() > 0);

  std::ostringstream out;
  write_point_set(out, original, 9.0, "orbit primitive g=[2 1;3 2] R=9");

  std::istringstream in(out.str());
  PointSetHeader header;
  const FiniteAtomicMeasure loaded = read_point_set(in, &header);

  CHECK(header.dim == 2);
  CHECK(header.even);
  CHECK(header.generator == "orbit primitive g=[2 1;3 2] R=9");
  CHECK(header.count == original.size());

  REQUIRE(loaded.size() == original.size());
  // Norm order is canonical even where atoms tie; values are exact.
  for (size_t i = 0; i < loaded.size(); ++i)
    CHECK(loaded.norm_at(i) == original.norm_at(i));
  CHECK(content_2d(loaded) == content_2d(original));
  for (double r : {1.0, 3.5, 7.25, 9.0})
    CHECK(growth_function(loaded, r) == growth_function(original, r));
}

TEST_CASE("writing is byte-idempotent when the atom order is unambiguous") {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{{0.3, -0.4}, 2.0, 0.5});
  atoms.push_back(Atom{{-1.0, 0.75}, 0.125, 1.25});
  atoms.push_back(Atom{{3.0, 0.0}, 7.5, 3.0});
  const FiniteAtomicMeasure nu(2, false, std::move(atoms));
  std::ostringstream first;
  write_point_set(first, nu, 10.0, "tie-free sample");
  std::istringstream in(first.str());
  const FiniteAtomicMeasure loaded = read_point_set(in);
  std::ostringstream second;
  write_point_set(second, loaded, 10.0, "tie-free sample");
  CHECK(second.str() == first.str());
}

TEST_CASE("awkward doubles round-trip through the decimal encoding") {
  std::vector<Atom> atoms;
  // Magnitudes stay within [1e-150, 1e150] so the squared norm the reader
  // recomputes neither underflows nor overflows.
  const double tricky[] = {0.1, 1.0 / 3.0, std::sqrt(2.0),
                           6.02214076e23, 1.2345678901234567e-100};
  for (double t : tricky) {
    atoms.push_back(Atom{{t, -t}, std::abs(t), std::hypot(t, t)});
    atoms.push_back(Atom{{-t, t}, std::abs(t), std::hypot(t, t)});
  }
  const FiniteAtomicMeasure original(2, true, std::move(atoms));
  std::ostringstream out;
  write_point_set(out, original, 1e308, "tricky");
  std::istringstream in(out.str());
  const FiniteAtomicMeasure loaded = read_point_set(in);
  REQUIRE(loaded.size() == original.size());
  CHECK(content_2d(loaded) == content_2d(original));
}

TEST_CASE("the radius cutoff and header fields are respected on write") {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{{1.0, 0.0, 0.0}, 0.5, 1.0});
  atoms.push_back(Atom{{-1.0, 0.0, 0.0}, 0.5, 1.0});
  atoms.push_back(Atom{{0.0, 5.0, 0.0}, 2.0, 5.0});
  atoms.push_back(Atom{{0.0, -5.0, 0.0}, 2.0, 5.0});
  const FiniteAtomicMeasure nu(3, true, std::move(atoms));

  std::ostringstream out;
  write_point_set(out, nu, 3.0, "three-d sample");
  std::istringstream in(out.str());
  PointSetHeader header;
  const FiniteAtomicMeasure loaded = read_point_set(in, &header);
  CHECK(header.dim == 3);
  CHECK(header.count == 2);  // the norm-5 pair is outside the ball
  CHECK(loaded.size() == 2);
  CHECK(loaded.norm_at(0) == 1.0);
}

TEST_CASE("write validation: radius and one-line generator ids") {
  std::vector<Atom> atoms;
  atoms.push_back(Atom{{1.0, 0.0}, 1.0, 1.0});
  atoms.push_back(Atom{{-1.0, 0.0}, 1.0, 1.0});
  const FiniteAtomicMeasure nu(2, true, std::move(atoms));
  std::ostringstream out;
  CHECK_THROWS_AS(write_point_set(out, nu, 0.0, "id"), precondition_error);
  CHECK_THROWS_AS(write_point_set(out, nu, 2.0, "two\nlines"),
                  precondition_error);
}

TEST_CASE("malformed headers and truncated records are rejected") {
  auto reject = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_point_set(in), precondition_error);
  };
  reject("");
  reject("pointset 2\ndim 2\neven 1\ngenerator x\ncount 0\n");
  reject("pointmess 1\ndim 2\neven 1\ngenerator x\ncount 0\n");
  reject("pointset 1\ndim 2\neven 1\ncount 0\n");  // generator missing
  reject("pointset 1\ndim 2\neven 1\ngenerator x\ncount 2\n1 0 1\n");
  reject("pointset 1\ndim 2\neven 1\ngenerator x\ncount 1\n1 0\n");
  // Declared even but the atoms are not symmetric.
  reject("pointset 1\ndim 2\neven 1\ngenerator x\ncount 1\n1 0 1\n");
  // Bad atom data caught by the measure validator.
  reject("pointset 1\ndim 2\neven 0\ngenerator x\ncount 1\n0 0 1\n");
  reject("pointset 1\ndim 2\neven 0\ngenerator x\ncount 1\n1 0 -1\n");
}

TEST_CASE("file round trip through the filesystem") {
  const FiniteAtomicMeasure original = enumerate_orbit(
      OrbitSpec{OrbitKind::full_lattice, 1}, {Mat2::identity(), 4.0});
  const std::string path = "pointset_io_test.tmp";
  write_point_set_file(path, original, 4.0, "square lattice R=4");
  PointSetHeader header;
  const FiniteAtomicMeasure loaded = read_point_set_file(path, &header);
  std::remove(path.c_str());
  CHECK(header.generator == "square lattice R=4");
  REQUIRE(loaded.size() == original.size());
  for (size_t i = 0; i < loaded.size(); ++i)
    CHECK(loaded.norm_at(i) == original.norm_at(i));
  CHECK_THROWS_AS(read_point_set_file("does_not_exist.tmp"),
                  precondition_error);
}
