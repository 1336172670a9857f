#pragma once

/// @file pointset_io.hpp
/// The point-set interchange format: a plain-text snapshot of an atomic
/// measure inside a ball, written so that a re-load reproduces the measure
/// bit for bit (coordinates and weights printed with %.17g, which
/// round-trips IEEE doubles exactly).
///
///   pointset 1
///   dim 2
///   even 1
///   generator <free-form id, no newlines>
///   count 8
///   <x_1 … x_dim weight>      (one atom per line, nondecreasing norm)
///
/// Norms are recomputed from coordinates on load; since the writers obtained
/// them from the same sum of squares, growth_function values agree exactly
/// after a round trip.

#include "siegellab/measures.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace siegellab {

inline void write_point_set(std::ostream& out, const AtomicMeasure& nu,
                            double radius, const std::string& generator_id) {
  require(std::isfinite(radius) && radius > 0.0,
          "write_point_set: radius must be positive");
  require(generator_id.find('\n') == std::string::npos,
          "write_point_set: generator id must be a single line");
  std::vector<Atom> atoms;
  nu.visit(radius, [&](const Atom& a) { atoms.push_back(a); });

  out << "pointset 1\n";
  out << "dim " << nu.dim() << "\n";
  out << "even " << (nu.even() ? 1 : 0) << "\n";
  out << "generator " << generator_id << "\n";
  out << "count " << atoms.size() << "\n";
  char buf[64];
  for (const Atom& a : atoms) {
    for (double x : a.x) {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << buf << ' ';
    }
    std::snprintf(buf, sizeof buf, "%.17g", a.weight);
    out << buf << '\n';
  }
}

inline void write_point_set_file(const std::string& path,
                                 const AtomicMeasure& nu, double radius,
                                 const std::string& generator_id) {
  std::ofstream out(path);
  require(out.good(), "write_point_set_file: cannot open output file");
  write_point_set(out, nu, radius, generator_id);
  out.flush();
  require(out.good(), "write_point_set_file: write failed");
}

struct PointSetHeader {
  int dim = 0;
  bool even = false;
  std::string generator;
  size_t count = 0;
};

inline FiniteAtomicMeasure read_point_set(std::istream& in,
                                          PointSetHeader* header_out = nullptr) {
  std::string keyword;
  int version = 0;
  require(static_cast<bool>(in >> keyword >> version) && keyword == "pointset" &&
              version == 1,
          "read_point_set: expected 'pointset 1' header");
  PointSetHeader header;
  int even_flag = 0;
  require(static_cast<bool>(in >> keyword >> header.dim) && keyword == "dim",
          "read_point_set: expected 'dim'");
  require(static_cast<bool>(in >> keyword >> even_flag) && keyword == "even",
          "read_point_set: expected 'even'");
  require(static_cast<bool>(in >> keyword) && keyword == "generator",
          "read_point_set: expected 'generator'");
  std::getline(in, header.generator);
  if (!header.generator.empty() && header.generator.front() == ' ')
    header.generator.erase(0, 1);
  require(static_cast<bool>(in >> keyword >> header.count) && keyword == "count",
          "read_point_set: expected 'count'");
  header.even = even_flag != 0;

  std::vector<Atom> atoms;
  atoms.reserve(header.count);
  for (size_t i = 0; i < header.count; ++i) {
    Atom a;
    a.x.resize(static_cast<size_t>(header.dim));
    double norm2 = 0.0;
    for (double& x : a.x) {
      require(static_cast<bool>(in >> x), "read_point_set: truncated record");
      norm2 += x * x;
    }
    require(static_cast<bool>(in >> a.weight),
            "read_point_set: truncated record");
    a.norm = std::sqrt(norm2);
    atoms.push_back(std::move(a));
  }
  if (header_out != nullptr) *header_out = header;
  return FiniteAtomicMeasure(header.dim, header.even, std::move(atoms));
}

inline FiniteAtomicMeasure read_point_set_file(const std::string& path,
                                               PointSetHeader* header_out = nullptr) {
  std::ifstream in(path);
  require(in.good(), "read_point_set_file: cannot open input file");
  return read_point_set(in, header_out);
}

}  // namespace siegellab
