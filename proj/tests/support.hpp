#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ipl/ipl.hpp"

namespace ipl::testing {

// Z{v0, v1} in degree 0, Z{e} in degree 1, d e = v1 - v0, unfiltered.
inline ChainComplex interval_complex() {
  const ModulePtr m = share(GradedModule::unfiltered(0, {2, 1}));
  GradedMap d(m, m, -1);
  d.block(1)(0, 0) = -1;
  d.block(1)(1, 0) = 1;
  return ChainComplex(m, d);
}

inline SdrData identity_sdr(const ChainComplex& c) {
  return {c, c, GradedMap::identity(c.module), GradedMap::identity(c.module), GradedMap(c.module, c.module, 1)};
}

// Module with one generator per (degree, weight) for degrees 0..1 and weights 0..2,
// zero differential. Basis index equals weight.
inline ChainComplex staircase() {
  return ChainComplex::zero_differential(share(GradedModule::make(0, {{0, 1, 2}, {0, 1, 2}}, 2)));
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string source_path(const std::string& rel) { return std::string(IPL_SOURCE_DIR) + "/" + rel; }

inline FixtureShape shape(std::vector<std::size_t> ranks, int filtration) {
  FixtureShape s;
  s.ranks = std::move(ranks);
  s.filtration_length = filtration;
  return s;
}

}  // namespace ipl::testing
