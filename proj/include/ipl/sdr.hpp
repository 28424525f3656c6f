#pragma once

// Strong deformation retract data and the Basic Perturbation Lemma.

#include <string>

#include "ipl/chain.hpp"
#include "ipl/errors.hpp"

namespace ipl {

/// Records a finding if `diff` is not the zero map, naming its first nonzero entry.
inline void expect_zero(Report& r, const std::string& identity, const GradedMap& diff) {
  if (auto at = diff.first_nonzero()) {
    auto [n, i, j] = *at;
    r.add(identity, "first offending entry at source degree " + std::to_string(n) + ", row " +
                        std::to_string(i) + ", col " + std::to_string(j) + " (value " +
                        diff.block_ref(n)(i, j).str() + ")");
  }
}

inline void expect_filtered(Report& r, const std::string& name, const GradedMap& f) {
  if (int q = filtration_shift(f); q < 0)
    r.add("filtration " + name, "shift " + std::to_string(q) + " < 0");
}

/// A perturbation delta of the differential of `base`: degree -1, shift >= 1, (d + delta)^2 = 0.
struct Perturbation {
  ChainComplex base;
  GradedMap delta;

  ChainComplex perturbed() const { return base.perturbed(delta); }
  static Perturbation none(const ChainComplex& c) { return {c, GradedMap(c.module, c.module, -1)}; }
};

inline Report validate_perturbation(const Perturbation& p) {
  Report r;
  if (p.delta.degree() != -1 || !same_module(p.delta.source(), p.base.module) ||
      !same_module(p.delta.target(), p.base.module)) {
    r.add("shape", "perturbation must be a degree -1 endomorphism of the base module");
    return r;
  }
  if (int q = filtration_shift(p.delta); q < 1)
    r.add("filtration shift >= 1", "perturbation has shift " + std::to_string(q));
  const GradedMap& d = p.base.d;
  expect_zero(r, "d delta + delta d + delta delta = 0", d * p.delta + p.delta * d + p.delta * p.delta);
  return r;
}

struct SdrData {
  ChainComplex M;
  ChainComplex N;
  GradedMap F;  // M -> N, degree 0
  GradedMap G;  // N -> M, degree 0
  GradedMap H;  // M -> M, degree +1
};

struct SideConditions {
  bool hh_zero = false;
  bool hg_zero = false;
  bool fh_zero = false;
  bool all() const { return hh_zero && hg_zero && fh_zero; }
  friend bool operator==(const SideConditions&, const SideConditions&) = default;
};

namespace detail {
inline bool has_shape(const GradedMap& f, const ModulePtr& src, const ModulePtr& dst, int degree) {
  return f.degree() == degree && same_module(f.source(), src) && same_module(f.target(), dst);
}
}  // namespace detail

inline Report validate_sdr(const SdrData& s) {
  Report r;
  r.merge(validate_complex(s.M), "M: ");
  r.merge(validate_complex(s.N), "N: ");
  const ModulePtr& m = s.M.module;
  const ModulePtr& n = s.N.module;
  if (!detail::has_shape(s.F, m, n, 0)) r.add("shape", "F must be a degree 0 map M -> N");
  if (!detail::has_shape(s.G, n, m, 0)) r.add("shape", "G must be a degree 0 map N -> M");
  if (!detail::has_shape(s.H, m, m, 1)) r.add("shape", "H must be a degree +1 map M -> M");
  if (!r.ok()) return r;

  const GradedMap& dm = s.M.d;
  const GradedMap& dn = s.N.d;
  expect_zero(r, "F d_M = d_N F", s.F * dm - dn * s.F);
  expect_zero(r, "G d_N = d_M G", s.G * dn - dm * s.G);
  expect_zero(r, "G F - 1 = d_M H + H d_M", s.G * s.F - GradedMap::identity(m) - dm * s.H - s.H * dm);
  expect_zero(r, "F G = 1", s.F * s.G - GradedMap::identity(n));
  expect_filtered(r, "F", s.F);
  expect_filtered(r, "G", s.G);
  expect_filtered(r, "H", s.H);
  return r;
}

inline SideConditions check_side_conditions(const SdrData& s) {
  return {(s.H * s.H).is_zero(), (s.H * s.G).is_zero(), (s.F * s.H).is_zero()};
}

/// Exact value of delta + delta H delta + delta H delta H delta + ..., which is a
/// finite sum because each H delta factor raises the filtration.
inline GradedMap geometric_kernel(const GradedMap& delta, const GradedMap& h) {
  if (filtration_shift(delta) < 1)
    throw InvalidInput("geometric_kernel: perturbation has filtration shift 0; series would not converge");
  if (filtration_shift(h) < 0) throw InvalidInput("geometric_kernel: homotopy does not preserve the filtration");
  GradedMap sum = delta;
  GradedMap term = delta;
  const GradedMap hd = h * delta;
  const int bound = delta.source()->max_weight + 2;
  for (int k = 1;; ++k) {
    term = term * hd;
    if (term.is_zero()) break;
    if (k > bound) throw ConsistencyError("geometric_kernel: series failed to terminate");
    sum += term;
  }
  return sum;
}

/// Transfers a perturbation of d_M across SDR data satisfying the side conditions.
inline SdrData bpl_transfer(const SdrData& s, const Perturbation& p) {
  if (Report r = validate_sdr(s); !r.ok())
    throw InvalidInput("bpl_transfer: SDR identity violated: " + r.findings.front().check);
  if (!check_side_conditions(s).all()) throw InvalidInput("bpl_transfer: side conditions do not hold");
  if (!(p.base == s.M)) throw InvalidInput("bpl_transfer: perturbation is not based on M");
  if (Report r = validate_perturbation(p); !r.ok())
    throw InvalidInput("bpl_transfer: invalid perturbation: " + r.findings.front().check);

  const GradedMap k = geometric_kernel(p.delta, s.H);
  SdrData out;
  out.M = p.perturbed();
  out.N = s.N.perturbed(s.F * k * s.G);
  out.F = s.F + s.F * k * s.H;
  out.G = s.G + s.H * k * s.G;
  out.H = s.H + s.H * k * s.H;
  return out;
}

}  // namespace ipl
