#pragma once

// Concrete actions of Dif*Riso on a pair of complexes, and the perturbation
// pipelines built on them: perturbing a SHE through the retraction, solving the
// perturbation problem for homotopy equivalences, and the crude variant.

#include <algorithm>
#include <map>
#include <optional>
#include <string>

#include "ipl/chain.hpp"
#include "ipl/operad/verify.hpp"
#include "ipl/sdr.hpp"
#include "ipl/she.hpp"

namespace ipl {

/// Assignment of maps to generators: f_{2m} -> F_{2m}, f_{2m+1} -> H_{2m+1},
/// g_{2m} -> G_{2m}, g_{2m+1} -> L_{2m+1}, xbar -> the perturbation of d_M.
/// Color B is M and color W is N.
struct OperadAction {
  ChainComplex M;
  ChainComplex N;
  std::map<operad::Gen, GradedMap> assign;
  bool tail_is_zero = false;  // unassigned f_n, g_n act as 0
  operad::Ambient domain = operad::Ambient::DifRiso;

  static OperadAction from_she(const SheData& s, const GradedMap* delta = nullptr) {
    OperadAction a;
    a.M = s.M;
    a.N = s.N;
    a.tail_is_zero = s.tail_is_zero;
    for (int m = 0; m <= s.index_cap; ++m) {
      a.assign.emplace(operad::Gen::f(2 * m), s.F.at(m));
      a.assign.emplace(operad::Gen::f(2 * m + 1), s.H.at(m));
      a.assign.emplace(operad::Gen::g(2 * m), s.G.at(m));
      a.assign.emplace(operad::Gen::g(2 * m + 1), s.L.at(m));
    }
    a.assign.emplace(operad::Gen::xbar(), delta ? *delta : GradedMap(s.M.module, s.M.module, -1));
    return a;
  }

  const ChainComplex& complex(operad::Color c) const { return c == operad::Color::B ? M : N; }

  /// Map assigned to g; zero where the tail is zero or the Hom space is trivial.
  GradedMap lookup(const operad::Gen& g) const {
    if (auto it = assign.find(g); it != assign.end()) return it->second;
    const ModulePtr& src = complex(g.src()).module;
    const ModulePtr& dst = complex(g.dst()).module;
    const bool base = g.family == operad::Family::f || g.family == operad::Family::g;
    if ((tail_is_zero && base) || hom_dimension(*src, *dst, g.degree()) == 0)
      return GradedMap(src, dst, g.degree());
    throw InvalidInput("evaluate: unassigned generator " + g.token());
  }

  /// The action commutes with differentials on every assigned generator:
  /// evaluate(d z) = D(assign(z)) in the Hom complex of the unperturbed complexes.
  Report check_chain_map() const;
};

/// Word z1...zt goes to A(z1) o ... o A(zt).
inline GradedMap evaluate(const operad::Element& e, const OperadAction& act, operad::Color src,
                          operad::Color dst, int degree) {
  if (!operad::contained_in(e.ambient(), act.domain))
    throw InvalidInput(std::string("evaluate: element lives in ") + operad::ambient_name(e.ambient()) +
                       ", outside the action's domain");
  GradedMap out(act.complex(src).module, act.complex(dst).module, degree);
  std::map<operad::Gen, GradedMap> cache;
  auto map_of = [&](const operad::Gen& g) -> const GradedMap& {
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, act.lookup(g)).first;
    return it->second;
  };
  for (const auto& [w, c] : e.map()) {
    if (w.src() != src || w.dst() != dst || w.degree() != degree)
      throw InvalidInput("evaluate: term " + w.render() + " has the wrong colors or degree");
    if (w.is_identity()) {
      out += c * GradedMap::identity(act.complex(src).module);
      continue;
    }
    const auto& fs = w.factors();
    GradedMap acc = map_of(fs.back());
    for (std::size_t i = fs.size() - 1; i-- > 0 && !acc.is_zero();) acc = map_of(fs[i]) * acc;
    if (!acc.is_zero()) out += c * acc;
  }
  return out;
}

/// Colors and degree taken from the (nonzero, homogeneous) element.
inline GradedMap evaluate(const operad::Element& e, const OperadAction& act) {
  if (e.is_zero()) throw InvalidInput("evaluate: cannot infer the shape of the zero element");
  auto col = e.colors();
  if (!col) throw InvalidInput("evaluate: element is not color-homogeneous");
  const int deg = e.map().begin()->first.degree();
  return evaluate(e, act, col->first, col->second, deg);
}

inline Report OperadAction::check_chain_map() const {
  Report r;
  for (const auto& [g, phi] : assign) {
    const operad::Element z = operad::Element::gen(operad::Ambient::RisoTilde, g);
    const operad::Element dz = operad::standard_differential()(z).recast(domain);
    GradedMap lhs = evaluate(dz, *this, g.src(), g.dst(), g.degree() - 1);
    GradedMap rhs = hom_differential(complex(g.src()), complex(g.dst()), phi);
    expect_zero(r, "action commutes with d on " + g.token(), lhs - rhs);
  }
  return r;
}

/// A SHE between the perturbed complexes, obtained by E_in o r.
struct PerturbedShe {
  GradedMap d_N_tilde;
  SheData she;  // she.M, she.N carry the perturbed differentials
  operad::TruncationCaps caps;
};

namespace detail {

// Evaluates a truncated series exactly, after checking that the next band vanishes.
inline GradedMap evaluate_exact(const operad::Element& series, const OperadAction& act, int w, operad::Color src,
                                operad::Color dst, int degree) {
  if (!evaluate(series.fweight_band(w + 1), act, src, dst, degree).is_zero())
    throw InvalidInput("evaluate: caps insufficient for exact evaluation");
  return evaluate(series.truncated(w), act, src, dst, degree);
}

}  // namespace detail

/// Transfers a perturbation of d_M across a SHE: the tilde terms are the images of the
/// overlined generators under E_in o r.
inline PerturbedShe ipl_perturb(const SheData& she, const Perturbation& p) {
  using operad::Gen;
  if (Report r = validate_she(she); !r.ok())
    throw InvalidInput("ipl_perturb: invalid SHE: " + r.findings.front().check);
  if (!(p.base == she.M)) throw InvalidInput("ipl_perturb: perturbation is not based on M");
  if (Report r = validate_perturbation(p); !r.ok())
    throw InvalidInput("ipl_perturb: invalid perturbation: " + r.findings.front().check);
  const int out_cap = she.tail_is_zero ? she.index_cap : she.index_cap - 1;
  if (out_cap < 0)
    throw InvalidInput("ipl_perturb: a SHE of index cap >= 1 is needed (or one with zero tail)");

  const int w = std::max(she.M.module->max_weight, she.N.module->max_weight);
  const operad::Retraction r(w + 1);
  const OperadAction act = OperadAction::from_she(she, &p.delta);
  auto image = [&](Gen g) {
    return detail::evaluate_exact(r(operad::Element::gen(operad::Ambient::RisoTilde, g)), act, w, g.src(),
                                  g.dst(), g.degree());
  };

  PerturbedShe out;
  out.d_N_tilde = she.N.d + image(Gen::ybar());
  out.she.M = p.perturbed();
  out.she.N = ChainComplex(she.N.module, out.d_N_tilde);
  out.she.index_cap = out_cap;
  for (int m = 0; m <= out_cap; ++m) {
    out.she.F.push_back(she.F[m] + image(Gen::fbar(2 * m)));
    out.she.G.push_back(she.G[m] + image(Gen::gbar(2 * m)));
    out.she.H.push_back(she.H[m] + image(Gen::fbar(2 * m + 1)));
    out.she.L.push_back(she.L[m] + image(Gen::gbar(2 * m + 1)));
  }
  out.caps = {2 * out_cap + 1, 0, w, 0};
  if (Report rep = validate_she(out.she); !rep.ok())
    throw ConsistencyError("ipl_perturb: perturbed data violate " + rep.findings.front().check);
  return out;
}

enum class PpStrategy { ModifyH, ModifyL, AsIs };

inline const char* strategy_name(PpStrategy s) {
  switch (s) {
    case PpStrategy::ModifyH: return "modify-h";
    case PpStrategy::ModifyL: return "modify-l";
    case PpStrategy::AsIs: return "as-is";
  }
  return "?";
}

struct PpSolution {
  HeData reference;  // the quadruple actually perturbed (after the homotopy modification)
  HeData perturbed;  // (d~_M, d~_N, F~, G~, H~, L~)
  bool used_trivial_extension = false;
};

/// Solves the perturbation problem for a homotopy equivalence.
inline PpSolution solve_pp(const HeData& he, const Perturbation& p, PpStrategy strategy = PpStrategy::ModifyH) {
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("solve_pp: invalid homotopy equivalence: " + r.findings.front().check);
  PpSolution sol;
  switch (strategy) {
    case PpStrategy::ModifyH: sol.reference = modify_homotopy_H(he).he; break;
    case PpStrategy::ModifyL: sol.reference = modify_homotopy_L(he).he; break;
    case PpStrategy::AsIs:
      if (!obstruction_classes_linked(he)) throw ExtensionObstructed();
      sol.reference = he;
      break;
  }
  std::optional<SheData> she = trivial_extension(sol.reference, 1);
  sol.used_trivial_extension = she.has_value();
  if (!she) she = extend_to_she(sol.reference, 1);
  const PerturbedShe ps = ipl_perturb(*she, p);
  sol.perturbed = {ps.she.M, ps.she.N, ps.she.F[0], ps.she.G[0], ps.she.H[0], ps.she.L[0]};
  return sol;
}

struct CrudeResult {
  GradedMap d_N_tilde;
  GradedMap F;
  GradedMap G;
};

/// Perturbed chain maps that stay homotopy inverse; the homotopies are discarded.
inline CrudeResult crude_perturb(const HeData& he, const Perturbation& p) {
  PpSolution s = solve_pp(he, p, PpStrategy::ModifyH);
  return {s.perturbed.N.d, s.perturbed.F, s.perturbed.G};
}

}  // namespace ipl
