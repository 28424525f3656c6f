#pragma once

// Homotopy equivalences, strong homotopy equivalences (SHE), their obstruction
// cycles, homotopy modifications that kill the obstruction, and the inductive
// extension of a homotopy equivalence to a SHE.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ipl/chain.hpp"
#include "ipl/errors.hpp"
#include "ipl/exactlin.hpp"
#include "ipl/sdr.hpp"

namespace ipl {

/// (F, G, H, L) with F, G chain maps, G F - 1 = D(H) and F G - 1 = D(L).
struct HeData {
  ChainComplex M;
  ChainComplex N;
  GradedMap F;  // M -> N, degree 0
  GradedMap G;  // N -> M, degree 0
  GradedMap H;  // M -> M, degree +1
  GradedMap L;  // N -> N, degree +1
};

inline HeData he_from_sdr(const SdrData& s) {
  return {s.M, s.N, s.F, s.G, s.H, GradedMap(s.N.module, s.N.module, 1)};
}

inline Report validate_he(const HeData& he) {
  Report r;
  r.merge(validate_complex(he.M), "M: ");
  r.merge(validate_complex(he.N), "N: ");
  const ModulePtr& m = he.M.module;
  const ModulePtr& n = he.N.module;
  if (!detail::has_shape(he.F, m, n, 0)) r.add("shape", "F must be a degree 0 map M -> N");
  if (!detail::has_shape(he.G, n, m, 0)) r.add("shape", "G must be a degree 0 map N -> M");
  if (!detail::has_shape(he.H, m, m, 1)) r.add("shape", "H must be a degree +1 map M -> M");
  if (!detail::has_shape(he.L, n, n, 1)) r.add("shape", "L must be a degree +1 map N -> N");
  if (!r.ok()) return r;
  const GradedMap& dm = he.M.d;
  const GradedMap& dn = he.N.d;
  expect_zero(r, "F d_M = d_N F", he.F * dm - dn * he.F);
  expect_zero(r, "G d_N = d_M G", he.G * dn - dm * he.G);
  expect_zero(r, "G F - 1 = d_M H + H d_M", he.G * he.F - GradedMap::identity(m) - dm * he.H - he.H * dm);
  expect_zero(r, "F G - 1 = d_N L + L d_N", he.F * he.G - GradedMap::identity(n) - dn * he.L - he.L * dn);
  expect_filtered(r, "F", he.F);
  expect_filtered(r, "G", he.G);
  expect_filtered(r, "H", he.H);
  expect_filtered(r, "L", he.L);
  return r;
}

/// Families F_{2m}, G_{2m}, H_{2m+1}, L_{2m+1} for 0 <= m <= index_cap.
/// When tail_is_zero is set, every term beyond the cap is the zero map.
struct SheData {
  ChainComplex M;
  ChainComplex N;
  int index_cap = 0;
  std::vector<GradedMap> F;  // F[m] = F_{2m}
  std::vector<GradedMap> G;  // G[m] = G_{2m}
  std::vector<GradedMap> H;  // H[m] = H_{2m+1}
  std::vector<GradedMap> L;  // L[m] = L_{2m+1}
  bool tail_is_zero = false;

  HeData base() const { return {M, N, F.at(0), G.at(0), H.at(0), L.at(0)}; }

  static SheData from_he(const HeData& he) {
    return {he.M, he.N, 0, {he.F}, {he.G}, {he.H}, {he.L}, false};
  }
};

namespace detail {

// Right-hand sides of the SHE axioms at level m, built from the lower terms.
inline GradedMap she_rhs_f(const SheData& s, int m) {
  GradedMap r(s.M.module, s.N.module, 2 * m - 1);
  for (int i = 0; i < m; ++i) r += s.F[i] * s.H[m - i - 1] - s.L[m - i - 1] * s.F[i];
  return r;
}
inline GradedMap she_rhs_g(const SheData& s, int m) {
  GradedMap r(s.N.module, s.M.module, 2 * m - 1);
  for (int i = 0; i < m; ++i) r += s.G[i] * s.L[m - i - 1] - s.H[m - i - 1] * s.G[i];
  return r;
}
inline GradedMap she_rhs_h(const SheData& s, int m) {
  GradedMap r(s.M.module, s.M.module, 2 * m);
  for (int j = 0; j <= m; ++j) r += s.G[j] * s.F[m - j];
  for (int j = 0; j < m; ++j) r -= s.H[j] * s.H[m - j - 1];
  if (m == 0) r -= GradedMap::identity(s.M.module);
  return r;
}
inline GradedMap she_rhs_l(const SheData& s, int m) {
  GradedMap r(s.N.module, s.N.module, 2 * m);
  for (int j = 0; j <= m; ++j) r += s.F[j] * s.G[m - j];
  for (int j = 0; j < m; ++j) r -= s.L[j] * s.L[m - j - 1];
  if (m == 0) r -= GradedMap::identity(s.N.module);
  return r;
}

inline std::string idx(int n) { return std::to_string(n); }

}  // namespace detail

/// Checks all 4 (index_cap + 1) axioms exactly.
inline Report validate_she(const SheData& s) {
  Report r;
  r.merge(validate_complex(s.M), "M: ");
  r.merge(validate_complex(s.N), "N: ");
  const auto count = static_cast<std::size_t>(s.index_cap + 1);
  if (s.index_cap < 0 || s.F.size() != count || s.G.size() != count || s.H.size() != count ||
      s.L.size() != count) {
    r.add("shape", "family lengths do not match index_cap");
    return r;
  }
  const ModulePtr& m = s.M.module;
  const ModulePtr& n = s.N.module;
  for (int k = 0; k <= s.index_cap; ++k) {
    if (!detail::has_shape(s.F[k], m, n, 2 * k)) r.add("shape", "F_" + detail::idx(2 * k));
    if (!detail::has_shape(s.G[k], n, m, 2 * k)) r.add("shape", "G_" + detail::idx(2 * k));
    if (!detail::has_shape(s.H[k], m, m, 2 * k + 1)) r.add("shape", "H_" + detail::idx(2 * k + 1));
    if (!detail::has_shape(s.L[k], n, n, 2 * k + 1)) r.add("shape", "L_" + detail::idx(2 * k + 1));
  }
  if (!r.ok()) return r;
  for (int k = 0; k <= s.index_cap; ++k) {
    const std::string e = detail::idx(2 * k), o = detail::idx(2 * k + 1);
    expect_zero(r, "d_N F_" + e + " - F_" + e + " d_M",
                hom_differential(s.M, s.N, s.F[k]) - detail::she_rhs_f(s, k));
    expect_zero(r, "d_M G_" + e + " - G_" + e + " d_N",
                hom_differential(s.N, s.M, s.G[k]) - detail::she_rhs_g(s, k));
    expect_zero(r, "d_M H_" + o + " + H_" + o + " d_M",
                hom_differential(s.M, s.M, s.H[k]) - detail::she_rhs_h(s, k));
    expect_zero(r, "d_N L_" + o + " + L_" + o + " d_N",
                hom_differential(s.N, s.N, s.L[k]) - detail::she_rhs_l(s, k));
    expect_filtered(r, "F_" + e, s.F[k]);
    expect_filtered(r, "G_" + e, s.G[k]);
    expect_filtered(r, "H_" + o, s.H[k]);
    expect_filtered(r, "L_" + o, s.L[k]);
  }
  return r;
}

/// Coordinates of Hom_k(A, B) whose basis maps preserve the filtration.
inline std::vector<std::size_t> filtered_coordinates(const GradedModule& a, const GradedModule& b, int k) {
  std::vector<std::size_t> cols;
  const auto basis = hom_basis(a, b, k);
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const auto& e = basis[c];
    if (b.weight(e.source_degree + k, e.target_index) >= a.weight(e.source_degree, e.source_index))
      cols.push_back(c);
  }
  return cols;
}

namespace detail {
// Solves A x = b with x supported on `cols`; returns x in full coordinates.
inline std::optional<IntVector> solve_on_columns(const IntMatrix& a, const std::vector<std::size_t>& cols,
                                                 const IntVector& b) {
  IntMatrix sub(a.rows(), cols.size());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = a(r, cols[c]);
  auto y = solve_integer(sub, b);
  if (!y) return std::nullopt;
  IntVector x(a.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) x[cols[c]] = (*y)[c];
  return x;
}
}  // namespace detail

/// Some filtration-preserving psi with D(psi) = cycle in Hom(A, B), using the
/// canonical integral solution.
inline std::optional<GradedMap> bounding_element(const ChainComplex& a, const ChainComplex& b,
                                                 const GradedMap& cycle) {
  const int k = cycle.degree() + 1;
  const IntMatrix dm = hom_differential_matrix(a, b, k);
  auto x = detail::solve_on_columns(dm, filtered_coordinates(*a.module, *b.module, k), to_hom_vector(cycle));
  if (!x) return std::nullopt;
  return from_hom_vector(a.module, b.module, k, *x);
}

struct ObstructionPair {
  GradedMap o_M;  // F H - L F : M -> N, degree 1
  GradedMap o_N;  // G L - H G : N -> M, degree 1
  bool class_M_vanishes = false;
  bool class_N_vanishes = false;
  std::optional<GradedMap> witness_M;  // D(witness_M) = o_M
  std::optional<GradedMap> witness_N;
};

inline ObstructionPair obstruction_cycles(const HeData& he) {
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("obstruction_cycles: invalid homotopy equivalence: " + r.findings.front().check);
  ObstructionPair p;
  p.o_M = he.F * he.H - he.L * he.F;
  p.o_N = he.G * he.L - he.H * he.G;
  if (!hom_differential(he.M, he.N, p.o_M).is_zero())
    throw ConsistencyError("obstruction cycle o_M is not a D-cycle");
  if (!hom_differential(he.N, he.M, p.o_N).is_zero())
    throw ConsistencyError("obstruction cycle o_N is not a D-cycle");
  p.witness_M = bounding_element(he.M, he.N, p.o_M);
  p.witness_N = bounding_element(he.N, he.M, p.o_N);
  p.class_M_vanishes = p.witness_M.has_value();
  p.class_N_vanishes = p.witness_N.has_value();
  return p;
}

/// The two obstruction classes vanish together; returns whether they do.
inline bool obstruction_classes_linked(const HeData& he) {
  const ObstructionPair p = obstruction_cycles(he);
  if (p.class_M_vanishes != p.class_N_vanishes)
    throw ConsistencyError("obstruction classes disagree: [o_M] " +
                           std::string(p.class_M_vanishes ? "vanishes" : "nonzero") + ", [o_N] " +
                           (p.class_N_vanishes ? "vanishes" : "nonzero"));
  return p.class_M_vanishes;
}

/// Output of a homotopy modification, with explicit bounding elements for both new cycles.
struct ModifiedHe {
  HeData he;
  ObstructionPair obstruction;
};

namespace detail {
inline ObstructionPair explicit_obstruction(const HeData& he, GradedMap wm, GradedMap wn) {
  ObstructionPair p;
  p.o_M = he.F * he.H - he.L * he.F;
  p.o_N = he.G * he.L - he.H * he.G;
  if (!(hom_differential(he.M, he.N, wm) == p.o_M))
    throw ConsistencyError("explicit witness does not bound o_M");
  if (!(hom_differential(he.N, he.M, wn) == p.o_N))
    throw ConsistencyError("explicit witness does not bound o_N");
  p.class_M_vanishes = p.class_N_vanishes = true;
  p.witness_M = std::move(wm);
  p.witness_N = std::move(wn);
  return p;
}
}  // namespace detail

/// H' = H - G (F H - L F).
inline ModifiedHe modify_homotopy_H(const HeData& he) {
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("modify_homotopy_H: invalid homotopy equivalence: " + r.findings.front().check);
  const GradedMap o_m = he.F * he.H - he.L * he.F;
  HeData out = he;
  out.H = he.H - he.G * o_m;
  GradedMap wm = -(he.L * o_m);
  GradedMap wn = he.H * he.H * he.G + he.G * he.L * he.L - he.H * he.G * he.L;
  ObstructionPair p = detail::explicit_obstruction(out, std::move(wm), std::move(wn));
  return {std::move(out), std::move(p)};
}

/// L' = L - F (G L - H G).
inline ModifiedHe modify_homotopy_L(const HeData& he) {
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("modify_homotopy_L: invalid homotopy equivalence: " + r.findings.front().check);
  const GradedMap o_n = he.G * he.L - he.H * he.G;
  HeData out = he;
  out.L = he.L - he.F * o_n;
  GradedMap wn = -(he.H * o_n);
  GradedMap wm = he.L * he.L * he.F + he.F * he.H * he.H - he.L * he.F * he.H;
  ObstructionPair p = detail::explicit_obstruction(out, std::move(wm), std::move(wn));
  return {std::move(out), std::move(p)};
}

/// The SHE with all higher terms zero; exists iff o_M = o_N = 0, HH = 0 and LL = 0.
inline std::optional<SheData> trivial_extension(const HeData& he, int index_cap = 1) {
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("trivial_extension: invalid homotopy equivalence: " + r.findings.front().check);
  if (index_cap < 0) throw InvalidInput("trivial_extension: negative index cap");
  if (!(he.F * he.H - he.L * he.F).is_zero() || !(he.G * he.L - he.H * he.G).is_zero() ||
      !(he.H * he.H).is_zero() || !(he.L * he.L).is_zero())
    return std::nullopt;
  SheData s = SheData::from_he(he);
  for (int m = 1; m <= index_cap; ++m) {
    s.F.emplace_back(he.M.module, he.N.module, 2 * m);
    s.G.emplace_back(he.N.module, he.M.module, 2 * m);
    s.H.emplace_back(he.M.module, he.M.module, 2 * m + 1);
    s.L.emplace_back(he.N.module, he.N.module, 2 * m + 1);
  }
  s.index_cap = index_cap;
  s.tail_is_zero = true;
  return s;
}

namespace detail {

// Matrix of a linear map Hom_k(A,B) -> Hom_j(C,D) given as a function on graded maps.
inline IntMatrix operator_matrix(const ModulePtr& a, const ModulePtr& b, int k, std::size_t out_dim,
                                 const std::function<GradedMap(const GradedMap&)>& op) {
  const std::size_t dim = hom_dimension(*a, *b, k);
  IntMatrix m(out_dim, dim);
  IntVector unit(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    unit[c] = 1;
    IntVector image = to_hom_vector(op(from_hom_vector(a, b, k, unit)));
    unit[c] = 0;
    for (std::size_t r = 0; r < out_dim; ++r) m(r, c) = image[r];
  }
  return m;
}

inline void place(IntMatrix& big, const IntMatrix& block, std::size_t row0, std::size_t col0) {
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) big(row0 + i, col0 + j) = block(i, j);
}

// One unknown of the joint recalibration system: an element of Hom_k(A, B).
struct Unknown {
  const ChainComplex* a;
  const ChainComplex* b;
  int k;
  std::size_t dim() const { return hom_dimension(*a->module, *b->module, k); }
};

// Solves, for unknowns X, Y (top terms) and cycles phi, psi (corrections to the
// previous level), the system
//   D X + ops[0](phi) + ops[1](psi) = rhs_x,
//   D Y + ops[2](phi) + ops[3](psi) = rhs_y,
//   D phi = 0, D psi = 0.
struct JointSolution {
  GradedMap x, y, phi, psi;
};

inline std::optional<JointSolution> solve_recalibration(
    Unknown ux, Unknown uy, Unknown uphi, Unknown upsi, const GradedMap& rhs_x, const GradedMap& rhs_y,
    const std::function<GradedMap(const GradedMap&)>& x_from_phi,
    const std::function<GradedMap(const GradedMap&)>& x_from_psi,
    const std::function<GradedMap(const GradedMap&)>& y_from_phi,
    const std::function<GradedMap(const GradedMap&)>& y_from_psi) {
  const std::size_t rx = hom_dimension(*ux.a->module, *ux.b->module, ux.k - 1);
  const std::size_t ry = hom_dimension(*uy.a->module, *uy.b->module, uy.k - 1);
  const std::size_t rphi = hom_dimension(*uphi.a->module, *uphi.b->module, uphi.k - 1);
  const std::size_t rpsi = hom_dimension(*upsi.a->module, *upsi.b->module, upsi.k - 1);
  const std::size_t cx = ux.dim(), cy = uy.dim(), cphi = uphi.dim(), cpsi = upsi.dim();

  IntMatrix sys(rx + ry + rphi + rpsi, cx + cy + cphi + cpsi);
  place(sys, hom_differential_matrix(*ux.a, *ux.b, ux.k), 0, 0);
  place(sys, hom_differential_matrix(*uy.a, *uy.b, uy.k), rx, cx);
  place(sys, operator_matrix(uphi.a->module, uphi.b->module, uphi.k, rx, x_from_phi), 0, cx + cy);
  place(sys, operator_matrix(upsi.a->module, upsi.b->module, upsi.k, rx, x_from_psi), 0, cx + cy + cphi);
  place(sys, operator_matrix(uphi.a->module, uphi.b->module, uphi.k, ry, y_from_phi), rx, cx + cy);
  place(sys, operator_matrix(upsi.a->module, upsi.b->module, upsi.k, ry, y_from_psi), rx, cx + cy + cphi);
  place(sys, hom_differential_matrix(*uphi.a, *uphi.b, uphi.k), rx + ry, cx + cy);
  place(sys, hom_differential_matrix(*upsi.a, *upsi.b, upsi.k), rx + ry + rphi, cx + cy + cphi);

  IntVector rhs = to_hom_vector(rhs_x);
  for (auto& v : to_hom_vector(rhs_y)) rhs.push_back(v);
  rhs.resize(sys.rows());
  std::vector<std::size_t> cols;
  std::size_t offset = 0;
  for (const Unknown* u : {&ux, &uy, &uphi, &upsi}) {
    for (std::size_t c : filtered_coordinates(*u->a->module, *u->b->module, u->k)) cols.push_back(offset + c);
    offset += u->dim();
  }
  auto sol = solve_on_columns(sys, cols, rhs);
  if (!sol) return std::nullopt;
  return JointSolution{from_hom_vector(ux.a->module, ux.b->module, ux.k, *sol, 0),
                       from_hom_vector(uy.a->module, uy.b->module, uy.k, *sol, cx),
                       from_hom_vector(uphi.a->module, uphi.b->module, uphi.k, *sol, cx + cy),
                       from_hom_vector(upsi.a->module, upsi.b->module, upsi.k, *sol, cx + cy + cphi)};
}

}  // namespace detail

/// Extends a valid SHE to a larger index cap. At each new level the top terms are
/// obtained by solving D(X) = (axiom right-hand side) over Z; if that fails, the
/// previous level is recalibrated by D-cycles and the joint system is solved instead.
inline SheData extend_she(const SheData& start, int index_cap) {
  if (Report r = validate_she(start); !r.ok())
    throw InvalidInput("extend_she: invalid input SHE: " + r.findings.front().check);
  SheData s = start;
  if (index_cap <= s.index_cap) return s;
  s.tail_is_zero = false;
  const ChainComplex& M = s.M;
  const ChainComplex& N = s.N;

  for (int n = 2 * s.index_cap + 2; n <= 2 * index_cap + 1; ++n) {
    if (n % 2 == 0) {
      const int m = n / 2;
      const GradedMap rf = detail::she_rhs_f(s, m);
      const GradedMap rg = detail::she_rhs_g(s, m);
      auto x = bounding_element(M, N, rf);
      auto y = bounding_element(N, M, rg);
      if (x && y) {
        s.F.push_back(std::move(*x));
        s.G.push_back(std::move(*y));
        continue;
      }
      if (m == 1) throw ExtensionObstructed("obstruction class of the homotopy equivalence is nonzero");
      // Recalibrate H_{2m-1} += phi, L_{2m-1} += psi.
      const GradedMap& f0 = s.F[0];
      const GradedMap& g0 = s.G[0];
      auto sol = detail::solve_recalibration(
          {&M, &N, n}, {&N, &M, n}, {&M, &M, n - 1}, {&N, &N, n - 1}, rf, rg,
          [&](const GradedMap& phi) { return -(f0 * phi); }, [&](const GradedMap& psi) { return psi * f0; },
          [&](const GradedMap& phi) { return phi * g0; }, [&](const GradedMap& psi) { return -(g0 * psi); });
      if (!sol) throw ConsistencyError("recalibration system unsolvable at level " + std::to_string(n));
      s.H[m - 1] += sol->phi;
      s.L[m - 1] += sol->psi;
      s.F.push_back(std::move(sol->x));
      s.G.push_back(std::move(sol->y));
    } else {
      const int m = (n - 1) / 2;
      const GradedMap rh = detail::she_rhs_h(s, m);
      const GradedMap rl = detail::she_rhs_l(s, m);
      auto x = bounding_element(M, M, rh);
      auto y = bounding_element(N, N, rl);
      if (x && y) {
        s.H.push_back(std::move(*x));
        s.L.push_back(std::move(*y));
        s.index_cap = m;
        continue;
      }
      // Recalibrate F_{2m} += phi, G_{2m} += psi.
      const GradedMap& f0 = s.F[0];
      const GradedMap& g0 = s.G[0];
      auto sol = detail::solve_recalibration(
          {&M, &M, n}, {&N, &N, n}, {&M, &N, n - 1}, {&N, &M, n - 1}, rh, rl,
          [&](const GradedMap& phi) { return -(g0 * phi); }, [&](const GradedMap& psi) { return -(psi * f0); },
          [&](const GradedMap& phi) { return -(phi * g0); }, [&](const GradedMap& psi) { return -(f0 * psi); });
      if (!sol) throw ConsistencyError("recalibration system unsolvable at level " + std::to_string(n));
      s.F[m] += sol->phi;
      s.G[m] += sol->psi;
      s.H.push_back(std::move(sol->x));
      s.L.push_back(std::move(sol->y));
      s.index_cap = m;
    }
  }
  return s;
}

/// Extends a homotopy equivalence with vanishing obstruction class to a SHE.
inline SheData extend_to_she(const HeData& he, int index_cap) {
  if (index_cap < 0) throw InvalidInput("extend_to_she: negative index cap");
  if (Report r = validate_he(he); !r.ok())
    throw InvalidInput("extend_to_she: invalid homotopy equivalence: " + r.findings.front().check);
  SheData s = SheData::from_he(he);
  if (index_cap == 0) return s;
  if (!obstruction_classes_linked(he)) throw ExtensionObstructed();
  return extend_she(s, index_cap);
}

}  // namespace ipl
