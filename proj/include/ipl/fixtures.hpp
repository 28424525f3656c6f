#pragma once

// Deterministic pseudo-random fixtures that are valid by construction.
//
// SDR: M = N + C where C is a sum of cones (a -> b, equal weights), F the projection,
// G the inclusion and H(b) = -a; then filtered unipotent changes of basis on M and N.
// Perturbation: delta = P d P^-1 - d with P = 1 + E, E strictly weight-raising.
// HE: the SDR twisted by boundaries D(X), D(Y) and by filtered D-cycles added to H and L.

#include <cstdint>
#include <random>
#include <vector>

#include "ipl/chain.hpp"
#include "ipl/exactlin.hpp"
#include "ipl/sdr.hpp"
#include "ipl/she.hpp"

namespace ipl {

struct FixtureShape {
  std::vector<std::size_t> ranks;  // ranks of N in degrees 0, 1, ...
  int filtration_length = 1;       // weights 0 .. filtration_length - 1
  std::size_t max_cone_pairs = 2;
};

struct Fixture {
  SdrData sdr;
  Perturbation perturbation;
  HeData he;
};

namespace detail {

class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }
  long long small() { return static_cast<long long>(below(3)) - 1; }  // -1, 0, 1

 private:
  std::mt19937_64 gen_;
};

// Degree-0 endomorphism E with E(i -> j) only if weight(j) > weight(i) (strict) or,
// when allow_equal, weight(j) >= weight(i) and j > i in (weight, index) order.
inline GradedMap random_nilpotent(const ModulePtr& m, FixtureRng& rng, bool strict) {
  GradedMap e(m, m, 0);
  for (int n = m->lo; n <= m->hi; ++n) {
    IntMatrix& b = e.block(n);
    for (std::size_t j = 0; j < m->rank(n); ++j)
      for (std::size_t i = 0; i < m->rank(n); ++i) {
        const int wi = m->weight(n, i), wj = m->weight(n, j);
        const bool ok = strict ? wi > wj : (wi > wj || (wi == wj && i > j));
        if (ok) b(i, j) = rng.small();
      }
  }
  return e;
}

// (1 + E)^-1 for nilpotent E.
inline GradedMap unipotent_inverse(const GradedMap& e) {
  const GradedMap id = GradedMap::identity(e.source());
  GradedMap inv = id;
  GradedMap term = id;
  for (;;) {
    term = -(term * e);
    if (term.is_zero()) break;
    inv += term;
  }
  return inv;
}

inline GradedMap random_filtered(const ModulePtr& a, const ModulePtr& b, int degree, FixtureRng& rng) {
  GradedMap x(a, b, degree);
  for (int n = a->lo; n <= a->hi; ++n) {
    if (!b->in_window(n + degree)) continue;
    IntMatrix& blk = x.block(n);
    for (std::size_t j = 0; j < blk.cols(); ++j)
      for (std::size_t i = 0; i < blk.rows(); ++i)
        if (b->weight(n + degree, i) >= a->weight(n, j) && rng.below(3) == 0) blk(i, j) = rng.small();
  }
  return x;
}

// A random filtered D-cycle in Hom_k(A, B): small combination of a kernel basis of D
// restricted to the filtered coordinates.
inline GradedMap random_filtered_cycle(const ChainComplex& a, const ChainComplex& b, int k, FixtureRng& rng) {
  const auto basis = hom_basis(*a.module, *b.module, k);
  const IntMatrix dm = hom_differential_matrix(a, b, k);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const auto& e = basis[c];
    if (b.module->weight(e.source_degree + k, e.target_index) >= a.module->weight(e.source_degree, e.source_index))
      cols.push_back(c);
  }
  GradedMap out(a.module, b.module, k);
  if (cols.empty()) return out;
  IntMatrix sub(dm.rows(), cols.size());
  for (std::size_t r = 0; r < dm.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) sub(r, c) = dm(r, cols[c]);
  const IntMatrix ker = kernel_basis(sub);
  IntVector v(basis.size());
  for (std::size_t t = 0; t < ker.cols(); ++t) {
    const long long s = rng.small();
    if (s == 0) continue;
    for (std::size_t c = 0; c < cols.size(); ++c) v[cols[c]] += s * ker(c, t);
  }
  return from_hom_vector(a.module, b.module, k, v);
}

}  // namespace detail

/// Same seed and shape give identical fixtures.
inline Fixture fixture_generate(std::uint64_t seed, const FixtureShape& shape) {
  if (shape.filtration_length < 1) throw InvalidInput("fixture: filtration length must be >= 1");
  detail::FixtureRng rng(seed);
  const int maxw = shape.filtration_length - 1;
  const int degrees = static_cast<int>(shape.ranks.size());
  std::size_t total = 0;
  for (auto r : shape.ranks) total += r;

  // N: free part plus its own (non-contracted) pairs d a = k b.
  std::vector<std::vector<int>> nw(std::max(degrees, 1));
  for (int n = 0; n < degrees; ++n)
    for (std::size_t i = 0; i < shape.ranks[n]; ++i) nw[n].push_back(int(rng.below(maxw + 1)));
  if (degrees == 0) nw.clear();
  const ModulePtr nmod = share(GradedModule::make(0, nw, maxw));
  GradedMap dn(nmod, nmod, -1);
  for (int n = 1; n < degrees; ++n) {
    // Pair basis 0 of degree n with basis 0 of degree n-1 when weights allow.
    if (nmod->rank(n) == 0 || nmod->rank(n - 1) == 0 || rng.below(2) == 0) continue;
    const std::size_t j = rng.below(nmod->rank(n));
    const std::size_t i = rng.below(nmod->rank(n - 1));
    if (nmod->weight(n - 1, i) < nmod->weight(n, j)) continue;
    // Keep d^2 = 0: only if column i of degree n-1 and row j of degree n+1 are unused.
    bool clash = !dn.block(n - 1).is_zero() || (n + 1 <= nmod->hi && !dn.block(n + 1).is_zero());
    if (clash) continue;
    dn.block(n)(i, j) = static_cast<long long>(rng.below(2) + 1);
  }

  // Cones: a in degree n+1, b in degree n, equal weights.
  struct Pair {
    int n;
    int w;
  };
  std::vector<Pair> pairs;
  const std::size_t npairs = total == 0 ? 0 : rng.below(shape.max_cone_pairs + 1);
  for (std::size_t p = 0; p < npairs; ++p)
    pairs.push_back({degrees <= 1 ? 0 : int(rng.below(degrees - 1)), int(rng.below(maxw + 1))});

  int mhi = degrees - 1;
  for (const auto& p : pairs) mhi = std::max(mhi, p.n + 1);
  std::vector<std::vector<int>> mw(mhi + 1);
  for (int n = 0; n < degrees; ++n) mw[n] = nw[n];
  struct Placed {
    int n;
    std::size_t a, b;
  };
  std::vector<Placed> placed;
  for (const auto& p : pairs) {
    std::size_t b = mw[p.n].size();
    mw[p.n].push_back(p.w);
    std::size_t a = mw[p.n + 1].size();
    mw[p.n + 1].push_back(p.w);
    placed.push_back({p.n, a, b});
  }
  const ModulePtr mmod = share(GradedModule::make(0, mw, maxw));

  GradedMap dm(mmod, mmod, -1), f(mmod, nmod, 0), g(nmod, mmod, 0), h(mmod, mmod, 1);
  for (int n = nmod->lo; n <= nmod->hi; ++n) {
    for (std::size_t i = 0; i < nmod->rank(n); ++i) {
      f.block(n)(i, i) = 1;
      g.block(n)(i, i) = 1;
    }
    const IntMatrix& src = dn.block_ref(n);
    for (std::size_t i = 0; i < src.rows(); ++i)
      for (std::size_t j = 0; j < src.cols(); ++j) dm.block(n)(i, j) = src(i, j);
  }
  for (const auto& p : placed) {
    dm.block(p.n + 1)(p.b, p.a) = 1;
    h.block(p.n)(p.a, p.b) = -1;
  }

  // Filtered unipotent changes of basis.
  const GradedMap en = detail::random_nilpotent(nmod, rng, false);
  const GradedMap pn = GradedMap::identity(nmod) + en, pn_inv = detail::unipotent_inverse(en);
  const GradedMap em = detail::random_nilpotent(mmod, rng, false);
  const GradedMap pm = GradedMap::identity(mmod) + em, pm_inv = detail::unipotent_inverse(em);

  Fixture fx;
  fx.sdr.N = ChainComplex(nmod, pn * dn * pn_inv);
  fx.sdr.M = ChainComplex(mmod, pm * dm * pm_inv);
  fx.sdr.F = pn * f * pm_inv;
  fx.sdr.G = pm * g * pn_inv;
  fx.sdr.H = pm * h * pm_inv;

  // Perturbation by a strictly weight-raising conjugation.
  const GradedMap ep = detail::random_nilpotent(mmod, rng, true);
  const GradedMap pp = GradedMap::identity(mmod) + ep, pp_inv = detail::unipotent_inverse(ep);
  fx.perturbation = {fx.sdr.M, pp * fx.sdr.M.d * pp_inv - fx.sdr.M.d};

  // Homotopy equivalence twist.
  const ChainComplex& M = fx.sdr.M;
  const ChainComplex& N = fx.sdr.N;
  const GradedMap x = detail::random_filtered(mmod, nmod, 1, rng);
  const GradedMap y = detail::random_filtered(nmod, mmod, 1, rng);
  HeData he = he_from_sdr(fx.sdr);
  he.F = fx.sdr.F + hom_differential(M, N, x);
  he.H = fx.sdr.H + fx.sdr.G * x;
  he.L = x * fx.sdr.G;
  he.G = fx.sdr.G + hom_differential(N, M, y);
  he.H += y * he.F;
  he.L += he.F * y;
  he.H += detail::random_filtered_cycle(M, M, 1, rng);
  he.L += detail::random_filtered_cycle(N, N, 1, rng);
  fx.he = he;
  return fx;
}

/// d = 0 on M = N = Z{v (degree 0), u (degree 1)}, F = G = 1, H = 0, L(v) = u.
inline HeData obstruction_fixture() {
  const ModulePtr m = share(GradedModule::unfiltered(0, {1, 1}));
  HeData he;
  he.M = ChainComplex::zero_differential(m);
  he.N = ChainComplex::zero_differential(m);
  he.F = GradedMap::identity(m);
  he.G = GradedMap::identity(m);
  he.H = GradedMap(m, m, 1);
  he.L = GradedMap(m, m, 1);
  he.L.block(0)(0, 0) = 1;
  return he;
}

}  // namespace ipl
