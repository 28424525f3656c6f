#pragma once

// Filtered chain complexes of finitely generated free Z-modules, graded maps
// between them, and slices of the Hom complex.
//
// Grading is homological: differentials have degree -1. A basis element of
// weight w lies in F^p for all p <= w; the filtration has finite length, so
// F^p = 0 for p > max_weight.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ipl/errors.hpp"
#include "ipl/exactlin.hpp"

namespace ipl {

/// Graded free module with a filtration weight on each basis element.
struct GradedModule {
  int lo = 0;
  int hi = -1;  // empty window when hi < lo
  std::vector<std::vector<int>> weights;  // weights[n - lo][i]
  int max_weight = 0;

  static GradedModule make(int lo, const std::vector<std::vector<int>>& weights, int max_weight) {
    GradedModule m;
    m.lo = lo;
    m.hi = lo + static_cast<int>(weights.size()) - 1;
    m.weights = weights;
    m.max_weight = max_weight;
    return m;
  }
  /// All basis elements in weight 0.
  static GradedModule unfiltered(int lo, const std::vector<std::size_t>& ranks) {
    std::vector<std::vector<int>> w;
    for (auto r : ranks) w.emplace_back(r, 0);
    return make(lo, w, 0);
  }

  bool in_window(int n) const { return n >= lo && n <= hi; }
  std::size_t rank(int n) const { return in_window(n) ? weights[n - lo].size() : 0; }
  int weight(int n, std::size_t i) const { return weights[n - lo][i]; }
  std::size_t total_rank() const {
    std::size_t r = 0;
    for (const auto& w : weights) r += w.size();
    return r;
  }

  friend bool operator==(const GradedModule&, const GradedModule&) = default;
};

using ModulePtr = std::shared_ptr<const GradedModule>;

inline ModulePtr share(GradedModule m) { return std::make_shared<const GradedModule>(std::move(m)); }

inline bool same_module(const ModulePtr& a, const ModulePtr& b) { return a == b || *a == *b; }

/// Degree-d map between graded modules, one block per source degree.
class GradedMap {
 public:
  GradedMap() = default;
  GradedMap(ModulePtr src, ModulePtr dst, int degree)
      : src_(std::move(src)), dst_(std::move(dst)), degree_(degree) {
    for (int n = src_->lo; n <= src_->hi; ++n)
      blocks_.emplace_back(dst_->rank(n + degree_), src_->rank(n));
  }

  static GradedMap identity(const ModulePtr& m) {
    GradedMap id(m, m, 0);
    for (int n = m->lo; n <= m->hi; ++n) id.block(n) = IntMatrix::identity(m->rank(n));
    return id;
  }

  const ModulePtr& source() const { return src_; }
  const ModulePtr& target() const { return dst_; }
  int degree() const { return degree_; }

  /// Block from source degree n into target degree n + degree(). Outside the
  /// source window this is an empty matrix of the right shape.
  IntMatrix block(int n) const {
    if (!src_->in_window(n)) return IntMatrix(dst_->rank(n + degree_), 0);
    return blocks_[n - src_->lo];
  }
  IntMatrix& block(int n) {
    if (!src_->in_window(n)) throw InvalidInput("GradedMap: degree outside source window");
    return blocks_[n - src_->lo];
  }
  const IntMatrix& block_ref(int n) const { return blocks_[n - src_->lo]; }

  bool is_zero() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const IntMatrix& b) { return b.is_zero(); });
  }

  bool compatible(const GradedMap& o) const {
    return degree_ == o.degree_ && same_module(src_, o.src_) && same_module(dst_, o.dst_);
  }

  GradedMap& operator+=(const GradedMap& o) {
    require_compatible(o, "+");
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
    return *this;
  }
  GradedMap& operator-=(const GradedMap& o) {
    require_compatible(o, "-");
    for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
    return *this;
  }
  GradedMap& operator*=(const Integer& s) {
    for (auto& b : blocks_) b *= s;
    return *this;
  }

  friend GradedMap operator+(GradedMap a, const GradedMap& b) { return a += b; }
  friend GradedMap operator-(GradedMap a, const GradedMap& b) { return a -= b; }
  friend GradedMap operator-(GradedMap a) { return a *= Integer(-1); }
  friend GradedMap operator*(const Integer& s, GradedMap a) { return a *= s; }

  /// Composition: (f * g)(x) = f(g(x)).
  friend GradedMap operator*(const GradedMap& f, const GradedMap& g) {
    if (!same_module(g.dst_, f.src_)) throw InvalidInput("compose: target of g is not source of f");
    GradedMap c(g.src_, f.dst_, f.degree_ + g.degree_);
    for (int n = g.src_->lo; n <= g.src_->hi; ++n) {
      const int mid = n + g.degree_;
      if (!f.src_->in_window(mid)) continue;
      const IntMatrix& gb = g.block_ref(n);
      const IntMatrix& fb = f.block_ref(mid);
      if (gb.empty() || fb.empty()) continue;
      c.block(n) = fb * gb;
    }
    return c;
  }

  friend bool operator==(const GradedMap& a, const GradedMap& b) {
    return a.compatible(b) && a.blocks_ == b.blocks_;
  }

  /// First nonzero entry as (source degree, row, col).
  std::optional<std::tuple<int, std::size_t, std::size_t>> first_nonzero() const {
    for (int n = src_->lo; n <= src_->hi; ++n)
      if (auto at = block_ref(n).first_nonzero()) return std::tuple{n, at->first, at->second};
    return std::nullopt;
  }

 private:
  void require_compatible(const GradedMap& o, const char* op) const {
    if (!compatible(o)) throw InvalidInput(std::string("GradedMap: incompatible operands for ") + op);
  }

  ModulePtr src_;
  ModulePtr dst_;
  int degree_ = 0;
  std::vector<IntMatrix> blocks_;
};

inline GradedMap zero_map(const ModulePtr& src, const ModulePtr& dst, int degree) {
  return GradedMap(src, dst, degree);
}

/// Filtered module together with a degree -1 differential.
struct ChainComplex {
  ModulePtr module;
  GradedMap d;

  ChainComplex() = default;
  ChainComplex(ModulePtr m, GradedMap diff) : module(std::move(m)), d(std::move(diff)) {
    if (d.degree() != -1 || !same_module(d.source(), module) || !same_module(d.target(), module))
      throw InvalidInput("ChainComplex: differential must be a degree -1 endomorphism of the module");
  }
  static ChainComplex zero_differential(const ModulePtr& m) { return ChainComplex(m, GradedMap(m, m, -1)); }

  /// Same module, differential d + delta.
  ChainComplex perturbed(const GradedMap& delta) const { return ChainComplex(module, d + delta); }

  friend bool operator==(const ChainComplex& a, const ChainComplex& b) {
    return same_module(a.module, b.module) && a.d == b.d;
  }
};

/// Largest q with f(F^p) in F^{p+q} for all p; for the zero map, max_weight + 1.
inline int filtration_shift(const GradedMap& f) {
  const int top = std::max(f.source()->max_weight, f.target()->max_weight) + 1;
  int shift = std::numeric_limits<int>::max();
  const auto& src = *f.source();
  const auto& dst = *f.target();
  for (int n = src.lo; n <= src.hi; ++n) {
    const IntMatrix& b = f.block_ref(n);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(i, j) != 0) shift = std::min(shift, dst.weight(n + f.degree(), i) - src.weight(n, j));
  }
  return shift == std::numeric_limits<int>::max() ? top : shift;
}

/// g is a perturbation of f: the difference raises filtration by at least one.
inline bool is_perturbation(const GradedMap& f, const GradedMap& g) {
  if (!f.compatible(g)) throw InvalidInput("is_perturbation: maps differ in source, target or degree");
  return filtration_shift(f - g) >= 1;
}

/// Hom-complex differential D(phi) = d_B phi - (-1)^|phi| phi d_A for phi: A -> B.
inline GradedMap hom_differential(const ChainComplex& a, const ChainComplex& b, const GradedMap& phi) {
  GradedMap out = b.d * phi;
  if (phi.degree() % 2 == 0)
    out -= phi * a.d;
  else
    out += phi * a.d;
  return out;
}

inline Report validate_complex(const ChainComplex& c) {
  Report r;
  const auto& m = *c.module;
  for (int n = m.lo; n <= m.hi; ++n)
    for (std::size_t i = 0; i < m.rank(n); ++i) {
      int w = m.weight(n, i);
      if (w < 0 || w > m.max_weight)
        r.add("weight range", "degree " + std::to_string(n) + " basis " + std::to_string(i) +
                                  " has weight " + std::to_string(w));
    }
  const GradedMap dd = c.d * c.d;
  for (int n = m.lo; n <= m.hi; ++n) {
    if (auto at = dd.block_ref(n).first_nonzero())
      r.add("d^2 = 0", "degree " + std::to_string(n) + " entry (" + std::to_string(at->first) + "," +
                           std::to_string(at->second) + ")");
  }
  for (int n = m.lo; n <= m.hi; ++n) {
    const IntMatrix& b = c.d.block_ref(n);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (b(i, j) != 0 && m.weight(n - 1, i) < m.weight(n, j))
          r.add("filtration", "degree " + std::to_string(n) + ": basis " + std::to_string(j) +
                                  " (weight " + std::to_string(m.weight(n, j)) + ") hits basis " +
                                  std::to_string(i) + " of degree " + std::to_string(n - 1) +
                                  " (weight " + std::to_string(m.weight(n - 1, i)) + ")");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Hom complex

/// Elementary map sending basis j of A_n to basis i of B_{n+k}.
struct HomBasisElement {
  int source_degree;
  std::size_t source_index;
  std::size_t target_index;
  friend bool operator==(const HomBasisElement&, const HomBasisElement&) = default;
};

/// Basis of Hom_k(A, B), ordered lexicographically by (source degree, source index, target index).
inline std::vector<HomBasisElement> hom_basis(const GradedModule& a, const GradedModule& b, int k) {
  std::vector<HomBasisElement> basis;
  for (int n = a.lo; n <= a.hi; ++n)
    for (std::size_t j = 0; j < a.rank(n); ++j)
      for (std::size_t i = 0; i < b.rank(n + k); ++i) basis.push_back({n, j, i});
  return basis;
}

inline std::size_t hom_dimension(const GradedModule& a, const GradedModule& b, int k) {
  std::size_t dim = 0;
  for (int n = a.lo; n <= a.hi; ++n) dim += a.rank(n) * b.rank(n + k);
  return dim;
}

inline IntVector to_hom_vector(const GradedMap& f) {
  IntVector v;
  const auto& a = *f.source();
  for (int n = a.lo; n <= a.hi; ++n) {
    const IntMatrix& b = f.block_ref(n);
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t i = 0; i < b.rows(); ++i) v.push_back(b(i, j));
  }
  return v;
}

inline GradedMap from_hom_vector(const ModulePtr& a, const ModulePtr& b, int k, const IntVector& v,
                                 std::size_t offset = 0) {
  GradedMap f(a, b, k);
  std::size_t pos = offset;
  for (int n = a->lo; n <= a->hi; ++n) {
    IntMatrix& blk = f.block(n);
    for (std::size_t j = 0; j < blk.cols(); ++j)
      for (std::size_t i = 0; i < blk.rows(); ++i) {
        if (pos >= v.size()) throw InvalidInput("from_hom_vector: vector too short");
        blk(i, j) = v[pos++];
      }
  }
  return f;
}

struct HomComplexSlice {
  int hom_degree = 0;
  std::vector<HomBasisElement> basis;
  IntMatrix differential;  // D: Hom_k -> Hom_{k-1}
};

/// Matrix of D: Hom_k(A,B) -> Hom_{k-1}(A,B) in the lexicographic bases.
inline IntMatrix hom_differential_matrix(const ChainComplex& a, const ChainComplex& b, int k) {
  const auto& ma = *a.module;
  const auto& mb = *b.module;
  const std::size_t rows = hom_dimension(ma, mb, k - 1);
  const std::size_t cols = hom_dimension(ma, mb, k);
  IntMatrix dm(rows, cols);

  // Offsets of each source degree inside the Hom_{k-1} basis.
  std::vector<std::size_t> row_offset;
  {
    std::size_t off = 0;
    for (int n = ma.lo; n <= ma.hi; ++n) {
      row_offset.push_back(off);
      off += ma.rank(n) * mb.rank(n + k - 1);
    }
  }
  auto row_index = [&](int n, std::size_t j, std::size_t i) {
    return row_offset[n - ma.lo] + j * mb.rank(n + k - 1) + i;
  };
  const Integer sign = (k % 2 == 0) ? Integer(-1) : Integer(1);

  std::size_t col = 0;
  for (int n = ma.lo; n <= ma.hi; ++n)
    for (std::size_t j = 0; j < ma.rank(n); ++j)
      for (std::size_t i = 0; i < mb.rank(n + k); ++i, ++col) {
        // d_B * phi: A_n -> B_{n+k-1}, column j is column i of d_B at degree n+k.
        if (mb.in_window(n + k)) {
          const IntMatrix& db = b.d.block_ref(n + k);
          for (std::size_t r = 0; r < db.rows(); ++r)
            if (db(r, i) != 0) dm(row_index(n, j, r), col) += db(r, i);
        }
        // phi * d_A: A_{n+1} -> B_{n+k}; basis j' of A_{n+1} picks up d_A(j, j') at target i.
        if (ma.in_window(n + 1)) {
          const IntMatrix& da = a.d.block_ref(n + 1);
          for (std::size_t jp = 0; jp < da.cols(); ++jp)
            if (da(j, jp) != 0) dm(row_index(n + 1, jp, i), col) += sign * da(j, jp);
        }
      }
  return dm;
}

inline HomComplexSlice hom_complex(const ChainComplex& a, const ChainComplex& b, int k) {
  return {k, hom_basis(*a.module, *b.module, k), hom_differential_matrix(a, b, k)};
}

}  // namespace ipl
