#pragma once

// Bounded boundary searches, the Dif acyclicity probe, and the identity suite
// certifying the sign convention within finite caps.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipl/exactlin.hpp"
#include "ipl/operad/retraction.hpp"

namespace ipl::operad {

struct BoundarySearchResult {
  std::optional<Element> preimage;  // absent: no preimage within the caps
  std::size_t candidates = 0;       // dimension of the searched span
  std::size_t equations = 0;

  bool found() const { return preimage.has_value(); }
};

namespace detail {

// Index of words as coordinates.
struct WordIndex {
  std::unordered_map<Word, std::size_t, WordHash> pos;
  std::size_t operator()(const Word& w) { return pos.try_emplace(w, pos.size()).first->second; }
};

}  // namespace detail

/// Searches the span of words within caps (same ambient, colors, degree + 1) for y with d(y) = c.
inline BoundarySearchResult bounded_boundary_search(const Element& c, const TruncationCaps& caps,
                                                    DiffMode mode = DiffMode::Exact) {
  const Differential d(mode);
  if (!d(c).is_zero()) throw InvalidInput("bounded_boundary_search: element is not a cycle");
  BoundarySearchResult res;
  if (c.is_zero()) {
    res.preimage = Element(c.ambient());
    return res;
  }
  auto col = c.colors();
  if (!col) throw InvalidInput("bounded_boundary_search: element is not color-homogeneous");
  const int deg = c.map().begin()->first.degree();
  std::optional<int> fw = c.map().begin()->first.fweight();
  for (const auto& [w, k] : c.map()) {
    if (w.degree() != deg) throw InvalidInput("bounded_boundary_search: element is not degree-homogeneous");
    if (w.fweight() != *fw) fw.reset();
  }
  // The graded differential preserves fweight, so other fweights decouple.
  const bool fix_fw = mode == DiffMode::AssociatedGraded && fw.has_value();

  std::vector<Word> cand = enumerate_words(generators(c.ambient(), caps.max_index), caps.max_length,
                                           [&](const Word& w) {
                                             return w.degree() == deg + 1 && w.src() == col->first &&
                                                    w.dst() == col->second && w.fweight() <= caps.max_fweight &&
                                                    (!fix_fw || w.fweight() == *fw);
                                           });
  res.candidates = cand.size();
  detail::WordIndex rows;
  std::vector<Element> images;
  images.reserve(cand.size());
  for (const auto& w : cand) {
    images.push_back(d(Element::word(c.ambient(), w)));
    for (const auto& [v, k] : images.back().map()) rows(v);
  }
  for (const auto& [v, k] : c.map()) rows(v);
  res.equations = rows.pos.size();

  IntMatrix a(rows.pos.size(), cand.size());
  for (std::size_t j = 0; j < cand.size(); ++j)
    for (const auto& [v, k] : images[j].map()) a(rows.pos.at(v), j) = k;
  IntVector b(rows.pos.size());
  for (const auto& [v, k] : c.map()) b[rows.pos.at(v)] = k;

  if (auto x = solve_integer(a, b)) {
    Element y(c.ambient());
    for (std::size_t j = 0; j < cand.size(); ++j) y.add(cand[j], (*x)[j]);
    res.preimage = std::move(y);
  }
  return res;
}

struct DegreeHomology {
  int degree;
  AbelianGroupInvariants group;
};

/// Homology of the truncated complex spanned by xbar^n, 0 <= n <= max_length, in
/// degrees -1 .. -(max_length - 1) (the top degree is a truncation artefact).
inline std::vector<DegreeHomology> dif_homology(int max_length) {
  if (max_length < 2) throw InvalidInput("dif_homology: need max_length >= 2");
  const Differential& d = standard_differential();
  auto power = [](int n) {
    return n == 0 ? Word::identity(Color::B) : Word::of(std::vector<Gen>(std::size_t(n), Gen::xbar()));
  };
  // dmat[n] : C_{-n} -> C_{-n-1}, 1x1.
  std::vector<IntMatrix> dmat;
  for (int n = 0; n < max_length; ++n) {
    IntMatrix m(1, 1);
    m(0, 0) = d(Element::word(Ambient::Dif, power(n))).coefficient(power(n + 1));
    dmat.push_back(m);
  }
  std::vector<DegreeHomology> out;
  for (int n = 1; n < max_length; ++n) out.push_back({-n, homology_at(dmat[n - 1], dmat[n])});
  return out;
}

struct IdentityResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string first_failure;  // "<item>: <nonzero residue>"
};

struct IdentitySuiteReport {
  TruncationCaps caps;
  std::vector<IdentityResult> results;

  bool all_passed() const {
    for (const auto& r : results)
      if (!r.passed) return false;
    return true;
  }
  const IdentityResult* find(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return &r;
    return nullptr;
  }
  std::string render() const {
    std::string s = "caps " + caps.to_string() + "\n";
    for (const auto& r : results) {
      s += (r.passed ? "PASS " : "FAIL ") + r.name + " (" + std::to_string(r.checked) + " checked)";
      if (!r.passed) s += ": first failure at " + r.first_failure;
      s += "\n";
    }
    return s;
  }
};

namespace detail {

struct Checker {
  IdentityResult res;
  explicit Checker(std::string name) { res.name = std::move(name); }
  void expect_zero(const std::string& item, const Element& residue) {
    ++res.checked;
    if (res.passed && !residue.is_zero()) {
      res.passed = false;
      res.first_failure = item + ": " + residue.render();
    }
  }
};

// Sum of left_i right_j over i + j = n with both indices of the given parity.
inline Element sum_pairs(Family left, Family right, int n, bool odd) {
  Element e(Ambient::Riso);
  for (int i = odd ? 1 : 0; i <= n; i += 2) {
    const int j = n - i;
    if (j < 0 || (j % 2 == 1) != odd) continue;
    e.add(Word::of({Gen{left, std::uint8_t(i)}, Gen{right, std::uint8_t(j)}}), 1);
  }
  return e;
}

// (g f - h h)_k in Dif*Riso.
inline Element gf_minus_hh(int k) {
  Element e = sum_pairs(Family::g, Family::f, k, false) - sum_pairs(Family::f, Family::f, k, true);
  return e.recast(Ambient::DifRiso);
}

}  // namespace detail

/// Certifies, within caps: d^2 = 0 on generators; the contracting homotopy identity;
/// r d = d r on generators; r iota = id; and the auxiliary identities used in the proofs.
inline IdentitySuiteReport verify_identity_suite(const TruncationCaps& caps,
                                                 const Differential& d = standard_differential()) {
  IdentitySuiteReport rep;
  rep.caps = caps;
  const int W = caps.max_fweight;

  {
    detail::Checker ch("d^2 = 0 on Riso generators");
    for (const Gen& g : generators(Ambient::Riso, caps.max_index)) {
      Element z = Element::gen(Ambient::Riso, g);
      ch.expect_zero(g.token(), d(d(z)));
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("d^2 = 0 on tilde generators");
    for (const Gen& g : generators(Ambient::RisoTilde, caps.max_index)) {
      Element z = Element::gen(Ambient::RisoTilde, g);
      ch.expect_zero(g.token(), d(d(z)));
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("theta d+ + d+ theta = id");
    const int len = std::max(caps.max_length - 1, 0);
    auto words = enumerate_words(generators(Ambient::Riso, caps.max_index), len, [&](const Word& w) {
      return w.degree() > 0 && w.degree() <= caps.max_degree;
    });
    for (const auto& w : words) {
      Element x = Element::word(Ambient::Riso, w);
      Element lhs = theta(split_homogeneity(x, d).d_plus) + split_homogeneity(theta(x), d).d_plus;
      ch.expect_zero(w.render(), lhs - x);
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("r d = d r on tilde generators");
    const Retraction r(W);
    for (const Gen& g : generators(Ambient::RisoTilde, caps.max_index)) {
      Element z = Element::gen(Ambient::RisoTilde, g);
      Element lhs = r(d(z)).truncated(W);
      Element rhs = d(r(z)).truncated(W);
      ch.expect_zero(g.token(), lhs - rhs);
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("r iota = id");
    const Retraction r(W);
    auto words = enumerate_words(generators(Ambient::DifRiso, caps.max_index), caps.max_length,
                                 [&](const Word& w) { return w.fweight() <= W; });
    for (Color c : {Color::B, Color::W}) words.push_back(Word::identity(c));
    for (const auto& w : words) {
      Element x = Element::word(Ambient::DifRiso, w);
      ch.expect_zero(w.render(), r(iota(x)) - x);
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("d(h h) = d(g f) and d(l l) = d(f g)");
    for (int n = 2; n <= caps.max_degree; n += 2) {
      using detail::sum_pairs;
      ch.expect_zero("degree " + std::to_string(n) + " (h)",
                     d(sum_pairs(Family::f, Family::f, n, true)) - d(sum_pairs(Family::g, Family::f, n, false)));
      ch.expect_zero("degree " + std::to_string(n) + " (l)",
                     d(sum_pairs(Family::g, Family::g, n, true)) - d(sum_pairs(Family::f, Family::g, n, false)));
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("d Z = -Z (g f - h h) Z");
    std::map<int, Element> z;
    for (int r = -1; r <= caps.max_degree; r += 2) z.emplace(r, kernel_Z(r, W));
    for (int r = -1; r + 1 <= caps.max_degree; r += 2) {
      Element rhs(Ambient::DifRiso);
      for (int a = -1; a <= r; a += 2)
        for (int k = 0; a + k <= r; k += 2) {
          const int b = r - 1 - a - k;
          if (b < -1) continue;
          rhs -= (z.at(a) * detail::gf_minus_hh(k) * z.at(b)).truncated(W);
        }
      ch.expect_zero("Z" + std::to_string(r), d(z.at(r)).truncated(W) - rhs);
    }
    rep.results.push_back(ch.res);
  }
  {
    detail::Checker ch("xbar + Z h xbar = Z");
    const Element x = Element::gen(Ambient::DifRiso, Gen::xbar());
    for (int r = -1; r <= caps.max_degree; r += 2) {
      Element lhs(Ambient::DifRiso);
      if (r == -1) lhs += x;
      for (int a = -1; a <= r; a += 2) {
        const int j = r - a + 1;  // odd
        lhs += (kernel_Z(a, W) * Element::gen(Ambient::DifRiso, Gen::f(j)) * x).truncated(W);
      }
      ch.expect_zero("Z" + std::to_string(r), lhs - kernel_Z(r, W));
    }
    rep.results.push_back(ch.res);
  }
  return rep;
}

}  // namespace ipl::operad
