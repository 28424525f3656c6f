#pragma once

// Kernels Z_r, the retraction r from the tilde operad onto Dif*Riso, the
// inclusion iota, and evaluation in the operad of isomorphisms.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ipl/operad/differential.hpp"

namespace ipl::operad {

/// Z_r = sum over (m1..mt), 2(m1+..+mt) - 1 = r, of xbar f_{2m1+1} xbar ... f_{2mt+1} xbar,
/// keeping the words with at most max_fweight factors xbar.
inline Element kernel_Z(int r, int max_fweight) {
  if (r < -1 || r % 2 == 0) throw InvalidInput("kernel_Z: index must be odd and >= -1, got " + std::to_string(r));
  Element out(Ambient::DifRiso);
  const int total = (r + 1) / 2;
  std::vector<Gen> buf{Gen::xbar()};
  // Appends f_{2m+1} xbar blocks while the remaining sum and fweight allow.
  auto rec = [&](auto&& self, int remaining, int xbars) -> void {
    if (remaining == 0) out.add(Word::of(buf), 1);
    if (xbars >= max_fweight) return;
    for (int m = 0; m <= remaining; ++m) {
      buf.push_back(Gen::f(2 * m + 1));
      buf.push_back(Gen::xbar());
      self(self, remaining - m, xbars + 1);
      buf.pop_back();
      buf.pop_back();
    }
  };
  if (max_fweight >= 1) rec(rec, total, 1);
  return out;
}

inline Element kernel_Z(int r, const TruncationCaps& caps) { return kernel_Z(r, caps.max_fweight); }

/// One summand c * left Z_z right of a retraction formula.
struct RetractionTerm {
  Integer coef = 1;
  Gen left;
  int z = -1;
  Gen right;

  auto key() const { return std::make_tuple(left, z, right); }
};

/// r(generator) in factored form, sum of terms left Z_z right.
struct RetractionFormula {
  std::vector<RetractionTerm> terms;

  void normalize() {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    std::vector<RetractionTerm> merged;
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().key() == t.key())
        merged.back().coef += t.coef;
      else
        merged.push_back(t);
      if (merged.back().coef == 0) merged.pop_back();
    }
    terms = std::move(merged);
  }

  std::string render() const {
    if (terms.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto& t = terms[i];
      const bool neg = t.coef < 0;
      s += i == 0 ? (neg ? "-" : "") : (neg ? " - " : " + ");
      Integer a = neg ? Integer(-t.coef) : t.coef;
      if (a != 1) s += a.str() + " ";
      s += t.left.token() + " Z" + std::to_string(t.z) + " " + t.right.token();
    }
    return s;
  }

  /// Parses "f0 Z-1 f3 + f2 Z-1 f1 + ..." in any term order.
  static RetractionFormula parse(const std::string& text) {
    RetractionFormula f;
    auto parts = detail::parse_terms<RetractionTerm>(text, [](const std::vector<std::string>& run) {
      if (run.size() != 3 || run[1].size() < 2 || run[1][0] != 'Z')
        throw InvalidInput("parse: expected 'left Zk right', got " + std::to_string(run.size()) + " tokens");
      auto l = parse_gen(run[0]);
      auto r = parse_gen(run[2]);
      if (!l || !r) throw InvalidInput("parse: bad generator in retraction term");
      RetractionTerm t;
      t.left = *l;
      t.right = *r;
      const std::string zs = run[1].substr(1);
      if (!detail::is_integer_token(zs)) throw InvalidInput("parse: bad kernel index '" + run[1] + "'");
      t.z = std::stoi(zs);
      return t;
    });
    for (auto& [c, t] : parts) {
      t.coef = c;
      f.terms.push_back(t);
    }
    f.normalize();
    return f;
  }

  Element expand(int max_fweight) const {
    Element out(Ambient::DifRiso);
    for (const auto& t : terms) {
      Element mid = kernel_Z(t.z, max_fweight);
      out += t.coef * (Element::gen(Ambient::DifRiso, t.left) * mid * Element::gen(Ambient::DifRiso, t.right));
    }
    return out;
  }

  friend bool operator==(const RetractionFormula& a, const RetractionFormula& b) {
    if (a.terms.size() != b.terms.size()) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i)
      if (a.terms[i].key() != b.terms[i].key() || a.terms[i].coef != b.terms[i].coef) return false;
    return true;
  }
};

/// Factored r on ybar, fbar_n and gbar_n; absent for generators that r fixes.
inline std::optional<RetractionFormula> retraction_formula(Gen g) {
  RetractionFormula f;
  auto add = [&](Gen l, int b, Gen r) { f.terms.push_back({1, l, 2 * b - 1, r}); };
  auto triples = [&](int total, auto&& body) {
    for (int a = 0; a <= total; ++a)
      for (int b = 0; a + b <= total; ++b) body(a, b, total - a - b);
  };
  switch (g.family) {
    case Family::f:
    case Family::g:
    case Family::xbar: return std::nullopt;
    case Family::ybar: add(Gen::f(0), 0, Gen::g(0)); break;
    case Family::fbar:
      if (g.index % 2 == 0)
        triples(g.index / 2, [&](int a, int b, int c) { add(Gen::f(2 * a), b, Gen::f(2 * c + 1)); });
      else
        triples(g.index / 2, [&](int a, int b, int c) { add(Gen::f(2 * a + 1), b, Gen::f(2 * c + 1)); });
      break;
    case Family::gbar:
      if (g.index % 2 == 0)
        triples(g.index / 2, [&](int a, int b, int c) { add(Gen::f(2 * a + 1), b, Gen::g(2 * c)); });
      else
        triples(g.index / 2 + 1, [&](int a, int b, int c) { add(Gen::f(2 * a), b, Gen::g(2 * c)); });
      break;
  }
  f.normalize();
  return f;
}

/// The operad morphism r, exact on all words of fweight <= max_fweight.
class Retraction {
 public:
  explicit Retraction(int max_fweight) : max_fweight_(max_fweight) {}

  int max_fweight() const { return max_fweight_; }

  const Element& on_generator(Gen g) const {
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    Element img(Ambient::DifRiso);
    if (auto f = retraction_formula(g))
      img = f->expand(max_fweight_);
    else
      img = Element::gen(Ambient::DifRiso, g);
    return cache_.emplace(g, img.truncated(max_fweight_)).first->second;
  }

  Element operator()(const Element& e) const {
    if (!contained_in(e.ambient(), Ambient::RisoTilde))
      throw InvalidInput(std::string("retraction: element lives in ") + ambient_name(e.ambient()));
    Element out(Ambient::DifRiso);
    for (const auto& [w, c] : e.map()) {
      if (w.is_identity()) {
        out.add(w, c);
        continue;
      }
      Element acc = on_generator(w.factors().front());
      for (std::size_t i = 1; i < w.length() && !acc.is_zero(); ++i)
        acc = (acc * on_generator(w.factors()[i])).truncated(max_fweight_);
      out += c * acc;
    }
    return out;
  }

 private:
  int max_fweight_;
  mutable std::map<Gen, Element> cache_;
};

inline Element retraction_r(const Element& e, const TruncationCaps& caps) { return Retraction(caps.max_fweight)(e); }

/// Generator-wise inclusion Dif*Riso -> tilde operad.
inline Element iota(const Element& e) {
  if (!contained_in(e.ambient(), Ambient::DifRiso))
    throw InvalidInput(std::string("iota: element lives in ") + ambient_name(e.ambient()));
  return e.recast(Ambient::RisoTilde);
}

/// An element of the operad of isomorphisms: a multiple of the basis 1B, 1W, f or g.
struct IsoValue {
  Integer coefficient = 0;
  Color src = Color::B;
  Color dst = Color::B;

  std::string basis() const {
    if (src == dst) return src == Color::B ? "1B" : "1W";
    return src == Color::B ? "f" : "g";
  }
  std::string render() const {
    if (coefficient == 0) return "0";
    if (coefficient == 1) return basis();
    if (coefficient == -1) return "-" + basis();
    return coefficient.str() + " " + basis();
  }
  friend bool operator==(const IsoValue& a, const IsoValue& b) {
    if (a.coefficient == 0 || b.coefficient == 0) return a.coefficient == b.coefficient;
    return a.coefficient == b.coefficient && a.src == b.src && a.dst == b.dst;
  }
};

/// f0 -> f, g0 -> g, every other generator -> 0, reduced by fg = 1W and gf = 1B.
inline IsoValue alpha_iso_eval(const Element& e) {
  if (!contained_in(e.ambient(), Ambient::Riso))
    throw InvalidInput(std::string("alpha_iso_eval: element lives in ") + ambient_name(e.ambient()));
  IsoValue v;
  if (e.is_zero()) return v;
  auto col = e.colors();
  if (!col) throw InvalidInput("alpha_iso_eval: element is not color-homogeneous");
  v.src = col->first;
  v.dst = col->second;
  for (const auto& [w, c] : e.map()) {
    bool all_zero_index =
        std::all_of(w.factors().begin(), w.factors().end(), [](const Gen& g) { return g.index == 0; });
    if (all_zero_index) v.coefficient += c;
  }
  return v;
}

}  // namespace ipl::operad
