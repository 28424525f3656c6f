#pragma once

// Finite Z-linear combinations of words, with canonical rendering and parsing.

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ipl/exactlin.hpp"
#include "ipl/operad/word.hpp"

namespace ipl::operad {

namespace detail {

struct AmbientFlags {
  bool x = false;
  int fg = 0;  // 0 none, 1 index <= 1, 2 all
  bool bars = false;
};

inline AmbientFlags flags(Ambient a) {
  switch (a) {
    case Ambient::Dif: return {true, 0, false};
    case Ambient::Rfake: return {false, 1, false};
    case Ambient::Riso: return {false, 2, false};
    case Ambient::DifRfake: return {true, 1, false};
    case Ambient::DifRiso: return {true, 2, false};
    case Ambient::RisoTilde: return {true, 2, true};
  }
  return {};
}

}  // namespace detail

/// Whether every word of `inner` is a word of `outer`.
inline bool contained_in(Ambient inner, Ambient outer) {
  auto i = detail::flags(inner), o = detail::flags(outer);
  return (!i.x || o.x) && i.fg <= o.fg && (!i.bars || o.bars);
}

/// Smallest supported ambient containing both.
inline Ambient join(Ambient a, Ambient b) {
  if (contained_in(a, b)) return b;
  if (contained_in(b, a)) return a;
  auto fa = detail::flags(a), fb = detail::flags(b);
  if (fa.bars || fb.bars) return Ambient::RisoTilde;
  return std::max(fa.fg, fb.fg) == 2 ? Ambient::DifRiso : Ambient::DifRfake;
}

class Element {
 public:
  using Map = std::unordered_map<Word, Integer, WordHash>;

  explicit Element(Ambient a = Ambient::RisoTilde) : ambient_(a) {}

  static Element word(Ambient a, const Word& w, const Integer& c = 1) {
    Element e(a);
    e.add(w, c);
    return e;
  }
  static Element gen(Ambient a, Gen g) { return word(a, Word::of(g)); }
  static Element unit(Ambient a, Color c) { return word(a, Word::identity(c)); }

  Ambient ambient() const { return ambient_; }
  const Map& map() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  void add(const Word& w, const Integer& c) {
    if (c == 0) return;
    if (!allows(ambient_, w))
      throw InvalidInput("word " + w.render() + " does not belong to " + ambient_name(ambient_));
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Integer coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Integer(0) : it->second;
  }

  /// Terms in canonical order.
  std::vector<std::pair<Word, Integer>> terms() const {
    std::vector<std::pair<Word, Integer>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
  }

  /// Same terms, viewed in a larger (or equal) ambient; throws if some word is not allowed.
  Element recast(Ambient a) const {
    Element e(a);
    for (const auto& [w, c] : terms_) e.add(w, c);
    return e;
  }

  Element& operator+=(const Element& o) {
    ambient_ = join(ambient_, o.ambient_);
    for (const auto& [w, c] : o.terms_) add(w, c);
    return *this;
  }
  Element& operator-=(const Element& o) {
    ambient_ = join(ambient_, o.ambient_);
    for (const auto& [w, c] : o.terms_) add(w, -c);
    return *this;
  }
  Element& operator*=(const Integer& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= Integer(-1); }
  friend Element operator*(const Integer& s, Element a) { return a *= s; }

  /// Composition a o b, word by word.
  friend Element operator*(const Element& a, const Element& b) {
    Element out(join(a.ambient_, b.ambient_));
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) out.add(wa.then(wb), ca * cb);
    return out;
  }

  friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }

  template <class Pred>
  Element filtered(Pred keep) const {
    Element e(ambient_);
    for (const auto& [w, c] : terms_)
      if (keep(w)) e.terms_.emplace(w, c);
    return e;
  }
  Element truncated(int max_fweight) const {
    return filtered([&](const Word& w) { return w.fweight() <= max_fweight; });
  }
  Element fweight_band(int fw) const {
    return filtered([&](const Word& w) { return w.fweight() == fw; });
  }
  Element degree_component(int deg) const {
    return filtered([&](const Word& w) { return w.degree() == deg; });
  }

  int max_fweight() const {
    int m = -1;
    for (const auto& [w, c] : terms_) m = std::max(m, w.fweight());
    return m;
  }

  /// Common (src, dst) of all terms, if any.
  std::optional<std::pair<Color, Color>> colors() const {
    std::optional<std::pair<Color, Color>> out;
    for (const auto& [w, c] : terms_) {
      std::pair<Color, Color> p{w.src(), w.dst()};
      if (out && *out != p) return std::nullopt;
      out = p;
    }
    return out;
  }

  std::string render() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [w, c] : terms()) {
      const bool neg = c < 0;
      if (first)
        s += neg ? "-" : "";
      else
        s += neg ? " - " : " + ";
      Integer a = neg ? Integer(-c) : c;
      if (a != 1) s += a.str() + " ";
      s += w.render();
      first = false;
    }
    return s;
  }

 private:
  Ambient ambient_;
  Map terms_;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> toks;
  std::istringstream in(text);
  for (std::string t; in >> t;) toks.push_back(t);
  return toks;
}

inline bool is_integer_token(const std::string& t) {
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i >= t.size()) return false;
  return std::all_of(t.begin() + i, t.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

inline std::optional<Word> token_unit(const std::string& t) {
  if (t == "1B") return Word::identity(Color::B);
  if (t == "1W") return Word::identity(Color::W);
  return std::nullopt;
}

// Generic sum-of-terms parser; `factor` turns a run of non-sign, non-integer tokens into a term.
template <class Term, class Factor>
std::vector<std::pair<Integer, Term>> parse_terms(const std::string& text, Factor factor) {
  auto toks = split_ws(text);
  std::vector<std::pair<Integer, Term>> out;
  if (toks.empty()) throw InvalidInput("parse: empty expression");
  if (toks.size() == 1 && toks[0] == "0") return out;
  // A leading sign may be attached to the first token ("-xbar xbar", "-2 f0").
  if (toks[0].size() > 1 && (toks[0][0] == '-' || toks[0][0] == '+') && !is_integer_token(toks[0])) {
    toks.insert(toks.begin(), toks[0].substr(0, 1));
    toks[1].erase(0, 1);
  }
  std::size_t i = 0;
  bool first = true;
  while (i < toks.size()) {
    Integer sign = 1;
    if (toks[i] == "+" || toks[i] == "-") {
      sign = toks[i] == "-" ? -1 : 1;
      ++i;
    } else if (!first) {
      throw InvalidInput("parse: expected '+' or '-' before token " + std::to_string(i + 1) + " ('" +
                         toks[i] + "')");
    }
    if (i >= toks.size()) throw InvalidInput("parse: dangling sign at end of expression");
    Integer coef = 1;
    if (is_integer_token(toks[i])) {
      coef = Integer(toks[i]);
      if (coef == 0) throw InvalidInput("parse: zero coefficient at token " + std::to_string(i + 1));
      ++i;
    }
    std::vector<std::string> run;
    while (i < toks.size() && toks[i] != "+" && toks[i] != "-") {
      if (is_integer_token(toks[i]))
        throw InvalidInput("parse: unexpected integer at token " + std::to_string(i + 1) + " ('" + toks[i] +
                           "')");
      run.push_back(toks[i++]);
    }
    if (run.empty()) throw InvalidInput("parse: term without generators near token " + std::to_string(i));
    out.emplace_back(sign * coef, factor(run));
    first = false;
  }
  return out;
}

}  // namespace detail

inline Word parse_word(const std::vector<std::string>& run) {
  if (run.size() == 1)
    if (auto u = detail::token_unit(run[0])) return *u;
  std::vector<Gen> gens;
  for (const auto& t : run) {
    auto g = parse_gen(t);
    if (!g) throw InvalidInput("parse: unknown token '" + t + "'");
    gens.push_back(*g);
  }
  return Word::of(std::move(gens));
}

/// Parses text such as "f0 f1 - g1 f0" or "2 xbar xbar"; "0" is the zero element.
inline Element parse_element(const std::string& text, Ambient a) {
  Element e(a);
  for (auto& [c, w] : detail::parse_terms<Word>(text, parse_word)) e.add(w, c);
  return e;
}

}  // namespace ipl::operad
