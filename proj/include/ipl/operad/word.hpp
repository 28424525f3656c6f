#pragma once

// Generators and composable words of the unary colored operads. Colors B and W
// stand for the two complexes M and N.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ipl/errors.hpp"

namespace ipl::operad {

enum class Color : std::uint8_t { B, W };

enum class Family : std::uint8_t { f, g, fbar, gbar, xbar, ybar };

struct Gen {
  Family family = Family::f;
  std::uint8_t index = 0;  // unused for xbar / ybar

  static Gen f(int n) { return {Family::f, checked(n)}; }
  static Gen g(int n) { return {Family::g, checked(n)}; }
  static Gen fbar(int n) { return {Family::fbar, checked(n)}; }
  static Gen gbar(int n) { return {Family::gbar, checked(n)}; }
  static Gen xbar() { return {Family::xbar, 0}; }
  static Gen ybar() { return {Family::ybar, 0}; }

  bool indexed() const { return family != Family::xbar && family != Family::ybar; }
  bool barred() const { return family != Family::f && family != Family::g; }
  int degree() const { return indexed() ? index : -1; }
  int fweight() const { return barred() ? 1 : 0; }

  // Base family: fbar -> f, gbar -> g; xbar and ybar behave like f and g for colors.
  bool f_like() const { return family == Family::f || family == Family::fbar || family == Family::xbar; }

  Color src() const {
    if (family == Family::xbar) return Color::B;
    if (family == Family::ybar) return Color::W;
    return f_like() ? Color::B : Color::W;
  }
  Color dst() const {
    if (family == Family::xbar) return Color::B;
    if (family == Family::ybar) return Color::W;
    bool odd = index % 2 == 1;
    if (f_like()) return odd ? Color::B : Color::W;
    return odd ? Color::W : Color::B;
  }

  std::string token() const {
    switch (family) {
      case Family::f: return "f" + std::to_string(index);
      case Family::g: return "g" + std::to_string(index);
      case Family::fbar: return "fbar" + std::to_string(index);
      case Family::gbar: return "gbar" + std::to_string(index);
      case Family::xbar: return "xbar";
      case Family::ybar: return "ybar";
    }
    return "?";
  }

  friend bool operator==(const Gen&, const Gen&) = default;
  friend auto operator<=>(const Gen&, const Gen&) = default;

 private:
  static std::uint8_t checked(int n) {
    if (n < 0 || n > 200) throw InvalidInput("generator index out of range: " + std::to_string(n));
    return static_cast<std::uint8_t>(n);
  }
};

inline std::optional<Gen> parse_gen(const std::string& tok) {
  if (tok == "xbar") return Gen::xbar();
  if (tok == "ybar") return Gen::ybar();
  auto num = [&](std::size_t from) -> std::optional<int> {
    if (from >= tok.size() || tok.size() - from > 3) return std::nullopt;
    for (std::size_t i = from; i < tok.size(); ++i)
      if (tok[i] < '0' || tok[i] > '9') return std::nullopt;
    return std::stoi(tok.substr(from));
  };
  if (tok.rfind("fbar", 0) == 0) {
    if (auto n = num(4)) return Gen::fbar(*n);
  } else if (tok.rfind("gbar", 0) == 0) {
    if (auto n = num(4)) return Gen::gbar(*n);
  } else if (tok.rfind('f', 0) == 0) {
    if (auto n = num(1)) return Gen::f(*n);
  } else if (tok.rfind('g', 0) == 0) {
    if (auto n = num(1)) return Gen::g(*n);
  }
  return std::nullopt;
}

/// Composable chain z1 z2 ... zt meaning z1 o z2 o ... o zt; empty = identity of `unit`.
class Word {
 public:
  static Word identity(Color c) {
    Word w;
    w.unit_ = c;
    return w;
  }
  static Word of(std::vector<Gen> factors) {
    if (factors.empty()) throw InvalidInput("Word::of: empty factor list (use Word::identity)");
    for (std::size_t i = 0; i + 1 < factors.size(); ++i)
      if (factors[i].src() != factors[i + 1].dst())
        throw InvalidInput("not composable: " + factors[i].token() + " after " + factors[i + 1].token());
    Word w;
    w.factors_ = std::move(factors);
    return w;
  }
  static Word of(Gen g) { return of(std::vector<Gen>{g}); }

  const std::vector<Gen>& factors() const { return factors_; }
  bool is_identity() const { return factors_.empty(); }
  std::size_t length() const { return factors_.size(); }
  Color src() const { return factors_.empty() ? unit_ : factors_.back().src(); }
  Color dst() const { return factors_.empty() ? unit_ : factors_.front().dst(); }
  int degree() const {
    int d = 0;
    for (const auto& g : factors_) d += g.degree();
    return d;
  }
  int fweight() const {
    int w = 0;
    for (const auto& g : factors_) w += g.fweight();
    return w;
  }
  int max_index() const {
    int m = 0;
    for (const auto& g : factors_)
      if (g.indexed()) m = std::max(m, int(g.index));
    return m;
  }

  bool composable_with(const Word& right) const { return src() == right.dst(); }

  /// this o right
  Word then(const Word& right) const {
    if (!composable_with(right))
      throw InvalidInput("not composable: " + render() + " after " + right.render());
    if (right.is_identity()) return *this;
    if (is_identity()) return right;
    Word w;
    w.factors_.reserve(factors_.size() + right.factors_.size());
    w.factors_ = factors_;
    w.factors_.insert(w.factors_.end(), right.factors_.begin(), right.factors_.end());
    return w;
  }

  /// Factors [from, to) as a word; empty range gives the identity at the joining color.
  Word slice(std::size_t from, std::size_t to) const {
    if (from >= to) {
      Word w;
      w.unit_ = from < factors_.size() ? factors_[from].dst() : src();
      return w;
    }
    Word w;
    w.factors_.assign(factors_.begin() + from, factors_.begin() + to);
    return w;
  }

  std::string render() const {
    if (factors_.empty()) return unit_ == Color::B ? "1B" : "1W";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += ' ';
      s += factors_[i].token();
    }
    return s;
  }

  friend bool operator==(const Word& a, const Word& b) {
    if (a.factors_.empty() || b.factors_.empty())
      return a.factors_.empty() && b.factors_.empty() && a.unit_ == b.unit_;
    return a.factors_ == b.factors_;
  }

  /// Canonical order: fweight, length, then tokens by family and index.
  friend bool operator<(const Word& a, const Word& b) {
    if (a.fweight() != b.fweight()) return a.fweight() < b.fweight();
    if (a.length() != b.length()) return a.length() < b.length();
    if (a.factors_.empty()) return a.unit_ < b.unit_;
    return a.factors_ < b.factors_;
  }

  std::size_t hash() const {
    std::size_t h = factors_.empty() ? 0x9e37 + std::size_t(unit_) : 0;
    for (const auto& g : factors_) h = h * 1315423911u + (std::size_t(g.family) << 8 | g.index) + 1;
    return h;
  }

 private:
  std::vector<Gen> factors_;
  Color unit_ = Color::B;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

/// The operads handled by the engine, identified by their generator sets.
enum class Ambient {
  Dif,        // xbar only
  Rfake,      // f_n, g_n with n <= 1
  Riso,       // f_n, g_n
  DifRfake,   // Dif * Rfake
  DifRiso,    // Dif * Riso
  RisoTilde,  // f_n, g_n, fbar_n, gbar_n, xbar, ybar
};

inline const char* ambient_name(Ambient a) {
  switch (a) {
    case Ambient::Dif: return "Dif";
    case Ambient::Rfake: return "Rfake";
    case Ambient::Riso: return "Riso";
    case Ambient::DifRfake: return "Dif*Rfake";
    case Ambient::DifRiso: return "Dif*Riso";
    case Ambient::RisoTilde: return "RisoTilde";
  }
  return "?";
}

inline bool allows(Ambient a, const Gen& g) {
  switch (g.family) {
    case Family::f:
    case Family::g:
      if (a == Ambient::Dif) return false;
      if (a == Ambient::Rfake || a == Ambient::DifRfake) return g.index <= 1;
      return true;
    case Family::xbar:
      return a == Ambient::Dif || a == Ambient::DifRfake || a == Ambient::DifRiso || a == Ambient::RisoTilde;
    case Family::fbar:
    case Family::gbar:
    case Family::ybar:
      return a == Ambient::RisoTilde;
  }
  return false;
}

inline bool allows(Ambient a, const Word& w) {
  if (w.is_identity()) return a != Ambient::Dif || w.src() == Color::B;
  for (const auto& g : w.factors())
    if (!allows(a, g)) return false;
  return true;
}

/// Finite window onto a completed operad.
struct TruncationCaps {
  int max_index = 4;
  int max_length = 5;
  int max_fweight = 3;
  int max_degree = 8;

  /// "idx,len,fw,deg"
  static TruncationCaps parse(const std::string& text) {
    TruncationCaps c;
    std::vector<int> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      long x = std::strtol(item.c_str(), &end, 10);
      if (item.empty() || *end != '\0' || x < 0 || x > 64)
        throw InvalidInput("caps: expected four non-negative integers idx,len,fw,deg, got '" + text + "'");
      v.push_back(int(x));
    }
    if (v.size() != 4) throw InvalidInput("caps: expected four values idx,len,fw,deg, got '" + text + "'");
    c.max_index = v[0];
    c.max_length = v[1];
    c.max_fweight = v[2];
    c.max_degree = v[3];
    return c;
  }

  /// Built-in defaults, overridable by the IPL_DEFAULT_CAPS environment variable.
  static TruncationCaps defaults() {
    if (const char* env = std::getenv("IPL_DEFAULT_CAPS"); env && *env) return parse(env);
    return {};
  }

  std::string to_string() const {
    return std::to_string(max_index) + "," + std::to_string(max_length) + "," + std::to_string(max_fweight) +
           "," + std::to_string(max_degree);
  }

  friend bool operator==(const TruncationCaps&, const TruncationCaps&) = default;
};

/// Generators of an ambient with index <= max_index.
inline std::vector<Gen> generators(Ambient a, int max_index) {
  std::vector<Gen> out;
  for (int n = 0; n <= max_index; ++n)
    for (Gen g : {Gen::f(n), Gen::g(n), Gen::fbar(n), Gen::gbar(n)})
      if (allows(a, g)) out.push_back(g);
  for (Gen g : {Gen::xbar(), Gen::ybar()})
    if (allows(a, g)) out.push_back(g);
  return out;
}

/// All non-identity words of length <= max_length over the given generators.
inline std::vector<Word> enumerate_words(const std::vector<Gen>& gens, int max_length,
                                         const std::function<bool(const Word&)>& keep = {}) {
  std::vector<Word> out;
  std::vector<std::vector<Gen>> layer;
  for (const Gen& g : gens) layer.push_back({g});
  for (int len = 1; len <= max_length && !layer.empty(); ++len) {
    std::vector<std::vector<Gen>> next;
    for (auto& fs : layer) {
      Word w = Word::of(fs);
      if (!keep || keep(w)) out.push_back(w);
      if (len == max_length) continue;
      for (const Gen& g : gens)
        if (fs.back().src() == g.dst()) {
          auto ext = fs;
          ext.push_back(g);
          next.push_back(std::move(ext));
        }
    }
    layer = std::move(next);
  }
  return out;
}

}  // namespace ipl::operad
