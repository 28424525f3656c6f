#pragma once

// Differentials of the operads as derivations: generator formulas extended to
// words with Koszul signs, d(z1...zt) = sum_i (-1)^{|z1...z(i-1)|} z1..d(zi)..zt.

#include <functional>
#include <map>
#include <utility>

#include "ipl/operad/element.hpp"

namespace ipl::operad {

enum class DiffMode {
  Exact,
  AssociatedGraded,  // only the fweight-preserving part (drops d xbar = -xbar xbar and the like)
};

namespace detail {

inline Element mono(Gen a, Gen b) { return Element::word(Ambient::RisoTilde, Word::of({a, b})); }

inline Gen same_family(Gen g, int n) { return {g.family, static_cast<std::uint8_t>(n)}; }

// Partner family: f <-> g, fbar <-> gbar.
inline Family partner(Family f) {
  switch (f) {
    case Family::f: return Family::g;
    case Family::g: return Family::f;
    case Family::fbar: return Family::gbar;
    case Family::gbar: return Family::fbar;
    default: return f;
  }
}

// a_n + abar_n for the base family of `fam`.
inline Element tilde(Family fam, int n) {
  bool f_side = fam == Family::f || fam == Family::fbar;
  Element e(Ambient::RisoTilde);
  e.add(Word::of(f_side ? Gen::f(n) : Gen::g(n)), 1);
  e.add(Word::of(f_side ? Gen::fbar(n) : Gen::gbar(n)), 1);
  return e;
}

inline Gen bar_endo(Color c) { return c == Color::B ? Gen::xbar() : Gen::ybar(); }

// d a_n for a in {f, g}.
inline Element riso_generator(Gen a) {
  Element e(Ambient::Riso);
  const int n = a.index;
  const Family b = partner(a.family);
  if (n % 2 == 0) {
    const int m = n / 2;
    for (int i = 0; i < m; ++i) {
      const int odd = 2 * (m - i) - 1;
      e.add(Word::of({same_family(a, 2 * i), same_family(a, odd)}), 1);
      e.add(Word::of({Gen{b, static_cast<std::uint8_t>(odd)}, same_family(a, 2 * i)}), -1);
    }
  } else {
    const int m = (n - 1) / 2;
    for (int j = 0; j <= m; ++j)
      e.add(Word::of({Gen{b, static_cast<std::uint8_t>(2 * j)}, same_family(a, 2 * (m - j))}), 1);
    for (int j = 0; j < m; ++j) e.add(Word::of({same_family(a, 2 * j + 1), same_family(a, 2 * (m - j) - 1)}), -1);
    if (m == 0) e.add(Word::identity(a.src()), -1);
  }
  return e;
}

// d abar_n: the fweight >= 1 part of the degree n-1 component of the compact tilde formulas.
inline Element tilde_generator(Gen a) {
  const int n = a.index;
  const Family base = a.family == Family::fbar ? Family::f : Family::g;
  const Family other = partner(base);
  const Element an = tilde(base, n);
  Element e(Ambient::RisoTilde);
  if (n % 2 == 0) {
    const int m = n / 2;
    e += an * Element::gen(Ambient::RisoTilde, bar_endo(a.src()));
    e -= Element::gen(Ambient::RisoTilde, bar_endo(a.dst())) * an;
    for (int i = 0; i < m; ++i) {
      const int odd = 2 * (m - i) - 1;
      e += tilde(base, 2 * i) * tilde(base, odd);
      e -= tilde(other, odd) * tilde(base, 2 * i);
    }
  } else {
    const int m = (n - 1) / 2;
    const Element x = Element::gen(Ambient::RisoTilde, bar_endo(a.src()));
    e -= an * x + x * an;
    for (int j = 0; j <= m; ++j) e += tilde(other, 2 * j) * tilde(base, 2 * (m - j));
    for (int j = 0; j < m; ++j) e -= tilde(base, 2 * j + 1) * tilde(base, 2 * (m - j) - 1);
  }
  return e.filtered([](const Word& w) { return w.fweight() >= 1; });
}

}  // namespace detail

/// Differential on generators as printed, with an optional per-generator override
/// (used to inject faults when testing the identity suite).
class Differential {
 public:
  explicit Differential(DiffMode mode = DiffMode::Exact) : mode_(mode) {}

  DiffMode mode() const { return mode_; }

  void override_generator(Gen g, Element image) {
    cache_.erase(g);
    overrides_[g] = std::move(image);
  }

  const Element& on_generator(Gen g) const {
    auto it = cache_.find(g);
    if (it != cache_.end()) return it->second;
    Element img;
    if (auto ov = overrides_.find(g); ov != overrides_.end()) {
      img = ov->second;
    } else {
      switch (g.family) {
        case Family::f:
        case Family::g: img = detail::riso_generator(g); break;
        case Family::fbar:
        case Family::gbar: img = detail::tilde_generator(g); break;
        case Family::xbar:
        case Family::ybar: img = -detail::mono(g, g); break;
      }
      if (mode_ == DiffMode::AssociatedGraded)
        img = img.filtered([&](const Word& w) { return w.fweight() == g.fweight(); });
    }
    return cache_.emplace(g, std::move(img)).first->second;
  }

  Element operator()(const Element& e) const {
    return derive(e, [&](Gen g) -> const Element& { return on_generator(g); });
  }

  /// Extends a generator map to words by the Koszul-signed Leibniz rule.
  template <class GenMap>
  static Element derive(const Element& e, GenMap&& image) {
    Element out(e.ambient());
    std::vector<Gen> buf;
    for (const auto& [w, c] : e.map()) {
      const auto& fs = w.factors();
      int prefix_degree = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const Element& dz = image(fs[i]);
        const Integer sign = (prefix_degree % 2 == 0) ? c : Integer(-c);
        for (const auto& [v, k] : dz.map()) {
          buf.assign(fs.begin(), fs.begin() + static_cast<std::ptrdiff_t>(i));
          buf.insert(buf.end(), v.factors().begin(), v.factors().end());
          buf.insert(buf.end(), fs.begin() + static_cast<std::ptrdiff_t>(i + 1), fs.end());
          Word nw = buf.empty() ? Word::identity(fs[i].src()) : Word::of(buf);
          out.add(nw, sign * k);
        }
        prefix_degree += fs[i].degree();
      }
    }
    return out;
  }

 private:
  DiffMode mode_;
  std::map<Gen, Element> overrides_;
  mutable std::map<Gen, Element> cache_;
};

inline const Differential& standard_differential() {
  static const Differential d;
  return d;
}

/// Differential of Riso (and Rfake); rejects other ambients.
inline Element diff_riso(const Element& e, const Differential& d = standard_differential()) {
  if (!contained_in(e.ambient(), Ambient::Riso))
    throw InvalidInput(std::string("diff_riso: element lives in ") + ambient_name(e.ambient()));
  return d(e);
}

/// Differential of the tilde operad (and of its suboperads such as Dif*Riso).
inline Element diff_riso_tilde(const Element& e, const Differential& d = standard_differential()) {
  if (!contained_in(e.ambient(), Ambient::RisoTilde))
    throw InvalidInput(std::string("diff_riso_tilde: element lives in ") + ambient_name(e.ambient()));
  return d(e);
}

struct HomogeneitySplit {
  Element d_minus;  // lowers word length by one
  Element d_plus;   // raises word length by one
};

inline HomogeneitySplit split_homogeneity(const Element& e, const Differential& d = standard_differential()) {
  if (!contained_in(e.ambient(), Ambient::Riso))
    throw InvalidInput(std::string("split_homogeneity: element lives in ") + ambient_name(e.ambient()));
  std::map<Gen, Element> minus, plus;
  auto part = [&](std::map<Gen, Element>& cache, Gen g, bool want_minus) -> const Element& {
    auto it = cache.find(g);
    if (it != cache.end()) return it->second;
    Element img = d.on_generator(g).filtered(
        [&](const Word& w) { return want_minus ? w.length() == 0 : w.length() >= 2; });
    return cache.emplace(g, std::move(img)).first->second;
  };
  HomogeneitySplit s;
  s.d_minus = Differential::derive(e, [&](Gen g) -> const Element& { return part(minus, g, true); });
  s.d_plus = Differential::derive(e, [&](Gen g) -> const Element& { return part(plus, g, false); });
  return s;
}

/// Contracting homotopy for d_{+1}: theta(z1 z2 z3...zt) = R(z1 z2) z3...zt.
inline Element theta(const Element& e) {
  if (!contained_in(e.ambient(), Ambient::Riso))
    throw InvalidInput(std::string("theta: element lives in ") + ambient_name(e.ambient()));
  Element out(e.ambient() == Ambient::Rfake ? Ambient::Riso : e.ambient());
  for (const auto& [w, c] : e.map()) {
    const auto& fs = w.factors();
    if (fs.size() < 2) continue;
    const Gen z1 = fs[0], z2 = fs[1];
    if (z1.index != 0) continue;
    std::optional<Gen> r;
    if (z1.family == Family::f && z2.family == Family::f && z2.index % 2 == 1) r = Gen::f(z2.index + 1);
    if (z1.family == Family::g && z2.family == Family::g && z2.index % 2 == 1) r = Gen::g(z2.index + 1);
    if (z1.family == Family::f && z2.family == Family::g && z2.index % 2 == 0) r = Gen::g(z2.index + 1);
    if (z1.family == Family::g && z2.family == Family::f && z2.index % 2 == 0) r = Gen::f(z2.index + 1);
    if (!r) continue;
    std::vector<Gen> nf{*r};
    nf.insert(nf.end(), fs.begin() + 2, fs.end());
    out.add(Word::of(std::move(nf)), c);
  }
  return out;
}

}  // namespace ipl::operad
