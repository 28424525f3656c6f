#pragma once

// Text documents: a JSON envelope {format_version, kind, payload}. Integers are
// decimal strings, matrices are arrays of rows. Parsing is strict (unknown or
// missing fields are errors) and errors carry line and column.

#include <cctype>
#include <cstddef>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ipl/chain.hpp"
#include "ipl/errors.hpp"
#include "ipl/operad/element.hpp"
#include "ipl/sdr.hpp"
#include "ipl/she.hpp"

namespace ipl::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1";

struct ParseError : InvalidInput {
  std::size_t line;
  std::size_t column;
  std::string pointer;
  ParseError(std::size_t l, std::size_t c, std::string ptr, const std::string& msg)
      : InvalidInput("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg +
                     (ptr.empty() ? "" : " (at " + ptr + ")")),
        line(l),
        column(c),
        pointer(std::move(ptr)) {}
};

using Payload = std::variant<ChainComplex, GradedMap, SdrData, HeData, SheData, Perturbation, operad::Element>;

struct Document {
  Payload payload;

  std::string kind() const {
    static const char* names[] = {"complex", "map", "sdr", "he", "she", "perturbation", "operad-element"};
    return names[payload.index()];
  }
  template <class T>
  const T& as(const char* want) const {
    if (const T* p = std::get_if<T>(&payload)) return *p;
    throw InvalidInput(std::string("expected a ") + want + " document, got " + kind());
  }
};

namespace detail {

// Error raised while reading the DOM; converted to a ParseError with position.
struct DomError {
  std::string pointer;
  std::string message;
};

inline std::string child(const std::string& ptr, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return ptr + "/" + k;
}
inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Input iterator that counts consumed characters.
struct CountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  std::size_t* consumed = nullptr;

  reference operator*() const { return *p; }
  CountingIterator& operator++() {
    ++p;
    ++*consumed;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator t = *this;
    ++*this;
    return t;
  }
  friend bool operator==(const CountingIterator& a, const CountingIterator& b) { return a.p == b.p; }
  friend bool operator!=(const CountingIterator& a, const CountingIterator& b) { return a.p != b.p; }
};

// Replays the text through the SAX interface to find where a JSON pointer starts.
class Locator : public nlohmann::json_sax<Json> {
 public:
  Locator(const std::string& text, std::string target, const std::size_t* consumed)
      : text_(text), target_(std::move(target)), consumed_(consumed) {}

  std::optional<std::size_t> found;

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t) override { return scalar(); }
  bool number_unsigned(number_unsigned_t) override { return scalar(); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool string(string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool start_object(std::size_t) override { return open(false); }
  bool start_array(std::size_t) override { return open(true); }
  bool key(string_t& k) override {
    frames_.back().key = k;
    // A missing field is reported at its enclosing object, an unknown one at its key.
    if (child(path(frames_.size() - 1), k) == target_) {
      std::size_t end = *consumed_ - 1;
      while (end > 0 && text_[end] != '"') --end;
      found = string_start(end);
      return false;
    }
    return true;
  }
  bool end_object() override { return close(); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array;
    std::size_t index = 0;
    std::string key;
  };

  std::string path(std::size_t depth) const {
    std::string p;
    for (std::size_t i = 0; i < depth; ++i)
      p = frames_[i].array ? child(p, frames_[i].index) : child(p, frames_[i].key);
    return p;
  }

  std::size_t string_start(std::size_t close_quote) const {
    std::size_t i = close_quote;
    while (i > 0) {
      --i;
      if (text_[i] == '"') {
        std::size_t bs = 0;
        for (std::size_t j = i; j > 0 && text_[j - 1] == '\\'; --j) ++bs;
        if (bs % 2 == 0) return i;
      }
    }
    return 0;
  }

  // Offset of the token that just ended (the lexer may have read one character ahead).
  std::size_t token_start() const {
    std::size_t end = *consumed_ == 0 ? 0 : *consumed_ - 1;
    auto delim = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ']' || c == '}' || c == ':'; };
    while (end > 0 && delim(text_[end])) --end;
    if (text_[end] == '"') return string_start(end);
    std::size_t s = end;
    while (s > 0 && !delim(text_[s - 1]) && text_[s - 1] != '[' && text_[s - 1] != '{') --s;
    return s;
  }

  bool here(std::size_t offset) {
    if (path(frames_.size()) == target_) {
      found = offset;
      return false;
    }
    return true;
  }
  void advance() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }
  bool scalar() {
    if (!here(token_start())) return false;
    advance();
    return true;
  }
  bool open(bool array) {
    if (!here(*consumed_ - 1)) return false;
    frames_.push_back({array, 0, {}});
    return true;
  }
  bool close() {
    frames_.pop_back();
    advance();
    return true;
  }

  const std::string& text_;
  std::string target_;
  const std::size_t* consumed_;
  std::vector<Frame> frames_;
};

inline std::size_t locate(const std::string& text, const std::string& pointer) {
  std::size_t consumed = 0;
  Locator loc(text, pointer, &consumed);
  CountingIterator first{text.data(), &consumed}, last{text.data() + text.size(), &consumed};
  Json::sax_parse(first, last, &loc);
  return loc.found.value_or(0);
}

// ---- reading ----

class Reader {
 public:
  static void expect_object(const Json& j, const std::string& ptr, std::initializer_list<const char*> required,
                            std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw DomError{ptr, "expected an object"};
    std::set<std::string> allowed;
    for (const char* k : required) allowed.insert(k);
    for (const char* k : optional) allowed.insert(k);
    for (const auto& [k, v] : j.items())
      if (!allowed.count(k)) throw DomError{child(ptr, k), "unknown field '" + k + "'"};
    for (const char* k : required)
      if (!j.contains(k)) throw DomError{ptr, std::string("missing field '") + k + "'"};
  }

  static const Json& array(const Json& j, const std::string& ptr) {
    if (!j.is_array()) throw DomError{ptr, "expected an array"};
    return j;
  }

  static int small_int(const Json& j, const std::string& ptr) {
    if (!j.is_number_integer()) throw DomError{ptr, "expected an integer"};
    const auto v = j.get<long long>();
    if (v < -1000000 || v > 1000000) throw DomError{ptr, "integer out of range"};
    return static_cast<int>(v);
  }

  static bool boolean(const Json& j, const std::string& ptr) {
    if (!j.is_boolean()) throw DomError{ptr, "expected true or false"};
    return j.get<bool>();
  }

  static std::string text(const Json& j, const std::string& ptr) {
    if (!j.is_string()) throw DomError{ptr, "expected a string"};
    return j.get<std::string>();
  }

  static Integer integer(const Json& j, const std::string& ptr) {
    if (!j.is_string()) throw DomError{ptr, "matrix entries must be decimal integer strings"};
    const std::string s = j.get<std::string>();
    std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (i == s.size()) throw DomError{ptr, "not an integer: \"" + s + "\""};
    for (std::size_t k = i; k < s.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(s[k]))) throw DomError{ptr, "not an integer: \"" + s + "\""};
    return Integer(s);
  }

  static ModulePtr module(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"lo", "weights", "max_weight"}, {"hi"});
    const int lo = small_int(j["lo"], child(ptr, "lo"));
    const int maxw = small_int(j["max_weight"], child(ptr, "max_weight"));
    if (maxw < 0) throw DomError{child(ptr, "max_weight"), "max_weight must be >= 0"};
    const std::string wp = child(ptr, "weights");
    const Json& ws = array(j["weights"], wp);
    std::vector<std::vector<int>> weights;
    for (std::size_t n = 0; n < ws.size(); ++n) {
      const std::string np = child(wp, n);
      std::vector<int> row;
      const Json& r = array(ws[n], np);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const int w = small_int(r[i], child(np, i));
        if (w < 0 || w > maxw) throw DomError{child(np, i), "weight outside 0..max_weight"};
        row.push_back(w);
      }
      weights.push_back(std::move(row));
    }
    if (j.contains("hi")) {
      const int hi = small_int(j["hi"], child(ptr, "hi"));
      if (hi != lo + static_cast<int>(weights.size()) - 1)
        throw DomError{child(ptr, "hi"), "hi disagrees with the number of weight rows"};
    }
    return share(GradedModule::make(lo, weights, maxw));
  }

  // Inner map {degree, blocks}: one block per source degree, rows over the target basis.
  static GradedMap map(const Json& j, const std::string& ptr, const ModulePtr& src, const ModulePtr& dst,
                       std::optional<int> want_degree) {
    expect_object(j, ptr, {"degree", "blocks"});
    const int degree = small_int(j["degree"], child(ptr, "degree"));
    if (want_degree && degree != *want_degree)
      throw DomError{child(ptr, "degree"), "expected degree " + std::to_string(*want_degree)};
    GradedMap out(src, dst, degree);
    const std::string bp = child(ptr, "blocks");
    const Json& blocks = array(j["blocks"], bp);
    const std::size_t nblocks = src->hi >= src->lo ? std::size_t(src->hi - src->lo + 1) : 0;
    if (blocks.size() != nblocks)
      throw DomError{bp, "expected " + std::to_string(nblocks) + " blocks, one per source degree"};
    for (std::size_t k = 0; k < nblocks; ++k) {
      const int n = src->lo + static_cast<int>(k);
      const std::string kp = child(bp, k);
      const Json& rows = array(blocks[k], kp);
      IntMatrix& m = out.block(n);
      if (rows.size() != m.rows())
        throw DomError{kp, "expected " + std::to_string(m.rows()) + " rows (target rank in degree " +
                               std::to_string(n + degree) + ")"};
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string rp = child(kp, i);
        const Json& row = array(rows[i], rp);
        if (row.size() != m.cols())
          throw DomError{rp, "expected " + std::to_string(m.cols()) + " entries (source rank in degree " +
                                 std::to_string(n) + ")"};
        for (std::size_t c = 0; c < row.size(); ++c) m(i, c) = integer(row[c], child(rp, c));
      }
    }
    return out;
  }

  static ChainComplex complex(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"module", "d"});
    ModulePtr m = module(j["module"], child(ptr, "module"));
    return ChainComplex(m, map(j["d"], child(ptr, "d"), m, m, -1));
  }

  static GradedMap standalone_map(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"source", "target", "degree", "blocks"});
    ModulePtr s = module(j["source"], child(ptr, "source"));
    ModulePtr t = module(j["target"], child(ptr, "target"));
    Json inner = {{"degree", j["degree"]}, {"blocks", j["blocks"]}};
    return map(inner, ptr, s, t, std::nullopt);
  }

  static SdrData sdr(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"M", "N", "F", "G", "H"});
    SdrData s;
    s.M = complex(j["M"], child(ptr, "M"));
    s.N = complex(j["N"], child(ptr, "N"));
    s.F = map(j["F"], child(ptr, "F"), s.M.module, s.N.module, 0);
    s.G = map(j["G"], child(ptr, "G"), s.N.module, s.M.module, 0);
    s.H = map(j["H"], child(ptr, "H"), s.M.module, s.M.module, 1);
    return s;
  }

  static HeData he(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"M", "N", "F", "G", "H", "L"});
    HeData h;
    h.M = complex(j["M"], child(ptr, "M"));
    h.N = complex(j["N"], child(ptr, "N"));
    h.F = map(j["F"], child(ptr, "F"), h.M.module, h.N.module, 0);
    h.G = map(j["G"], child(ptr, "G"), h.N.module, h.M.module, 0);
    h.H = map(j["H"], child(ptr, "H"), h.M.module, h.M.module, 1);
    h.L = map(j["L"], child(ptr, "L"), h.N.module, h.N.module, 1);
    return h;
  }

  static SheData she(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"M", "N", "index_cap", "tail_is_zero", "F", "G", "H", "L"});
    SheData s;
    s.M = complex(j["M"], child(ptr, "M"));
    s.N = complex(j["N"], child(ptr, "N"));
    s.index_cap = small_int(j["index_cap"], child(ptr, "index_cap"));
    if (s.index_cap < 0) throw DomError{child(ptr, "index_cap"), "index_cap must be >= 0"};
    s.tail_is_zero = boolean(j["tail_is_zero"], child(ptr, "tail_is_zero"));
    auto list = [&](const char* name, const ModulePtr& a, const ModulePtr& b, int odd) {
      const std::string lp = child(ptr, name);
      const Json& arr = array(j[name], lp);
      if (arr.size() != std::size_t(s.index_cap) + 1)
        throw DomError{lp, "expected index_cap + 1 = " + std::to_string(s.index_cap + 1) + " maps"};
      std::vector<GradedMap> out;
      for (std::size_t m = 0; m < arr.size(); ++m) out.push_back(map(arr[m], child(lp, m), a, b, 2 * int(m) + odd));
      return out;
    };
    s.F = list("F", s.M.module, s.N.module, 0);
    s.G = list("G", s.N.module, s.M.module, 0);
    s.H = list("H", s.M.module, s.M.module, 1);
    s.L = list("L", s.N.module, s.N.module, 1);
    return s;
  }

  static Perturbation perturbation(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"base", "delta"});
    Perturbation p;
    p.base = complex(j["base"], child(ptr, "base"));
    p.delta = map(j["delta"], child(ptr, "delta"), p.base.module, p.base.module, -1);
    return p;
  }

  static operad::Ambient ambient(const std::string& name, const std::string& ptr) {
    using operad::Ambient;
    for (Ambient a : {Ambient::Dif, Ambient::Rfake, Ambient::Riso, Ambient::DifRfake, Ambient::DifRiso,
                      Ambient::RisoTilde})
      if (name == operad::ambient_name(a)) return a;
    throw DomError{ptr, "unknown ambient '" + name + "'"};
  }

  static operad::Element element(const Json& j, const std::string& ptr) {
    expect_object(j, ptr, {"ambient", "expression"});
    const operad::Ambient a = ambient(text(j["ambient"], child(ptr, "ambient")), child(ptr, "ambient"));
    const std::string ep = child(ptr, "expression");
    try {
      return operad::parse_element(text(j["expression"], ep), a);
    } catch (const InvalidInput& e) {
      throw DomError{ep, e.what()};
    }
  }
};

// ---- writing ----

inline Json integer(const Integer& x) { return x.str(); }

inline Json module(const GradedModule& m) {
  Json w = Json::array();
  for (const auto& row : m.weights) w.push_back(row);
  return Json{{"lo", m.lo}, {"hi", m.hi}, {"weights", w}, {"max_weight", m.max_weight}};
}

inline Json blocks(const GradedMap& f) {
  Json bs = Json::array();
  for (int n = f.source()->lo; n <= f.source()->hi; ++n) {
    const IntMatrix& b = f.block_ref(n);
    Json rows = Json::array();
    for (std::size_t i = 0; i < b.rows(); ++i) {
      Json row = Json::array();
      for (std::size_t j = 0; j < b.cols(); ++j) row.push_back(integer(b(i, j)));
      rows.push_back(row);
    }
    bs.push_back(rows);
  }
  return bs;
}

inline Json map(const GradedMap& f) { return Json{{"degree", f.degree()}, {"blocks", blocks(f)}}; }

inline Json complex(const ChainComplex& c) { return Json{{"module", module(*c.module)}, {"d", map(c.d)}}; }

inline Json maps(const std::vector<GradedMap>& v) {
  Json a = Json::array();
  for (const auto& f : v) a.push_back(map(f));
  return a;
}

struct PayloadWriter {
  Json operator()(const ChainComplex& c) const { return complex(c); }
  Json operator()(const GradedMap& f) const {
    return Json{{"source", module(*f.source())},
                {"target", module(*f.target())},
                {"degree", f.degree()},
                {"blocks", blocks(f)}};
  }
  Json operator()(const SdrData& s) const {
    return Json{{"M", complex(s.M)}, {"N", complex(s.N)}, {"F", map(s.F)}, {"G", map(s.G)}, {"H", map(s.H)}};
  }
  Json operator()(const HeData& h) const {
    return Json{{"M", complex(h.M)}, {"N", complex(h.N)}, {"F", map(h.F)},
                {"G", map(h.G)},     {"H", map(h.H)},     {"L", map(h.L)}};
  }
  Json operator()(const SheData& s) const {
    return Json{{"M", complex(s.M)},        {"N", complex(s.N)},
                {"index_cap", s.index_cap}, {"tail_is_zero", s.tail_is_zero},
                {"F", maps(s.F)},           {"G", maps(s.G)},
                {"H", maps(s.H)},           {"L", maps(s.L)}};
  }
  Json operator()(const Perturbation& p) const { return Json{{"base", complex(p.base)}, {"delta", map(p.delta)}}; }
  Json operator()(const operad::Element& e) const {
    return Json{{"ambient", operad::ambient_name(e.ambient())}, {"expression", e.render()}};
  }
};

// Pretty printer: arrays of scalars stay on one line, everything else is indented.
inline void write(std::string& out, const Json& j, int indent) {
  auto flat = [](const Json& a) {
    for (const auto& x : a)
      if (x.is_structured()) return false;
    return true;
  };
  const std::string pad(std::size_t(indent) * 2, ' ');
  const std::string inner(std::size_t(indent + 1) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    std::size_t k = 0;
    for (const auto& [key, v] : j.items()) {
      out += inner + Json(key).dump() + ": ";
      write(out, v, indent + 1);
      out += ++k < j.size() ? ",\n" : "\n";
    }
    out += pad + "}";
  } else if (j.is_array()) {
    if (j.empty() || flat(j)) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += inner;
      write(out, j[i], indent + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += pad + "]";
  } else {
    out += j.dump();
  }
}

}  // namespace detail

inline std::string to_text(const Json& j) {
  std::string out;
  detail::write(out, j, 0);
  return out + "\n";
}

inline Json envelope(const Document& doc) {
  return Json{{"format_version", kFormatVersion},
              {"kind", doc.kind()},
              {"payload", std::visit(detail::PayloadWriter{}, doc.payload)}};
}

inline std::string serialize(const Document& doc) { return to_text(envelope(doc)); }

inline Document parse(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    auto [l, c] = detail::line_column(text, offset);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(l, c, "", msg);
  }
  using R = detail::Reader;
  try {
    R::expect_object(j, "", {"format_version", "kind", "payload"});
    const std::string ver = R::text(j["format_version"], "/format_version");
    if (ver != kFormatVersion) throw detail::DomError{"/format_version", "unsupported format version '" + ver + "'"};
    const std::string kind = R::text(j["kind"], "/kind");
    const Json& p = j["payload"];
    if (kind == "complex") return {R::complex(p, "/payload")};
    if (kind == "map") return {R::standalone_map(p, "/payload")};
    if (kind == "sdr") return {R::sdr(p, "/payload")};
    if (kind == "he") return {R::he(p, "/payload")};
    if (kind == "she") return {R::she(p, "/payload")};
    if (kind == "perturbation") return {R::perturbation(p, "/payload")};
    if (kind == "operad-element") return {R::element(p, "/payload")};
    throw detail::DomError{"/kind", "unknown kind '" + kind + "'"};
  } catch (const detail::DomError& e) {
    auto [l, c] = detail::line_column(text, detail::locate(text, e.pointer));
    throw ParseError(l, c, e.pointer, e.message);
  }
}

}  // namespace ipl::io
