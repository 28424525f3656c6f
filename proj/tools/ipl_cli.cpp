// Command-line front end. Every command reads documents, calls one library
// operation and writes documents or a short text summary.
//
// Exit codes: 0 ok, 1 invalid input, 2 side conditions fail, 3 obstruction
// class nonzero, 4 identity failure.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ipl/ipl.hpp"

namespace {

using namespace ipl;
using io::Json;

enum Exit { kOk = 0, kInvalid = 1, kSideConditions = 2, kObstructed = 3, kIdentity = 4 };

struct Outcome {
  int code = kOk;
  std::string message;
  Report findings;
  Json data = Json::object();
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::Document load(const std::string& path) {
  try {
    return io::parse(read_file(path));
  } catch (const io::ParseError& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void emit(const std::string& out_path, const io::Document& doc) {
  const std::string text = io::serialize(doc);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + out_path);
  out << text;
}

Json findings_json(const Report& r) {
  Json a = Json::array();
  for (const auto& f : r.findings) a.push_back(Json{{"check", f.check}, {"detail", f.detail}});
  return a;
}

std::string one_line(const GradedMap& f) { return io::detail::blocks(f).dump(); }

Outcome report_validity(const Report& r) {
  Outcome o;
  o.findings = r;
  o.code = r.ok() ? kOk : kInvalid;
  o.message = r.ok() ? "valid" : "invalid";
  return o;
}

Outcome cmd_validate(const std::string& file) {
  const io::Document doc = load(file);
  struct V {
    Report operator()(const ChainComplex& c) const { return validate_complex(c); }
    Report operator()(const GradedMap& f) const {
      Report r;
      expect_filtered(r, "map", f);
      return r;
    }
    Report operator()(const SdrData& s) const { return validate_sdr(s); }
    Report operator()(const HeData& h) const { return validate_he(h); }
    Report operator()(const SheData& s) const { return validate_she(s); }
    Report operator()(const Perturbation& p) const { return validate_perturbation(p); }
    Report operator()(const operad::Element&) const { return {}; }
  };
  Outcome o = report_validity(std::visit(V{}, doc.payload));
  o.message = doc.kind() + ": " + o.message;
  return o;
}

Outcome cmd_bpl(const std::string& sdr_file, const std::string& delta_file, const std::string& out) {
  const SdrData s = load(sdr_file).as<SdrData>("sdr");
  const Perturbation p = load(delta_file).as<Perturbation>("perturbation");
  if (Report r = validate_sdr(s); !r.ok()) return report_validity(r);
  const SideConditions sc = check_side_conditions(s);
  Outcome o;
  o.data = Json{{"hh_zero", sc.hh_zero}, {"hg_zero", sc.hg_zero}, {"fh_zero", sc.fh_zero}};
  if (!sc.all()) {
    o.code = kSideConditions;
    o.message = std::string("side conditions fail:") + (sc.hh_zero ? "" : " HH != 0") + (sc.hg_zero ? "" : " HG != 0") +
                (sc.fh_zero ? "" : " FH != 0");
    return o;
  }
  emit(out, {bpl_transfer(s, p)});
  o.message = "transferred";
  return o;
}

Outcome cmd_obstruction(const std::string& he_file) {
  const HeData he = load(he_file).as<HeData>("he");
  const ObstructionPair p = obstruction_cycles(he);
  const bool linked = obstruction_classes_linked(he);
  auto status = [](bool v) { return v ? "vanishes" : "nonzero"; };
  std::cout << "o_M = " << one_line(p.o_M) << "\n";
  std::cout << "o_N = " << one_line(p.o_N) << "\n";
  std::cout << "[o_M] " << status(p.class_M_vanishes) << "\n";
  std::cout << "[o_N] " << status(p.class_N_vanishes) << "\n";
  if (p.witness_M) std::cout << "witness_M = " << one_line(*p.witness_M) << "\n";
  if (p.witness_N) std::cout << "witness_N = " << one_line(*p.witness_N) << "\n";
  Outcome o;
  o.code = linked ? kOk : kObstructed;
  o.message = linked ? "obstruction classes vanish" : "obstruction classes nonzero";
  o.data = Json{{"o_M", io::detail::blocks(p.o_M)},
                {"o_N", io::detail::blocks(p.o_N)},
                {"class_M_vanishes", p.class_M_vanishes},
                {"class_N_vanishes", p.class_N_vanishes}};
  return o;
}

Outcome cmd_modify(const std::string& he_file, const std::string& which, const std::string& out) {
  const HeData he = load(he_file).as<HeData>("he");
  const ModifiedHe m = which == "h" ? modify_homotopy_H(he) : modify_homotopy_L(he);
  emit(out, {m.he});
  return {kOk, "modified " + which, {}, Json::object()};
}

Outcome cmd_extend(const std::string& he_file, int cap, const std::string& out) {
  const HeData he = load(he_file).as<HeData>("he");
  emit(out, {extend_to_she(he, cap)});
  return {kOk, "extended to index cap " + std::to_string(cap), {}, Json::object()};
}

Outcome cmd_ipl(const std::string& she_file, const std::string& delta_file, const std::string& out) {
  const io::Document d = load(she_file);
  const SheData s = d.kind() == "he" ? SheData::from_he(d.as<HeData>("he")) : d.as<SheData>("she");
  const Perturbation p = load(delta_file).as<Perturbation>("perturbation");
  const PerturbedShe r = ipl_perturb(s, p);
  emit(out, {r.she});
  Outcome o;
  o.message = "perturbed, output index cap " + std::to_string(r.she.index_cap);
  o.data = Json{{"caps", r.caps.to_string()}};
  return o;
}

Outcome cmd_pp(const std::string& he_file, const std::string& delta_file, const std::string& strategy,
               const std::string& out) {
  const HeData he = load(he_file).as<HeData>("he");
  const Perturbation p = load(delta_file).as<Perturbation>("perturbation");
  PpStrategy st = PpStrategy::ModifyH;
  if (strategy == "modify-l") st = PpStrategy::ModifyL;
  if (strategy == "as-is") st = PpStrategy::AsIs;
  const PpSolution sol = solve_pp(he, p, st);
  emit(out, {sol.perturbed});
  Outcome o;
  o.message = std::string("solved with ") + strategy_name(st);
  o.data = Json{{"used_trivial_extension", sol.used_trivial_extension}};
  return o;
}

Outcome cmd_operad_verify(const std::string& caps_text) {
  const operad::TruncationCaps caps =
      caps_text.empty() ? operad::TruncationCaps::defaults() : operad::TruncationCaps::parse(caps_text);
  const operad::IdentitySuiteReport rep = operad::verify_identity_suite(caps);
  std::cout << rep.render();
  Outcome o;
  o.code = rep.all_passed() ? kOk : kIdentity;
  o.message = rep.all_passed() ? "all identities hold" : "identity failure";
  for (const auto& r : rep.results)
    if (!r.passed) o.findings.add(r.name, r.first_failure);
  o.data = Json{{"caps", caps.to_string()}};
  return o;
}

Outcome cmd_operad_eval(const std::string& expr, const std::string& action_file, const std::string& ambient,
                        const std::string& delta_file, const std::string& out) {
  const io::Document d = load(action_file);
  const SheData s = d.kind() == "he" ? SheData::from_he(d.as<HeData>("he")) : d.as<SheData>("she");
  std::optional<Perturbation> p;
  if (!delta_file.empty()) p = load(delta_file).as<Perturbation>("perturbation");
  const OperadAction act = OperadAction::from_she(s, p ? &p->delta : nullptr);
  operad::Ambient amb = operad::Ambient::DifRiso;
  try {
    amb = io::detail::Reader::ambient(ambient, "--ambient");
  } catch (const io::detail::DomError& e) {
    throw InvalidInput(e.message);
  }
  emit(out, {evaluate(operad::parse_element(expr, amb), act)});
  return {kOk, "evaluated", {}, Json::object()};
}

Outcome cmd_fixture(std::uint64_t seed, const std::string& ranks, int filtration, const std::string& kind,
                    const std::string& out) {
  FixtureShape shape;
  shape.filtration_length = filtration;
  std::stringstream ss(ranks);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidInput("--ranks must be a comma-separated list of non-negative integers");
    shape.ranks.push_back(std::stoul(tok));
  }
  const Fixture fx = fixture_generate(seed, shape);
  if (kind == "sdr") emit(out, {fx.sdr});
  else if (kind == "he") emit(out, {fx.he});
  else emit(out, {fx.perturbation});
  return {kOk, "generated " + kind, {}, Json::object()};
}

void write_report(const std::string& path, const std::string& command, const Outcome& o) {
  Json r{{"command", command},
         {"exit_code", o.code},
         {"ok", o.code == kOk},
         {"message", o.message},
         {"findings", findings_json(o.findings)},
         {"data", o.data}};
  std::ofstream out(path, std::ios::binary);
  out << io::to_text(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation of chain homotopy equivalences over the integers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string report_path;
  app.add_option("--report", report_path, "Write a machine-readable JSON report");

  std::function<Outcome()> run;
  std::string command;
  auto on = [&](CLI::App* sub, std::function<Outcome()> fn) {
    sub->callback([&, sub, fn] {
      command = sub->get_name();
      if (auto* parent = sub->get_parent(); parent && parent != &app) command = parent->get_name() + " " + command;
      run = fn;
    });
  };

  std::string file, sdr, delta, he, she, out, which = "h", strategy = "modify-h", caps, expr, action,
                                               ambient = "Dif*Riso", ranks = "2,1", kind = "sdr";
  int cap = 1, filtration = 2;
  std::uint64_t seed = 0;

  auto* v = app.add_subcommand("validate", "Run the validator for the document's kind");
  v->add_option("file", file)->required();
  on(v, [&] { return cmd_validate(file); });

  auto* b = app.add_subcommand("bpl", "Transfer a perturbation across SDR data");
  b->add_option("--sdr", sdr)->required();
  b->add_option("--delta", delta, "Perturbation document")->required();
  b->add_option("-o,--output", out);
  on(b, [&] { return cmd_bpl(sdr, delta, out); });

  auto* ob = app.add_subcommand("obstruction", "Obstruction cycles and their classes");
  ob->add_option("--he", he)->required();
  on(ob, [&] { return cmd_obstruction(he); });

  auto* mo = app.add_subcommand("modify", "Modify a homotopy so the obstruction classes vanish");
  mo->add_option("--he", he)->required();
  mo->add_option("--which", which)->check(CLI::IsMember({"h", "l"}));
  mo->add_option("-o,--output", out);
  on(mo, [&] { return cmd_modify(he, which, out); });

  auto* ex = app.add_subcommand("extend", "Extend a homotopy equivalence to a SHE");
  ex->add_option("--he", he)->required();
  ex->add_option("--cap", cap)->check(CLI::NonNegativeNumber);
  ex->add_option("-o,--output", out);
  on(ex, [&] { return cmd_extend(he, cap, out); });

  auto* ip = app.add_subcommand("ipl", "Perturb a SHE");
  ip->add_option("--she", she)->required();
  ip->add_option("--delta", delta)->required();
  ip->add_option("-o,--output", out);
  on(ip, [&] { return cmd_ipl(she, delta, out); });

  auto* pp = app.add_subcommand("pp", "Solve the perturbation problem for a homotopy equivalence");
  pp->add_option("--he", he)->required();
  pp->add_option("--delta", delta)->required();
  pp->add_option("--strategy", strategy)->check(CLI::IsMember({"modify-h", "modify-l", "as-is"}));
  pp->add_option("-o,--output", out);
  on(pp, [&] { return cmd_pp(he, delta, strategy, out); });

  auto* op = app.add_subcommand("operad", "Symbolic operad computations");
  op->require_subcommand(1);
  auto* ov = op->add_subcommand("verify", "Run the identity suite");
  ov->add_option("--caps", caps, "index,length,fweight,degree (default: IPL_DEFAULT_CAPS or 4,5,3,8)");
  on(ov, [&] { return cmd_operad_verify(caps); });
  auto* oe = op->add_subcommand("eval", "Evaluate an element on the maps of a SHE");
  oe->add_option("--expr", expr)->required();
  oe->add_option("--action", action, "he or she document")->required();
  oe->add_option("--ambient", ambient);
  oe->add_option("--delta", delta, "Perturbation assigned to xbar");
  oe->add_option("-o,--output", out);
  on(oe, [&] { return cmd_operad_eval(expr, action, ambient, delta, out); });

  auto* fx = app.add_subcommand("fixture", "Generate a deterministic fixture");
  fx->add_option("--seed", seed);
  fx->add_option("--ranks", ranks);
  fx->add_option("--filtration", filtration)->check(CLI::PositiveNumber);
  fx->add_option("--kind", kind)->check(CLI::IsMember({"sdr", "he", "perturbation"}));
  fx->add_option("-o,--output", out);
  on(fx, [&] { return cmd_fixture(seed, ranks, filtration, kind, out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  Outcome o;
  try {
    o = run();
  } catch (const ExtensionObstructed& e) {
    o = {kObstructed, e.what(), {}, Json::object()};
  } catch (const ConsistencyError& e) {
    o = {kIdentity, e.what(), {}, Json::object()};
  } catch (const std::exception& e) {
    o = {kInvalid, e.what(), {}, Json::object()};
  }
  std::cerr << command << ": " << o.message << "\n";
  for (const auto& f : o.findings.findings) std::cerr << "  " << f.check << ": " << f.detail << "\n";
  if (!report_path.empty()) write_report(report_path, command, o);
  return o.code;
}
