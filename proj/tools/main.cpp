// Command line front end: proof search, countermodel extraction, frame
// validation, model checking, axiom corpus generation and certificate
// checking over the stit library.
//
// Exit codes: prove/countermodel report 0 derivable, 1 refuted, 2 unknown;
// everywhere else 0 is success and 1 failure; 64 usage error, 65 parse error.

#include <CLI11.hpp>
#include <json.hpp>

#include <stit/axioms.hpp>
#include <stit/prover.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace stit;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

struct Options {
  std::string logic = "ldm";
  int agents = 2;
  long fuel = 100000;
  int max_labels = 64;
  std::string format = "text";
  unsigned seed = 0;
  int threads = 1;
  bool refute = false;
  bool as_sequent = false;
  std::string input;  // inline text or file path, subcommand dependent
  std::string formula;
};

std::string slurp(std::istream& in) {
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string read_input(const std::string& inline_text) {
  if (!inline_text.empty() && inline_text != "-") return inline_text;
  return slurp(std::cin);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return json::parse(in);
}

SearchConfig search_config(const Options& o) {
  SearchConfig cfg;
  cfg.fuel = o.fuel;
  cfg.max_fresh_labels = o.max_labels;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  return cfg;
}

Sequent goal_sequent(const Options& o, Logic logic) {
  std::string text = trim_copy(read_input(o.input));
  if (o.as_sequent) return parse_sequent(text, logic, o.agents);
  Fml f = parse(text, logic, o.agents);
  if (o.refute) f = negate(f);
  Sequent s;
  s.logic = logic;
  s.agents = o.agents;
  s.add(SequentItem::lab(0, f));
  return s;
}

void print_proof_text(const ProofNode& n, int depth) {
  std::cout << std::string(depth * 2, ' ') << n.rule << "  |-  "
            << n.sequent.text() << "\n";
  for (const auto& c : n.children) print_proof_text(c, depth + 1);
}

json interp_to_json(const Countermodel& cm) {
  json j = json::object();
  for (const auto& [lab, w] : cm.interp)
    j[label_name(lab)] = cm.model.world_names[w];
  return j;
}

json certificate_json(const Sequent& root, const ProveResult& r) {
  json j;
  j["logic"] = logic_name(root.logic);
  j["agents"] = root.agents;
  j["sequent"] = root.text();
  j["status"] = outcome_name(r.outcome);
  j["fuel"] = r.fuel_used;
  if (r.outcome == Outcome::Derivable) {
    j["height"] = r.height;
    j["proof"] = proof_to_json(r.proof);
  } else if (r.outcome == Outcome::Refuted) {
    j["model"] = model_to_json(r.counter.model);
    j["interpretation"] = interp_to_json(r.counter);
    j["caveats"] = r.counter.caveats;
  } else {
    j["note"] = r.note;
  }
  return j;
}

// The trace shows, for every root item, the world it lands on and why the
// model refutes the sequent there.
void print_falsification_trace(const Sequent& root, const Countermodel& cm) {
  for (const auto& it : root.items) {
    if (it.type != SequentItem::Lab) {
      std::cout << "  " << it.text() << "  holds in the model\n";
      continue;
    }
    int w = cm.interp.at(it.a);
    bool val = model_check(cm.model, w, it.f);
    std::cout << "  " << label_name(it.a) << ": " << render(it.f) << "  is "
              << (val ? "true" : "false") << " at " << cm.model.world_names[w]
              << "\n";
  }
}

int run_prove(const Options& o, bool want_model) {
  Logic logic = logic_from_name(o.logic);
  Sequent root = goal_sequent(o, logic);
  ProveResult r = prove(root, search_config(o));

  if (o.format == "json") {
    std::cout << certificate_json(root, r).dump(2) << "\n";
  } else if (r.outcome == Outcome::Derivable) {
    std::cout << "derivable (fuel " << r.fuel_used << ", height " << r.height
              << ")\n";
    if (!want_model) print_proof_text(r.proof, 0);
  } else if (r.outcome == Outcome::Refuted) {
    std::cout << "refuted (fuel " << r.fuel_used << ")\n";
    if (want_model) {
      std::cout << model_to_json(r.counter.model).dump(2) << "\n";
      for (const auto& c : r.counter.caveats)
        std::cout << "caveat: " << c << "\n";
      std::cout << "falsification trace:\n";
      print_falsification_trace(root, r.counter);
    }
  } else {
    std::cout << "unknown: " << r.note << "\n";
  }

  switch (r.outcome) {
    case Outcome::Derivable: return 0;
    case Outcome::Refuted: return 1;
    default: return 2;
  }
}

int run_check_model(const Options& o) {
  RelationalModel m = model_from_json(load_json_file(o.input));
  FrameReport rep = validate_frame(m);
  if (o.format == "json") {
    json verdicts = json::array();
    for (const auto& v : rep.verdicts)
      verdicts.push_back(
          {{"condition", v.condition}, {"pass", v.pass}, {"witness", v.witness}});
    std::cout << json{{"ok", rep.ok()}, {"verdicts", verdicts}}.dump(2) << "\n";
  } else {
    for (const auto& v : rep.verdicts) {
      if (v.pass)
        std::cout << v.condition << ": ok\n";
      else
        std::cout << v.condition << " violated at " << v.witness << "\n";
    }
  }
  return rep.ok() ? 0 : 1;
}

int run_model_check(const Options& o) {
  RelationalModel m = model_from_json(load_json_file(o.input));
  Fml f = parse(trim_copy(read_input(o.formula)), m.tier, m.agents);
  json worlds = json::object();
  bool all = true;
  for (int w = 0; w < m.world_count(); ++w) {
    bool val = model_check(m, w, f);
    all = all && val;
    worlds[m.world_names[w]] = val;
    if (o.format != "json")
      std::cout << m.world_names[w] << ": " << (val ? "true" : "false") << "\n";
  }
  if (o.format == "json")
    std::cout << json{{"formula", render(f)}, {"worlds", worlds}}.dump(2)
              << "\n";
  return all ? 0 : 1;
}

int run_axioms(const Options& o) {
  Logic logic = logic_from_name(o.logic);
  for (const auto& in : axiom_corpus(logic, o.agents))
    std::cout << axiom_instance_to_json(in, logic, o.agents).dump() << "\n";
  return 0;
}

int run_check_proof(const Options& o) {
  json j = o.input.empty() || o.input == "-" ? json::parse(slurp(std::cin))
                                             : load_json_file(o.input);
  Logic logic = logic_from_name(
      j.contains("logic") ? j.at("logic").get<std::string>() : o.logic);
  int agents = j.contains("agents") ? j.at("agents").get<int>() : o.agents;
  // Accept both a full prove certificate and a bare proof tree.
  const json& tree = j.contains("proof") ? j.at("proof") : j;
  if (j.contains("status") && j.at("status") != "derivable") {
    std::cout << "not a derivability certificate (status "
              << j.at("status").get<std::string>() << ")\n";
    return 1;
  }
  ProofNode root = proof_from_json(tree, logic, agents);
  CheckResult res = check_proof(root, logic, agents);
  if (o.format == "json") {
    std::cout << json{{"ok", res.ok}, {"error", res.error}}.dump(2) << "\n";
  } else if (res.ok) {
    std::cout << "proof accepted (height " << proof_height(root) << ", "
              << proof_size(root) << " nodes)\n";
  } else {
    std::cout << "proof rejected: " << res.error << "\n";
  }
  return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"proof search and countermodel toolkit for temporal stit logics"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c, bool search_flags) {
    c->add_option("--logic", o.logic, "ldm, tstit or xstit")
        ->check(CLI::IsMember({"ldm", "tstit", "xstit"}));
    c->add_option("--agents", o.agents)->check(CLI::Range(1, 16));
    c->add_option("--format", o.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    if (search_flags) {
      c->add_option("--fuel", o.fuel);
      c->add_option("--max-labels", o.max_labels);
      c->add_option("--seed", o.seed);
      c->add_option("--threads", o.threads)->check(CLI::Range(1, 64));
    }
    return c;
  };

  auto* prove_cmd = add_common(app.add_subcommand("prove", "search for a derivation"), true);
  prove_cmd->add_option("input", o.input, "formula text, or - for stdin");
  prove_cmd->add_flag("--refute", o.refute, "negate the formula first");
  prove_cmd->add_flag("--sequent", o.as_sequent, "treat the input as a labelled sequent");

  auto* cm_cmd = add_common(
      app.add_subcommand("countermodel", "search for a refuting model"), true);
  cm_cmd->add_option("input", o.input, "formula text, or - for stdin");
  cm_cmd->add_flag("--sequent", o.as_sequent, "treat the input as a labelled sequent");

  auto* chk_cmd = add_common(
      app.add_subcommand("check-model", "validate frame conditions of a model"), false);
  chk_cmd->add_option("model", o.input, "model JSON file")->required();

  auto* mc_cmd = add_common(
      app.add_subcommand("model-check", "evaluate a formula in every world"), false);
  mc_cmd->add_option("model", o.input, "model JSON file")->required();
  mc_cmd->add_option("formula", o.formula, "formula text, or - for stdin");

  add_common(app.add_subcommand("axioms", "emit the axiom corpus as JSON lines"), false);

  auto* cp_cmd = add_common(
      app.add_subcommand("check-proof", "verify a derivation certificate"), false);
  cp_cmd->add_option("proof", o.input, "certificate JSON file, or - for stdin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand("prove")) return run_prove(o, false);
    if (app.got_subcommand("countermodel")) return run_prove(o, true);
    if (app.got_subcommand("check-model")) return run_check_model(o);
    if (app.got_subcommand("model-check")) return run_model_check(o);
    if (app.got_subcommand("axioms")) return run_axioms(o);
    if (app.got_subcommand("check-proof")) return run_check_proof(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}
