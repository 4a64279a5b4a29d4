#include <catch2/catch_amalgamated.hpp>
#include <stit/prover.hpp>

using namespace stit;

namespace {

ProveResult prove_text(const std::string& text, Logic lg, int agents = 2) {
  Sequent s;
  s.logic = lg;
  s.agents = agents;
  s.add(SequentItem::lab(0, parse(text, lg, agents)));
  return prove(s);
}

}  // namespace

TEST_CASE("derivable and refutable staples per tier") {
  CHECK(prove_text("p | ~p", Logic::Ldm).outcome == Outcome::Derivable);
  CHECK(prove_text("<>p -> []<>p", Logic::Ldm).outcome == Outcome::Derivable);
  CHECK(prove_text("[]p -> [1]p", Logic::Ldm).outcome == Outcome::Derivable);
  CHECK(prove_text("[1]p -> []p", Logic::Ldm).outcome == Outcome::Refuted);
  CHECK(prove_text("p -> []<1>p", Logic::Ldm).outcome == Outcome::Refuted);

  CHECK(prove_text("G p -> F p", Logic::Tstit).outcome == Outcome::Derivable);
  CHECK(prove_text("p -> G (P p)", Logic::Tstit).outcome == Outcome::Derivable);
  CHECK(prove_text("F (F p) -> F p", Logic::Tstit).outcome == Outcome::Derivable);
  CHECK(prove_text("F p -> G p", Logic::Tstit).outcome == Outcome::Refuted);

  CHECK(prove_text("<X>p -> [X]p", Logic::Xstit).outcome == Outcome::Derivable);
  CHECK(prove_text("[{1}]x p -> [{1,2}]x p", Logic::Xstit).outcome ==
        Outcome::Derivable);
  CHECK(prove_text("[{1,2}]x p -> [{1}]x p", Logic::Xstit).outcome ==
        Outcome::Refuted);
}

TEST_CASE("independence of agents closes through the system of rules") {
  ProveResult ldm = prove_text("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)",
                               Logic::Ldm);
  REQUIRE(ldm.outcome == Outcome::Derivable);
  ProveResult x = prove_text(
      "(<>[{1}]x p & <>[{2}]x q) -> <>([{1}]x p & [{2}]x q)", Logic::Xstit);
  REQUIRE(x.outcome == Outcome::Derivable);
  // The certificate really uses the system of rules.
  bool uses_e = false, uses_u1 = false, uses_u2 = false;
  std::function<void(const ProofNode&)> walk = [&](const ProofNode& n) {
    if (n.rule == "ioa_e") uses_e = true;
    if (n.rule.rfind("ioa_u1", 0) == 0) uses_u1 = true;
    if (n.rule.rfind("ioa_u2", 0) == 0) uses_u2 = true;
    for (const auto& c : n.children) walk(c);
  };
  walk(x.proof);
  CHECK(uses_e);
  CHECK(uses_u1);
  CHECK(uses_u2);
}

TEST_CASE("certificates pass the independent checker") {
  for (const char* text : {"p | ~p", "[]p -> [1]p",
                           "(<>[1]p & <>[2]q) -> <>([1]p & [2]q)"}) {
    ProveResult r = prove_text(text, Logic::Ldm);
    REQUIRE(r.outcome == Outcome::Derivable);
    CHECK(check_proof(r.proof, Logic::Ldm, 2).ok);
  }
}

TEST_CASE("mutated certificates are rejected") {
  ProveResult r = prove_text("[]p -> [1]p", Logic::Ldm);
  REQUIRE(r.outcome == Outcome::Derivable);

  SECTION("wrong rule name") {
    ProofNode bad = r.proof;
    bad.rule = "and";
    CheckResult c = check_proof(bad, Logic::Ldm, 2);
    CHECK_FALSE(c.ok);
    CHECK_FALSE(c.error.empty());
  }
  SECTION("leaf is not initial") {
    ProofNode bad = r.proof;
    ProofNode* n = &bad;
    while (!n->children.empty()) n = &n->children.front();
    n->rule = "id";
    n->sequent = parse_sequent("w0: p", Logic::Ldm, 2);
    CHECK_FALSE(check_proof(bad, Logic::Ldm, 2).ok);
  }
  SECTION("dropped premise") {
    ProofNode bad = r.proof;
    ProofNode* n = &bad;
    while (!n->children.empty() && !n->children.front().children.empty())
      n = &n->children.front();
    n->children.clear();
    CHECK_FALSE(check_proof(bad, Logic::Ldm, 2).ok);
  }
}

TEST_CASE("proof json round-trips") {
  ProveResult r = prove_text("<>p -> []<>p", Logic::Ldm);
  REQUIRE(r.outcome == Outcome::Derivable);
  nlohmann::json j = proof_to_json(r.proof);
  ProofNode back = proof_from_json(j, Logic::Ldm, 2);
  CHECK(check_proof(back, Logic::Ldm, 2).ok);
  CHECK(proof_to_json(back) == j);
}

TEST_CASE("search is deterministic") {
  for (int t : {1, 4}) {
    SearchConfig cfg;
    cfg.threads = t;
    Sequent s;
    s.logic = Logic::Ldm;
    s.agents = 2;
    s.add(SequentItem::lab(0, parse("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)",
                                    Logic::Ldm, 2)));
    ProveResult a = prove(s, cfg);
    ProveResult b = prove(s, cfg);
    REQUIRE(a.outcome == Outcome::Derivable);
    CHECK(proof_to_json(a.proof) == proof_to_json(b.proof));
    CHECK(a.fuel_used == b.fuel_used);
  }
}

TEST_CASE("fuel exhaustion reports unknown") {
  SearchConfig cfg;
  cfg.fuel = 3;
  Sequent s;
  s.logic = Logic::Ldm;
  s.agents = 2;
  s.add(SequentItem::lab(
      0, parse("(<>[1]p & <>[2]q) -> <>([1]p & [2]q)", Logic::Ldm, 2)));
  ProveResult r = prove(s, cfg);
  CHECK(r.outcome == Outcome::Unknown);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("refutations come with verified countermodels") {
  for (auto [text, lg] : std::vector<std::pair<const char*, Logic>>{
           {"p -> []p", Logic::Ldm},
           {"p -> [1]p", Logic::Ldm},
           {"G p -> p", Logic::Tstit},
           {"[X]p -> p", Logic::Xstit},
           {"[{1}]x p -> [{2}]x p", Logic::Xstit}}) {
    ProveResult r = prove_text(text, lg);
    INFO(text);
    REQUIRE(r.outcome == Outcome::Refuted);
    REQUIRE(r.counter.ok);
    FrameReport rep = validate_frame(r.counter.model);
    if (lg != Logic::Tstit) CHECK(rep.ok());
  }
}
