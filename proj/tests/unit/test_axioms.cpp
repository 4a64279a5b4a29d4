#include <catch2/catch_amalgamated.hpp>
#include <stit/axioms.hpp>

using namespace stit;

TEST_CASE("corpus sizes are stable") {
  CHECK(axiom_corpus(Logic::Ldm, 2).size() == 39);
  CHECK(axiom_corpus(Logic::Tstit, 2).size() == 58);
  CHECK(axiom_corpus(Logic::Xstit, 2).size() == 84);
}

TEST_CASE("every instance is well formed for its tier") {
  for (Logic lg : {Logic::Ldm, Logic::Tstit, Logic::Xstit})
    for (const auto& in : axiom_corpus(lg, 2)) {
      INFO(in.schema << " [" << in.parameters << "]");
      CHECK(well_formed(in.formula, lg, 2));
      Sequent s = in.sequent(lg, 2);
      CHECK(s.items.size() == 1);
      CHECK(s.items[0].a == 0);
    }
}

TEST_CASE("schema inventory per tier") {
  auto names = [](Logic lg) {
    std::set<std::string> out;
    for (const auto& s : axiom_schemas(lg)) out.insert(s.name);
    return out;
  };
  auto ldm = names(Logic::Ldm);
  CHECK(ldm.count("ioa"));
  CHECK(ldm.count("bridge"));
  CHECK_FALSE(ldm.count("gp"));
  auto tstit = names(Logic::Tstit);
  CHECK(tstit.count("ncuh"));
  CHECK(tstit.count("conn_fp"));
  CHECK(tstit.count("meet_ag"));
  auto xstit = names(Logic::Xstit);
  CHECK(xstit.count("ioa_x"));
  CHECK(xstit.count("mono_xstit"));
  CHECK(xstit.count("empty_next"));
  CHECK_FALSE(xstit.count("bridge"));
}

TEST_CASE("inference rules are listed but build no instances") {
  for (Logic lg : {Logic::Ldm, Logic::Tstit, Logic::Xstit}) {
    bool saw_mp = false;
    for (const auto& s : axiom_schemas(lg)) {
      if (s.inference_rule) {
        saw_mp = saw_mp || s.name == "mp";
        CHECK(instantiate(s, 2, {mk_atom("p")}).empty());
      }
    }
    CHECK(saw_mp);
  }
}

TEST_CASE("instances serialize with schema and parameters") {
  auto corpus = axiom_corpus(Logic::Ldm, 2);
  auto j = axiom_instance_to_json(corpus.front(), Logic::Ldm, 2);
  CHECK(j.contains("schema"));
  CHECK(j.contains("parameters"));
  CHECK(j.contains("sequent"));
}
