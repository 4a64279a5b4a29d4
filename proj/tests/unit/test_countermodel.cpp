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

TEST_CASE("extracted models falsify the whole branch") {
  ProveResult r = prove_text("p -> []p", Logic::Ldm);
  REQUIRE(r.outcome == Outcome::Refuted);
  std::string why;
  Sequent root;
  root.logic = Logic::Ldm;
  root.agents = 2;
  root.add(SequentItem::lab(0, parse("p -> []p", Logic::Ldm, 2)));
  CHECK(verify_countermodel(r.counter.model, r.counter.interp, root, &why));
}

TEST_CASE("verification rejects a wrong valuation") {
  ProveResult r = prove_text("p -> []p", Logic::Ldm);
  REQUIRE(r.outcome == Outcome::Refuted);
  Sequent root;
  root.logic = Logic::Ldm;
  root.agents = 2;
  root.add(SequentItem::lab(0, parse("p -> []p", Logic::Ldm, 2)));
  RelationalModel wrong = r.counter.model;
  // Making p true everywhere stops the model falsifying p -> []p.
  std::set<int> all;
  for (int w = 0; w < wrong.world_count(); ++w) all.insert(w);
  wrong.valuation["p"] = all;
  std::string why;
  CHECK_FALSE(verify_countermodel(wrong, r.counter.interp, root, &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("joint choice saturation is repaired before refuting") {
  // The independence rule only fires on choice commitments during search,
  // so this branch needs the repair loop to satisfy C2.
  ProveResult r = prove_text("p -> []<1>p", Logic::Ldm);
  REQUIRE(r.outcome == Outcome::Refuted);
  CHECK(validate_frame(r.counter.model).ok());
}

TEST_CASE("tstit refutations flag the unexplored frontier") {
  ProveResult r = prove_text("F p", Logic::Tstit);
  REQUIRE(r.outcome == Outcome::Refuted);
  bool frontier_caveat = false;
  for (const auto& c : r.counter.caveats)
    if (c.rfind("frontier", 0) == 0) frontier_caveat = true;
  CHECK(frontier_caveat);
}

TEST_CASE("xstit extraction completes the next-state relation") {
  ProveResult r = prove_text("[X]p -> p", Logic::Xstit);
  REQUIRE(r.outcome == Outcome::Refuted);
  FrameReport rep = validate_frame(r.counter.model);
  CHECK(rep.ok());
  // Every world has its deterministic successor.
  CHECK(rep.failed("D2 RX serial") == nullptr);
}
