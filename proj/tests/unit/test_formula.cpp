#include <catch2/catch_amalgamated.hpp>
#include <stit/formula.hpp>

using namespace stit;

TEST_CASE("parse and render round-trip") {
  std::vector<std::pair<std::string, Logic>> cases = {
      {"p | ~p", Logic::Ldm},
      {"p & (q | ~r)", Logic::Ldm},
      {"[]p -> <1>q", Logic::Ldm},
      {"<>([1]p & [2]q)", Logic::Ldm},
      {"G p -> F (P p)", Logic::Tstit},
      {"[Ag](p | q) & H p", Logic::Tstit},
      {"[X]p -> [{1}]x p", Logic::Xstit},
      {"<{1,2}>x p | [{}]x q", Logic::Xstit},
  };
  for (const auto& [text, lg] : cases) {
    Fml f = parse(text, lg, 2);
    Fml again = parse(render(f), lg, 2);
    INFO(text << " rendered as " << render(f));
    CHECK(fml_equal(f, again));
  }
}

TEST_CASE("negation is an involution in negation normal form") {
  std::vector<std::string> texts = {
      "p", "~p", "p & q", "p | ~q", "[]p", "<>p", "[1]p", "<2>~p",
      "[](p -> q)", "<>([1]p & [2]~q)"};
  for (const auto& t : texts) {
    Fml f = parse(t, Logic::Ldm, 2);
    CHECK(fml_equal(negate(negate(f)), f));
  }
  Fml g = parse("G p & [Ag]q", Logic::Tstit, 2);
  CHECK(fml_equal(negate(negate(g)), g));
  Fml x = parse("[{1}]x p | [X]q", Logic::Xstit, 2);
  CHECK(fml_equal(negate(negate(x)), x));
}

TEST_CASE("negation dualizes every connective") {
  CHECK(negate(parse("p & q", Logic::Ldm, 1))->kind == FKind::Or);
  CHECK(negate(parse("[]p", Logic::Ldm, 1))->kind == FKind::Diamond);
  CHECK(negate(parse("[1]p", Logic::Ldm, 1))->kind == FKind::StitDual);
  CHECK(negate(parse("G p", Logic::Tstit, 1))->kind == FKind::F);
  CHECK(negate(parse("H p", Logic::Tstit, 1))->kind == FKind::P);
  CHECK(negate(parse("[Ag]p", Logic::Tstit, 1))->kind == FKind::AgStitDual);
  CHECK(negate(parse("[X]p", Logic::Xstit, 1))->kind == FKind::NextDual);
  CHECK(negate(parse("[{1}]x p", Logic::Xstit, 1))->kind == FKind::XStitDual);
}

TEST_CASE("implication desugars through negation") {
  Fml f = parse("p -> q", Logic::Ldm, 1);
  REQUIRE(f->kind == FKind::Or);
  CHECK(f->left->kind == FKind::NegAtom);
  Fml e = parse("p <-> q", Logic::Ldm, 1);
  CHECK(e->kind == FKind::And);
}

TEST_CASE("agent groups") {
  CHECK(full_group(2) == 3);
  CHECK(group_subset(1, 3));
  CHECK_FALSE(group_subset(3, 1));
  CHECK(group_text(0) == "{}");
  CHECK(group_text(3) == "{1,2}");
}

TEST_CASE("tier guards") {
  CHECK(well_formed(parse("[1]p", Logic::Ldm, 2), Logic::Ldm, 2));
  CHECK_FALSE(well_formed(parse("[2]p", Logic::Ldm, 2), Logic::Ldm, 1));
  CHECK_FALSE(fits_logic(parse("G p", Logic::Tstit, 2), Logic::Ldm));
  CHECK_FALSE(fits_logic(parse("[{1}]x p", Logic::Xstit, 2), Logic::Tstit));
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("p &", Logic::Ldm, 1), ParseError);
  CHECK_THROWS_AS(parse("(p | q", Logic::Ldm, 1), ParseError);
  CHECK_THROWS_AS(parse("p)", Logic::Ldm, 1), ParseError);
  CHECK_THROWS_AS(parse("[3]p", Logic::Ldm, 2), ParseError);
  CHECK_THROWS_AS(parse("G p", Logic::Ldm, 1), ParseError);
}
