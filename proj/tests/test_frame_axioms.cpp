#include <algorithm>

#include "doctest.h"
#include "separata/frame_axioms.hpp"

using namespace separata;

namespace {

bool has_condition(const std::vector<Violation>& v, int c) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.condition == c; });
}

}  // namespace

TEST_CASE("four format conditions") {
  auto naive = parse_axiom(
      "assoc-naive: forall h1 h2 h3 h4 h5. [] [(h1,h5 > h4); (h2,h3 > h5)] => exists h6. [(h6,h3 > h4); (h1,h2 > h6)]");
  auto v = validate_axiom(naive);
  REQUIRE_FALSE(v.empty());
  CHECK(has_condition(v, 3));

  CHECK(validate_axiom(builtin_axiom("assoc")).empty());
  CHECK(validate_axiom(builtin_axiom("comm")).empty());

  auto eq_in_antecedent = parse_axiom("bad: forall x y. [] [x = y] => []");
  CHECK(has_condition(validate_axiom(eq_in_antecedent), 1));

  auto unit_in_ternary = parse_axiom("bad: forall x y. [] [(x,e > y)] => [x = y]");
  CHECK(has_condition(validate_axiom(unit_in_ternary), 4));
}

TEST_CASE("every builtin axiom validates") {
  for (const auto& n : builtin_axiom_names()) {
    CAPTURE(n);
    CHECK(validate_axiom(builtin_axiom(n)).empty());
  }
}

TEST_CASE("axiom DSL round trip and errors") {
  for (const auto& n : builtin_axiom_names()) {
    const FrameAxiom& a = builtin_axiom(n);
    FrameAxiom b = parse_axiom(render_axiom(a));
    CHECK(render_axiom(b) == render_axiom(a));
  }
  try {
    parse_axioms("# comment\n\ncomm: forall a b c. [] [(a,b > c)] => [(b,a > c)]\nbroken: forall\n");
    FAIL("no error");
  } catch (const AxiomParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("synthesised rule keeps the axiom's parts") {
  StructuralRule r = synthesize_rule(builtin_axiom("assoc"));
  CHECK(r.antecedent.size() == 2);
  CHECK(r.side.size() == 1);
  CHECK(r.fresh.size() == 1);
  CHECK(r.added.size() == 2);
  CHECK_THROWS_AS(synthesize_rule(parse_axiom(
                      "n: forall h1 h2 h3 h4 h5. [] [(h1,h5 > h4); (h2,h3 > h5)] => [(h1,h2 > h4)]")),
                  InvalidAxiom);
}

TEST_CASE("identity elimination splits into two substitution rules") {
  auto rules = to_subst_rules(synthesize_rule(builtin_axiom("unit-elim")));
  REQUIRE(rules.size() == 2);
  CHECK(canonical_key(rules[0]) != canonical_key(rules[1]));
  for (const auto& r : rules) CHECK(r.substs.size() == 1);
}

TEST_CASE("substitution away from the unit is never produced") {
  for (const auto& n : builtin_axiom_names())
    for (const auto& r : to_subst_rules(synthesize_rule(builtin_axiom(n))))
      for (const auto& [from, to] : r.substs) CHECK(from != kEpsilon);
}

TEST_CASE("canonical keys ignore variable names and atom order") {
  auto a = synthesize_rule(parse_axiom("c1: forall x y z. [] [(x,y > z)] => [(y,x > z)]"));
  auto b = synthesize_rule(parse_axiom("c2: forall p q r. [] [(q,p > r)] => [(p,q > r)]"));
  CHECK(canonical_key(a) == canonical_key(b));
  auto c = synthesize_rule(parse_axiom("c3: forall p q r. [] [(q,p > r)] => [(p,r > q)]"));
  CHECK(canonical_key(a) != canonical_key(c));
}

TEST_CASE("builtin systems") {
  auto pasl = builtin_system("pasl");
  CHECK(pasl.axioms.size() == 6);
  CHECK_FALSE(pasl.em);
  auto d = builtin_system("pasl+d");
  CHECK(d.iu_shortcut);
  CHECK(d.rules.size() == 8);
  auto s = builtin_system("pasl+s");
  CHECK(s.em);
  CHECK(s.neq);
  CHECK(builtin_system("bbi-nd").axioms.size() == 4);
  CHECK_THROWS_AS(builtin_system("nope"), UnknownSystem);
  CHECK_THROWS_AS(builtin_system("pasl+zz"), UnknownSystem);
}

TEST_CASE("custom axiom with an inequality forces excluded middle") {
  auto cfg = system_from_axioms("custom", {builtin_axiom("unit-elim"), builtin_axiom("unit-intro"),
                                            builtin_axiom("comm"), builtin_axiom("extend"),
                                            parse_axiom("nz: forall x. [] [x != e] => exists y. [(x,y > x)]")});
  CHECK(cfg.em);
  CHECK(cfg.neq);
}
