#include "doctest.h"
#include "separata/calculus.hpp"
#include "separata/prover.hpp"

using namespace separata;

namespace {

Formula A(const char* n) { return Formula::atom(n); }

// Applies one logical rule at n and returns its first premise.
ProofNode* step(ProofNode* n, RuleKind k, LabelledFormula principal, LabelAllocator& alloc, const SystemConfig& cfg) {
  n->rule.kind = k;
  n->rule.principal = principal;
  Premises p = apply_logical(n->sequent, n->rule, alloc, cfg);
  for (auto& c : p.children) {
    ProofNode child;
    child.sequent = std::move(c);
    n->children.push_back(std::move(child));
  }
  return n->children.empty() ? nullptr : &n->children[0];
}

}  // namespace

TEST_CASE("zero-premise rules") {
  auto cfg = builtin_system("bbi-nd");
  Sequent s;
  s.gamma.insert({1, A("a")});
  s.delta.insert({1, A("a")});
  auto r = close_check(s, cfg);
  REQUIRE(r);
  CHECK(r->kind == RuleKind::Id);

  Sequent t;
  t.delta.insert({kEpsilon, Formula::emp()});
  CHECK(close_check(t, cfg)->kind == RuleKind::EmpR);

  Sequent u;
  u.gamma.insert({3, Formula::bot()});
  CHECK(close_check(u, cfg)->kind == RuleKind::BotL);

  Sequent v;
  v.delta.insert({3, Formula::top()});
  CHECK(close_check(v, cfg)->kind == RuleKind::TopR);

  Sequent open;
  open.gamma.insert({1, A("a")});
  open.delta.insert({2, A("a")});
  CHECK_FALSE(close_check(open, cfg));
}

TEST_CASE("identity in the equality calculus uses the judgment") {
  auto cfg = builtin_system("bbi-nd");
  cfg.calculus = Calculus::Equality;
  Sequent s;
  s.gamma.insert({1, A("a")});
  s.delta.insert({2, A("a")});
  CHECK_FALSE(close_check(s, cfg));
  s.add(RelAtom::eq(1, 2));
  CHECK(close_check(s, cfg));
}

TEST_CASE("hand transcription of the narrowing-unit derivation replays") {
  auto cfg = builtin_system("bbi-nd");
  Formula F = parse("~(emp & a & (b * ~(c -* (emp -> a))))");
  Formula X = F.lhs();
  Formula N = X.rhs().rhs();  // ~(c -* (emp -> a))
  Formula W = N.lhs();        // c -* (emp -> a)
  Proof p;
  p.formula = F;
  p.root_label = 1;
  p.root.sequent.delta.insert({1, F});
  LabelAllocator alloc(2);
  ProofNode* n = &p.root;
  n = step(n, RuleKind::NotR, {1, F}, alloc, cfg);
  n = step(n, RuleKind::AndL, {1, X}, alloc, cfg);
  n = step(n, RuleKind::AndL, {1, X.lhs()}, alloc, cfg);
  n = step(n, RuleKind::EmpL, {1, Formula::emp()}, alloc, cfg);
  n = step(n, RuleKind::StarL, {kEpsilon, X.rhs()}, alloc, cfg);
  const Label a = n->sequent.g.begin()->a, b = n->sequent.g.begin()->b;
  n = step(n, RuleKind::NotL, {b, N}, alloc, cfg);
  n = step(n, RuleKind::WandR, {b, W}, alloc, cfg);
  Label c = 0, d = 0;
  for (const auto& at : n->sequent.g)
    if (at.b == b && at.c != kEpsilon) c = at.a, d = at.c;
  REQUIRE(c != 0);
  n = step(n, RuleKind::ImpR, {d, W.rhs()}, alloc, cfg);
  n = step(n, RuleKind::EmpL, {d, Formula::emp()}, alloc, cfg);

  // (c,b > e); (a,b > e); e:A; a:B; c:C |- e:A
  Sequent leaf;
  leaf.g = {RelAtom::ternary(c, b, kEpsilon), RelAtom::ternary(a, b, kEpsilon)};
  leaf.gamma = {{kEpsilon, A("a")}, {a, A("b")}, {c, A("c")}};
  leaf.delta = {{kEpsilon, A("a")}};
  CHECK(n->sequent == leaf);
  n->rule.kind = RuleKind::Id;
  n->rule.principal = LabelledFormula{kEpsilon, A("a")};
  n->rule.x = kEpsilon;

  std::string why;
  CHECK_MESSAGE(check_proof(p, cfg, &why), why);

  // a tampered premise is caught
  Proof bad = p;
  bad.root.children[0].sequent.gamma.insert({7, A("z")});
  CHECK_FALSE(check_proof(bad, cfg));
}

TEST_CASE("regenerate rejects inapplicable instances") {
  auto cfg = builtin_system("bbi-nd");
  Sequent s;
  s.delta.insert({1, A("a")});
  RuleInstance r;
  r.kind = RuleKind::StarL;
  r.principal = LabelledFormula{1, A("a")};
  r.fresh = {2, 3};
  CHECK_THROWS_AS(regenerate(s, r, cfg), RuleNotApplicable);
  RuleInstance id;
  id.kind = RuleKind::Id;
  id.principal = LabelledFormula{1, A("a")};
  id.x = 1;
  CHECK_THROWS_AS(regenerate(s, id, cfg), RuleNotApplicable);
}

TEST_CASE("star right keeps its principal and branches") {
  auto cfg = builtin_system("bbi-nd");
  Sequent s;
  s.add(RelAtom::ternary(2, 3, 1));
  Formula st = Formula::star(A("a"), A("b"));
  s.delta.insert({1, st});
  RuleInstance r;
  r.kind = RuleKind::StarR;
  r.principal = LabelledFormula{1, st};
  r.atoms = {RelAtom::ternary(2, 3, 1)};
  LabelAllocator alloc = LabelAllocator::above(s);
  Premises p = apply_logical(s, r, alloc, cfg);
  REQUIRE(p.children.size() == 2);
  CHECK(p.children[0].delta.count({2, A("a")}) == 1);
  CHECK(p.children[1].delta.count({3, A("b")}) == 1);
  CHECK(p.children[0].delta.count({1, st}) == 1);
}

TEST_CASE("frame rules: equality side conditions and substitution variants") {
  auto eqcfg = builtin_system("pasl");
  eqcfg.calculus = Calculus::Equality;
  std::size_t elim = 0;
  while (eqcfg.rules[elim].name != "unit-elim") ++elim;
  Sequent s;
  s.add(RelAtom::ternary(1, 2, 3));
  CHECK(match_structural(elim, 0, s, eqcfg).empty());
  s.add(RelAtom::eq(2, kEpsilon));
  auto m = match_structural(elim, 0, s, eqcfg);
  REQUIRE(m.size() == 1);
  RuleInstance r;
  r.kind = RuleKind::Frame;
  r.rule = elim;
  r.binding = m[0];
  LabelAllocator alloc = LabelAllocator::above(s);
  Premises p = apply_structural(s, r, alloc, eqcfg);
  REQUIRE(p.children.size() == 1);
  CHECK(eq_query(p.children[0], 1, 3));

  auto sub = builtin_system("pasl");
  Sequent t;
  t.add(RelAtom::ternary(1, kEpsilon, 3));
  t.gamma.insert({3, A("a")});
  std::size_t variants = sub.subst_rules[elim].size();
  CHECK(variants == 2);
  for (std::size_t v = 0; v < variants; ++v) {
    auto bs = match_structural(elim, v, t, sub);
    REQUIRE(bs.size() == 1);
    RuleInstance ri;
    ri.kind = RuleKind::Frame;
    ri.rule = elim;
    ri.variant = v;
    ri.binding = bs[0];
    LabelAllocator al = LabelAllocator::above(t);
    Premises q = apply_structural(t, ri, al, sub);
    REQUIRE(q.children.size() == 1);
    CHECK(q.children[0].labels().size() == 2);  // one of 1, 3 is gone
  }
}

TEST_CASE("excluded middle on labels") {
  auto cfg = builtin_system("pasl+s");
  Sequent s;
  s.gamma.insert({1, A("a")});
  s.gamma.insert({2, A("b")});
  RuleInstance r;
  r.kind = RuleKind::EM;
  r.x = 1;
  r.y = 2;
  LabelAllocator alloc = LabelAllocator::above(s);
  Premises p = apply_structural(s, r, alloc, cfg);
  REQUIRE(p.children.size() == 2);
  bool merged = p.children[0].labels().size() == 1 || p.children[1].labels().size() == 1;
  bool apart = p.children[0].g.count(RelAtom::neq(1, 2)) || p.children[1].g.count(RelAtom::neq(1, 2));
  CHECK(merged);
  CHECK(apart);
}
