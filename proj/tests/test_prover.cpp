#include <set>

#include "doctest.h"
#include "json.hpp"
#include "separata/prover.hpp"
#include "support.hpp"

using namespace separata;
using separata::testing::prove_big;
using separata::testing::table2_formula;

namespace {

bool uses_rule(const Proof& p, const SystemConfig& cfg, const std::string& name) {
  std::vector<const ProofNode*> st{&p.root};
  while (!st.empty()) {
    const ProofNode* n = st.back();
    st.pop_back();
    if (rule_name(n->rule, cfg).rfind(name, 0) == 0) return true;
    for (const auto& c : n->children) st.push_back(&c);
  }
  return false;
}

}  // namespace

TEST_CASE("quick benchmark rows are proved with checked proofs") {
  auto cfg = builtin_system("pasl+d");
  for (int row : {1, 2, 3, 4, 5, 6, 7, 10, 15, 18, 19}) {
    CAPTURE(row);
    Verdict v = prove_big(table2_formula(row), cfg, 30);
    REQUIRE(v.kind == VerdictKind::Proved);
    REQUIRE(v.proof);
    CHECK(check_proof(*v.proof, cfg));
    CHECK(v.proof->root.sequent.delta.size() == 1);
  }
}

TEST_CASE("partial determinism is what proves (F*F)->F") {
  Formula f = table2_formula(18);
  Verdict in_pasl = prove_big(f, builtin_system("pasl"), 30);
  CHECK(in_pasl.kind == VerdictKind::Proved);
  Verdict in_nd = prove_big(f, builtin_system("bbi-nd"), 1);
  CHECK(in_nd.kind == VerdictKind::Unknown);
}

TEST_CASE("unit narrowing needs disjointness") {
  Formula f = table2_formula(19);
  auto d = builtin_system("pasl+d");
  Verdict v = prove_big(f, d, 10);
  REQUIRE(v.kind == VerdictKind::Proved);
  CHECK((uses_rule(*v.proof, d, "disjoint") || uses_rule(*v.proof, d, "indiv-unit")));

  auto pasl = builtin_system("pasl");
  ProverOptions o;
  o.saturate = true;
  Verdict r = prove_big(f, pasl, 10, o);
  REQUIRE(r.kind == VerdictKind::Refuted);
  REQUIRE(r.model);
  CHECK(check_frame(*r.model, pasl.axioms).empty());
  CHECK_FALSE(eval(*r.model, r.model->epsilon, f));
  CHECK_FALSE(eval(*r.model, r.world, f));
}

TEST_CASE("non-theorems never come back proved") {
  auto cfg = builtin_system("pasl");
  for (const char* s : {"a * b -> a", "a -> a * a", "a * b -> a & b", "a -* b", "emp -> a"}) {
    CAPTURE(s);
    ProverOptions o;
    o.saturate = true;
    Verdict v = prove_big(parse(s), cfg, 4, o);
    CHECK(v.kind != VerdictKind::Proved);
    if (v.kind == VerdictKind::Refuted) {
      CHECK(check_frame(*v.model, cfg.axioms).empty());
      CHECK_FALSE(eval(*v.model, v.world, parse(s)));
    }
  }
}

TEST_CASE("search toggles never change a verdict into a different answer") {
  auto cfg = builtin_system("pasl+d");
  ProverOptions no_heur, no_memo, no_bj;
  no_heur.heuristics = false;
  no_memo.memo = false;
  no_bj.backjumping = false;
  for (int row = 1; row <= 12; ++row) {
    CAPTURE(row);
    Formula f = table2_formula(row);
    CHECK(prove_big(f, cfg, 30).kind == VerdictKind::Proved);
    CHECK(prove_big(f, cfg, 30, no_heur).kind == VerdictKind::Proved);
    CHECK(prove_big(f, cfg, 30, no_memo).kind == VerdictKind::Proved);
    // without back-jumping the skipped right premises cascade on rows 7 and up
    Verdict v = prove_big(f, cfg, row <= 6 ? 30 : 2, no_bj);
    if (row <= 6) CHECK(v.kind == VerdictKind::Proved);
    else CHECK(v.kind != VerdictKind::Refuted);
  }
}

TEST_CASE("equality and substitution engines agree") {
  auto sub = builtin_system("pasl+d");
  auto eq = sub;
  eq.calculus = Calculus::Equality;
  for (int row : {1, 2, 3, 5, 10, 15, 18, 19}) {
    CAPTURE(row);
    Verdict a = prove_big(table2_formula(row), sub, 30);
    Verdict b = prove_big(table2_formula(row), eq, 30);
    CHECK(a.kind == b.kind);
    if (b.proof) CHECK(check_proof(*b.proof, eq));
  }
}

TEST_CASE("budgets") {
  auto cfg = builtin_system("bbi-nd");
  Verdict v;
  run_with_large_stack([&] { v = prove(table2_formula(18), cfg, Budget{60, std::nullopt, 50}); });
  CHECK(v.kind == VerdictKind::Unknown);
  CHECK(v.reason == UnknownReason::Budget);
  Verdict t = prove_big(table2_formula(18), cfg, 0.5);
  CHECK(t.reason == UnknownReason::Timeout);
  CHECK(t.seconds < 2.0);
}

TEST_CASE("extract_model") {
  Sequent closed;
  closed.gamma.insert({1, Formula::atom("a")});
  closed.delta.insert({1, Formula::atom("a")});
  CHECK_THROWS_AS(extract_model(closed), NotSaturated);

  // open branch: (1,2 > e), (2,1 > e) and identities, 1:a, 2:b |- e:a
  Sequent s;
  for (auto [x, y, z] : {std::array<Label, 3>{1, 2, 0}, {2, 1, 0}, {0, 0, 0}, {1, 0, 1}, {0, 1, 1}, {2, 0, 2},
                         {0, 2, 2}})
    s.add(RelAtom::ternary(x, y, z));
  s.gamma.insert({1, Formula::atom("a")});
  s.gamma.insert({2, Formula::atom("b")});
  s.delta.insert({kEpsilon, Formula::atom("a")});
  KripkeModel m = extract_model(s);
  CHECK(m.size() == 3);
  CHECK(falsifiable(m, s));

  // a branch missing the commuted atom is not a model of the frame axioms
  Sequent broken;
  broken.add(RelAtom::ternary(1, 2, kEpsilon));
  broken.delta.insert({kEpsilon, Formula::atom("a")});
  KripkeModel bm = extract_model(broken);
  CHECK_FALSE(check_frame(bm, builtin_system("pasl").axioms).empty());
}

TEST_CASE("label-tree hint") {
  Sequent s;
  s.add(RelAtom::ternary(1, 2, 3));
  s.add(RelAtom::ternary(4, 5, 3));
  s.gamma.insert({1, Formula::atom("a")});
  s.gamma.insert({2, Formula::atom("b")});
  Formula ab = parse("a * b");
  s.delta.insert({3, ab});
  auto h = heuristic_hint(s, 3, ab);
  REQUIRE_FALSE(h.empty());
  CHECK(h[0] == RelAtom::ternary(1, 2, 3));
  CHECK(heuristic_hint(s, 3, parse("c * d")).empty());
}

TEST_CASE("a misleading hint does not stop the search") {
  // the only half-supported candidate is the wrong one
  auto cfg = builtin_system("bbi-nd");
  Verdict v = prove_big(parse("(a * b) & (a * c) -> a * (c | bot)"), cfg, 10);
  CHECK(v.kind == VerdictKind::Proved);
}

TEST_CASE("fairness: every relational atom is tried for a right star") {
  auto cfg = builtin_system("bbi-nd");
  std::set<RelAtom> tried;
  ProverOptions o;
  Formula goal = parse("e * f");
  o.observer = [&](const SearchEvent& e) {
    if (e.kind == RuleKind::StarR && e.principal && e.principal->formula == goal && !e.atoms.empty())
      tried.insert(e.atoms[0]);
  };
  Verdict v = prove_big(parse("(a * b) & (c * d) -> e * f"), cfg, 5, o);
  CHECK(v.kind != VerdictKind::Proved);
  // two atoms from the left stars plus their commuted forms
  CHECK(tried.size() >= 4);
}

TEST_CASE("proof output formats") {
  auto cfg = builtin_system("pasl+d");
  Verdict v = prove_big(table2_formula(19), cfg, 10);
  REQUIRE(v.proof);
  std::string text = proof_to_text(*v.proof, cfg);
  CHECK(text.find("|-") != std::string::npos);
  auto j = nlohmann::json::parse(proof_to_json(*v.proof, cfg));
  CHECK(j["formula"] == render(table2_formula(19)));
  CHECK(j["system"] == "pasl+d");
  CHECK(j["size"] == v.proof->size());
  CHECK(j["proof"].contains("sequent"));
  CHECK(j["proof"]["step"].contains("rule"));
  CHECK(j["proof"]["children"].is_array());
}

TEST_CASE("verdict names") {
  CHECK(std::string(verdict_name(VerdictKind::Proved)) == "Proved");
  CHECK(std::string(reason_name(UnknownReason::SaturationUnvalidated)) == "saturation-unvalidated");
}
