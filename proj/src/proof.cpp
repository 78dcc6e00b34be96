#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"
#include "separata/prover.hpp"

namespace separata {

ProofNode::~ProofNode() {
  std::vector<ProofNode> stack = std::move(children);
  while (!stack.empty()) {
    ProofNode n = std::move(stack.back());
    stack.pop_back();
    for (auto& c : n.children) stack.push_back(std::move(c));
    n.children.clear();
  }
}

std::size_t Proof::size() const {
  std::size_t n = 0;
  std::vector<const ProofNode*> stack{&root};
  while (!stack.empty()) {
    const ProofNode* p = stack.back();
    stack.pop_back();
    ++n;
    for (const auto& c : p->children) stack.push_back(&c);
  }
  return n;
}

std::size_t Proof::depth() const {
  std::size_t best = 0;
  std::vector<std::pair<const ProofNode*, std::size_t>> stack{{&root, 1}};
  while (!stack.empty()) {
    auto [p, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    for (const auto& c : p->children) stack.emplace_back(&c, d + 1);
  }
  return best;
}

bool check_proof(const Proof& p, const SystemConfig& cfg, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const Sequent& r = p.root.sequent;
  if (p.root_label == kEpsilon) return fail("root label is the unit");
  if (!r.g.empty() || !r.gamma.empty() || r.delta.size() != 1 || *r.delta.begin() != LabelledFormula{p.root_label, p.formula})
    return fail("root is not the end sequent of the formula");
  std::vector<const ProofNode*> stack{&p.root};
  while (!stack.empty()) {
    const ProofNode* n = stack.back();
    stack.pop_back();
    Sequent s = n->sequent;
    s.rebuild_eq();
    if (is_closure(n->rule.kind)) {
      if (!n->children.empty()) return fail("closing rule with premises");
      if (!closes(s, n->rule, cfg)) return fail("leaf does not close: " + to_string(n->rule, cfg));
      continue;
    }
    Premises pr;
    try {
      pr = regenerate(s, n->rule, cfg);
    } catch (const std::exception& e) {
      return fail(to_string(n->rule, cfg) + ": " + e.what());
    }
    if (pr.children.size() != n->children.size()) return fail("premise count differs at " + to_string(n->rule, cfg));
    for (std::size_t i = 0; i < pr.children.size(); ++i) {
      if (!(pr.children[i] == n->children[i].sequent))
        return fail("premise " + std::to_string(i) + " differs at " + to_string(n->rule, cfg));
      stack.push_back(&n->children[i]);
    }
  }
  return true;
}

KripkeModel extract_model(const Sequent& branch) {
  SystemConfig probe;
  probe.calculus = Calculus::Equality;
  probe.neq = true;
  if (close_check(branch, probe)) throw NotSaturated();
  KripkeModel m;
  std::map<Label, World> cls;
  auto world_of = [&](Label l) {
    Label rep = branch.eq.find(l);
    auto it = cls.find(rep);
    if (it != cls.end()) return it->second;
    World w = m.worlds.size();
    m.worlds.push_back(rep == kEpsilon ? "e" : label_name(rep));
    cls.emplace(rep, w);
    return w;
  };
  m.epsilon = world_of(kEpsilon);
  for (Label l : branch.labels()) m.rho[l] = world_of(l);
  m.rho[kEpsilon] = m.epsilon;
  for (const auto& a : branch.g)
    if (a.kind == AtomKind::Ternary) m.rel.insert({world_of(a.a), world_of(a.b), world_of(a.c)});
  for (const auto& lf : branch.gamma)
    if (lf.formula.op() == Op::Atom) m.valuation[lf.formula.name()].insert(world_of(lf.label));
  for (const auto& lf : branch.delta)
    if (lf.formula.op() == Op::Atom) m.valuation[lf.formula.name()];
  return m;
}

namespace {

bool supports(const Sequent& s, Label l, const Formula& f, int depth) {
  for (const auto& lf : s.gamma)
    if (lf.formula == f && s.eq.query(lf.label, l)) return true;
  if (depth == 0 || f.op() != Op::Star) return false;
  for (const auto& a : s.g)
    if (a.kind == AtomKind::Ternary && s.eq.query(a.c, l) && supports(s, a.a, f.lhs(), depth - 1) &&
        supports(s, a.b, f.rhs(), depth - 1))
      return true;
  return false;
}

}  // namespace

std::vector<RelAtom> heuristic_hint(const Sequent& s, Label z, const Formula& f) {
  std::vector<RelAtom> both, one;
  if (f.op() != Op::Star) return both;
  for (const auto& a : s.g) {
    if (a.kind != AtomKind::Ternary || !s.eq.query(a.c, z)) continue;
    bool l = supports(s, a.a, f.lhs(), 3), r = supports(s, a.b, f.rhs(), 3);
    if (l && r) both.push_back(a);
    else if (l || r) one.push_back(a);
  }
  both.insert(both.end(), one.begin(), one.end());
  return both;
}

// Output ----------------------------------------------------------------------

std::string proof_to_text(const Proof& p, const SystemConfig& cfg) {
  std::ostringstream os;
  std::vector<std::pair<const ProofNode*, std::size_t>> stack{{&p.root, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    os << std::string(2 * d, ' ') << '[' << to_string(n->rule, cfg) << "]  " << to_string(n->sequent) << '\n';
    // unary chains stay at the same indentation
    std::size_t child_depth = n->children.size() > 1 ? d + 1 : d;
    for (std::size_t i = n->children.size(); i-- > 0;) stack.emplace_back(&n->children[i], child_depth);
  }
  return os.str();
}

namespace {

using json = nlohmann::json;

json sequent_json(const Sequent& s) {
  json j;
  json g = json::array(), a = json::array(), d = json::array();
  for (const auto& r : s.g) g.push_back(to_string(r));
  for (const auto& lf : s.gamma) a.push_back(to_string(lf));
  for (const auto& lf : s.delta) d.push_back(to_string(lf));
  j["relations"] = g;
  j["antecedent"] = a;
  j["succedent"] = d;
  return j;
}

json rule_json(const RuleInstance& r, const SystemConfig& cfg) {
  json j;
  j["rule"] = rule_name(r, cfg);
  j["kind"] = rule_kind_name(r.kind);
  if (r.principal) j["principal"] = to_string(*r.principal);
  if (!r.atoms.empty()) {
    json at = json::array();
    for (const auto& a : r.atoms) at.push_back(to_string(a));
    j["atoms"] = at;
  }
  if (!r.fresh.empty()) {
    json fr = json::array();
    for (Label l : r.fresh) fr.push_back(label_name(l));
    j["fresh"] = fr;
  }
  if (r.kind == RuleKind::EM) j["labels"] = {label_name(r.x), label_name(r.y)};
  if (r.kind == RuleKind::Id) j["match"] = label_name(r.x);
  return j;
}

}  // namespace

std::string proof_to_json(const Proof& p, const SystemConfig& cfg, int indent) {
  std::string out;
  run_with_large_stack([&] {
    // built bottom-up without recursion over the proof
    struct Frame {
      const ProofNode* n;
      json j;
      std::size_t next = 0;
    };
    std::vector<Frame> stack;
    stack.push_back({&p.root, json::object()});
    json done;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == 0) {
        f.j["sequent"] = sequent_json(f.n->sequent);
        f.j["step"] = rule_json(f.n->rule, cfg);
        f.j["children"] = json::array();
      }
      if (f.next < f.n->children.size()) {
        const ProofNode* c = &f.n->children[f.next++];
        stack.push_back({c, json::object()});
        continue;
      }
      json finished = std::move(f.j);
      stack.pop_back();
      if (stack.empty()) done = std::move(finished);
      else stack.back().j["children"].push_back(std::move(finished));
    }
    json top;
    top["formula"] = render(p.formula);
    top["root_label"] = label_name(p.root_label);
    top["system"] = cfg.name;
    top["calculus"] = cfg.use_substitution_calculus() ? "substitution" : "equality";
    top["size"] = p.size();
    top["proof"] = std::move(done);
    out = top.dump(indent);
  });
  return out;
}

}  // namespace separata
