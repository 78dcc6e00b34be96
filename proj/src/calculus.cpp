#include "separata/calculus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace separata {

const char* rule_kind_name(RuleKind k) noexcept {
  switch (k) {
    case RuleKind::Id: return "id";
    case RuleKind::BotL: return "botL";
    case RuleKind::TopR: return "topR";
    case RuleKind::EmpR: return "empR";
    case RuleKind::NEq: return "NEq";
    case RuleKind::EmpL: return "empL";
    case RuleKind::AndL: return "andL";
    case RuleKind::AndR: return "andR";
    case RuleKind::OrL: return "orL";
    case RuleKind::OrR: return "orR";
    case RuleKind::NotL: return "notL";
    case RuleKind::NotR: return "notR";
    case RuleKind::ImpL: return "impL";
    case RuleKind::ImpR: return "impR";
    case RuleKind::StarL: return "starL";
    case RuleKind::StarR: return "starR";
    case RuleKind::WandL: return "wandL";
    case RuleKind::WandR: return "wandR";
    case RuleKind::Frame: return "frame";
    case RuleKind::EM: return "EM";
  }
  return "?";
}

bool is_closure(RuleKind k) noexcept { return k <= RuleKind::NEq; }

std::string rule_name(const RuleInstance& r, const SystemConfig& cfg) {
  if (r.kind != RuleKind::Frame) return rule_kind_name(r.kind);
  if (r.rule >= cfg.rules.size()) return "frame?";
  if (cfg.use_substitution_calculus()) {
    const auto& vs = cfg.subst_rules[r.rule];
    if (r.variant < vs.size()) return vs[r.variant].name;
  }
  return cfg.rules[r.rule].name;
}

std::string to_string(const RuleInstance& r, const SystemConfig& cfg) {
  std::string out = rule_name(r, cfg);
  if (r.principal) out += " on " + to_string(*r.principal);
  if (!r.atoms.empty()) {
    out += " with ";
    for (std::size_t i = 0; i < r.atoms.size(); ++i) {
      if (i) out += ", ";
      out += to_string(r.atoms[i]);
    }
  }
  if (r.kind == RuleKind::EM) out += " on " + label_name(r.x) + ", " + label_name(r.y);
  if (!r.fresh.empty()) {
    out += " fresh";
    for (Label f : r.fresh) out += " " + label_name(f);
  }
  return out;
}

namespace {

bool same_label(const Sequent& s, Label a, Label b, const SystemConfig& cfg) {
  return cfg.use_substitution_calculus() ? a == b : s.eq_query(a, b);
}

const LabelledFormula& need_principal(const RuleInstance& inst) {
  if (!inst.principal) throw RuleNotApplicable("missing principal formula");
  return *inst.principal;
}

void need_in(const std::set<LabelledFormula>& side, const LabelledFormula& lf, const char* where) {
  if (!side.count(lf)) throw RuleNotApplicable(to_string(lf) + " not in " + where);
}

void need_op(const LabelledFormula& lf, Op op) {
  if (lf.formula.op() != op) throw RuleNotApplicable(to_string(lf) + " has the wrong main connective");
}

void need_fresh(const Sequent& s, const std::vector<Label>& fresh, std::size_t n) {
  if (fresh.size() != n) throw RuleNotApplicable("wrong number of fresh labels");
  auto used = s.labels();
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (fresh[i] == kEpsilon || fresh[i] == kUnbound) throw RuleNotApplicable("fresh label is the unit");
    if (used.count(fresh[i])) throw RuleNotApplicable(label_name(fresh[i]) + " occurs in the conclusion");
    for (std::size_t j = 0; j < i; ++j)
      if (fresh[i] == fresh[j]) throw RuleNotApplicable("fresh labels not distinct");
  }
}

Label bound(const std::vector<Label>& th, Label v) {
  Label l = th.at(v);
  if (l == kUnbound) throw RuleNotApplicable("binding leaves a variable open");
  return l;
}

RelAtom bind_atom(const RelAtom& p, const std::vector<Label>& th) {
  return RelAtom{p.kind, bound(th, p.a), bound(th, p.b), p.kind == AtomKind::Ternary ? bound(th, p.c) : 0};
}

std::size_t nvars_of(const SystemConfig& cfg, std::size_t rule) { return cfg.rules.at(rule).var_names.size(); }

void match_rec(const std::vector<RelAtom>& pat, std::size_t i, const std::vector<RelAtom>& atoms,
               std::vector<Label>& th, std::vector<std::vector<Label>>& out) {
  if (i == pat.size()) {
    out.push_back(th);
    return;
  }
  const RelAtom& p = pat[i];
  for (const auto& a : atoms) {
    if (a.kind != p.kind) continue;
    std::vector<Label> saved = th;
    bool ok = true;
    auto unify = [&](Label var, Label val) {
      if (var == kEpsilon) {
        ok = ok && val == kEpsilon;
      } else if (th[var] == kUnbound) {
        th[var] = val;
      } else {
        ok = ok && th[var] == val;
      }
    };
    unify(p.a, a.a);
    unify(p.b, a.b);
    if (p.kind == AtomKind::Ternary) unify(p.c, a.c);
    if (ok) match_rec(pat, i + 1, atoms, th, out);
    th = std::move(saved);
  }
}

/// Variables the antecedent leaves open that are not fresh.
std::vector<Label> free_universals(const std::vector<RelAtom>& antecedent, const std::vector<Label>& fresh,
                                   const std::vector<RelAtom>& added, const std::vector<std::pair<Label, Label>>& pairs,
                                   std::size_t nvars) {
  std::vector<bool> bound(nvars + 1, false);
  bound[0] = true;
  for (const auto& a : antecedent) {
    bound[a.a] = bound[a.b] = true;
    if (a.kind == AtomKind::Ternary) bound[a.c] = true;
  }
  for (Label f : fresh) bound[f] = true;
  std::vector<Label> out;
  auto consider = [&](Label v) {
    if (!bound[v]) {
      bound[v] = true;
      out.push_back(v);
    }
  };
  for (const auto& [s, t] : pairs) {
    consider(s);
    consider(t);
  }
  for (const auto& a : added) {
    consider(a.a);
    consider(a.b);
    if (a.kind == AtomKind::Ternary) consider(a.c);
  }
  return out;
}

void expand_free(std::vector<std::vector<Label>>& bindings, const std::vector<Label>& free_vars, const Sequent& s) {
  if (free_vars.empty()) return;
  auto labels = s.labels();
  labels.insert(kEpsilon);
  for (Label v : free_vars) {
    std::vector<std::vector<Label>> next;
    for (const auto& th : bindings)
      for (Label l : labels) {
        auto t = th;
        t[v] = l;
        next.push_back(std::move(t));
      }
    bindings = std::move(next);
  }
}

/// Applies the variant's substitutions under binding th (updated in place).
/// Returns false when a substitution would replace the unit.
bool run_substs(Sequent* s, const SubstRule& v, std::vector<Label>& th) {
  for (const auto& [from_v, to_v] : v.substs) {
    Label from = bound(th, from_v), to = bound(th, to_v);
    if (from == to) continue;
    if (from == kEpsilon) return false;
    if (s) apply_subst_in_place(*s, from, to);
    for (auto& l : th)
      if (l == from) l = to;
  }
  return true;
}

}  // namespace

const std::vector<RelAtom>& frame_antecedent(const SystemConfig& cfg, std::size_t rule, std::size_t variant) {
  if (cfg.use_substitution_calculus()) return cfg.subst_rules.at(rule).at(variant).antecedent;
  return cfg.rules.at(rule).antecedent;
}

std::vector<std::vector<Label>> bind_pattern(const std::vector<RelAtom>& pattern, std::size_t nvars,
                                             const std::vector<RelAtom>& atoms) {
  std::vector<std::vector<Label>> out;
  if (pattern.size() != atoms.size()) return out;
  std::vector<std::size_t> perm(atoms.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<Label>> seen;
  do {
    std::vector<Label> th(nvars + 1, kUnbound);
    th[0] = kEpsilon;
    bool ok = true;
    for (std::size_t i = 0; i < pattern.size() && ok; ++i) {
      const RelAtom& p = pattern[i];
      const RelAtom& a = atoms[perm[i]];
      if (p.kind != a.kind) {
        ok = false;
        break;
      }
      auto unify = [&](Label var, Label val) {
        if (var == kEpsilon) {
          ok = ok && val == kEpsilon;
        } else if (th[var] == kUnbound) {
          th[var] = val;
        } else {
          ok = ok && th[var] == val;
        }
      };
      unify(p.a, a.a);
      unify(p.b, a.b);
      if (p.kind == AtomKind::Ternary) unify(p.c, a.c);
    }
    if (ok && seen.insert(th).second) out.push_back(th);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Closure

std::optional<RuleInstance> close_check(const Sequent& s, const SystemConfig& cfg) {
  for (const auto& lf : s.gamma) {
    if (lf.formula.op() == Op::Bot) {
      RuleInstance r;
      r.kind = RuleKind::BotL;
      r.principal = lf;
      return r;
    }
  }
  for (const auto& lf : s.delta) {
    if (lf.formula.op() == Op::Top) {
      RuleInstance r;
      r.kind = RuleKind::TopR;
      r.principal = lf;
      return r;
    }
    if (lf.formula.op() == Op::Emp && same_label(s, lf.label, kEpsilon, cfg)) {
      RuleInstance r;
      r.kind = RuleKind::EmpR;
      r.principal = lf;
      return r;
    }
  }
  for (const auto& lf : s.gamma) {
    if (lf.formula.op() != Op::Atom) continue;
    for (const auto& rf : s.delta) {
      if (rf.formula == lf.formula && same_label(s, lf.label, rf.label, cfg)) {
        RuleInstance r;
        r.kind = RuleKind::Id;
        r.principal = lf;
        r.x = rf.label;
        return r;
      }
    }
  }
  if (cfg.neq) {
    for (const auto& a : s.g) {
      if (a.kind == AtomKind::Neq && same_label(s, a.a, a.b, cfg)) {
        RuleInstance r;
        r.kind = RuleKind::NEq;
        r.atoms = {a};
        return r;
      }
    }
  }
  return std::nullopt;
}

bool closes(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg) {
  switch (inst.kind) {
    case RuleKind::Id: {
      if (!inst.principal) return false;
      const auto& lf = *inst.principal;
      return lf.formula.op() == Op::Atom && s.gamma.count(lf) && s.delta.count({inst.x, lf.formula}) &&
             same_label(s, lf.label, inst.x, cfg);
    }
    case RuleKind::BotL:
      return inst.principal && inst.principal->formula.op() == Op::Bot && s.gamma.count(*inst.principal);
    case RuleKind::TopR:
      return inst.principal && inst.principal->formula.op() == Op::Top && s.delta.count(*inst.principal);
    case RuleKind::EmpR:
      return inst.principal && inst.principal->formula.op() == Op::Emp && s.delta.count(*inst.principal) &&
             same_label(s, inst.principal->label, kEpsilon, cfg);
    case RuleKind::NEq:
      return cfg.neq && inst.atoms.size() == 1 && inst.atoms[0].kind == AtomKind::Neq && s.g.count(inst.atoms[0]) &&
             same_label(s, inst.atoms[0].a, inst.atoms[0].b, cfg);
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Logical rules

namespace {

Premises logical(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg) {
  const LabelledFormula& p = need_principal(inst);
  const Formula& f = p.formula;
  const Label w = p.label;
  Premises out;
  auto one = [&](auto&& edit) {
    Sequent c = s;
    edit(c);
    out.children.push_back(std::move(c));
  };
  switch (inst.kind) {
    case RuleKind::EmpL:
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Emp);
      one([&](Sequent& c) {
        c.gamma.erase(p);
        if (cfg.use_substitution_calculus()) {
          if (w != kEpsilon) apply_subst_in_place(c, w, kEpsilon);
        } else {
          c.add(RelAtom::eq(w, kEpsilon));
        }
      });
      break;
    case RuleKind::AndL:
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::And);
      one([&](Sequent& c) {
        c.gamma.erase(p);
        c.gamma.insert({w, f.lhs()});
        c.gamma.insert({w, f.rhs()});
      });
      break;
    case RuleKind::AndR:
      need_in(s.delta, p, "succedent");
      need_op(p, Op::And);
      for (const Formula* part : {&f.lhs(), &f.rhs()})
        one([&](Sequent& c) {
          c.delta.erase(p);
          c.delta.insert({w, *part});
        });
      break;
    case RuleKind::OrL:
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Or);
      for (const Formula* part : {&f.lhs(), &f.rhs()})
        one([&](Sequent& c) {
          c.gamma.erase(p);
          c.gamma.insert({w, *part});
        });
      break;
    case RuleKind::OrR:
      need_in(s.delta, p, "succedent");
      need_op(p, Op::Or);
      one([&](Sequent& c) {
        c.delta.erase(p);
        c.delta.insert({w, f.lhs()});
        c.delta.insert({w, f.rhs()});
      });
      break;
    case RuleKind::NotL:
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Not);
      one([&](Sequent& c) {
        c.gamma.erase(p);
        c.delta.insert({w, f.lhs()});
      });
      break;
    case RuleKind::NotR:
      need_in(s.delta, p, "succedent");
      need_op(p, Op::Not);
      one([&](Sequent& c) {
        c.delta.erase(p);
        c.gamma.insert({w, f.lhs()});
      });
      break;
    case RuleKind::ImpL:
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Imp);
      one([&](Sequent& c) {
        c.gamma.erase(p);
        c.delta.insert({w, f.lhs()});
      });
      one([&](Sequent& c) {
        c.gamma.erase(p);
        c.gamma.insert({w, f.rhs()});
      });
      break;
    case RuleKind::ImpR:
      need_in(s.delta, p, "succedent");
      need_op(p, Op::Imp);
      one([&](Sequent& c) {
        c.delta.erase(p);
        c.gamma.insert({w, f.lhs()});
        c.delta.insert({w, f.rhs()});
      });
      break;
    case RuleKind::StarL: {
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Star);
      need_fresh(s, inst.fresh, 2);
      const Label x = inst.fresh[0], y = inst.fresh[1];
      one([&](Sequent& c) {
        c.gamma.erase(p);
        c.add(RelAtom::ternary(x, y, w));
        c.gamma.insert({x, f.lhs()});
        c.gamma.insert({y, f.rhs()});
      });
      break;
    }
    case RuleKind::WandR: {
      need_in(s.delta, p, "succedent");
      need_op(p, Op::Wand);
      need_fresh(s, inst.fresh, 2);
      const Label x = inst.fresh[0], y = inst.fresh[1];
      one([&](Sequent& c) {
        c.delta.erase(p);
        c.add(RelAtom::ternary(x, w, y));
        c.gamma.insert({x, f.lhs()});
        c.delta.insert({y, f.rhs()});
      });
      break;
    }
    case RuleKind::StarR: {
      need_in(s.delta, p, "succedent");
      need_op(p, Op::Star);
      if (inst.atoms.size() != 1 || inst.atoms[0].kind != AtomKind::Ternary || !s.g.count(inst.atoms[0]))
        throw RuleNotApplicable("starR needs a ternary atom of the conclusion");
      const RelAtom& a = inst.atoms[0];
      if (!same_label(s, a.c, w, cfg)) throw RuleNotApplicable("starR atom does not compose the principal label");
      one([&](Sequent& c) { c.delta.insert({a.a, f.lhs()}); });
      one([&](Sequent& c) { c.delta.insert({a.b, f.rhs()}); });
      break;
    }
    case RuleKind::WandL: {
      need_in(s.gamma, p, "antecedent");
      need_op(p, Op::Wand);
      if (inst.atoms.size() != 1 || inst.atoms[0].kind != AtomKind::Ternary || !s.g.count(inst.atoms[0]))
        throw RuleNotApplicable("wandL needs a ternary atom of the conclusion");
      const RelAtom& a = inst.atoms[0];
      if (!same_label(s, a.b, w, cfg)) throw RuleNotApplicable("wandL atom does not extend the principal label");
      one([&](Sequent& c) { c.delta.insert({a.a, f.lhs()}); });
      one([&](Sequent& c) { c.gamma.insert({a.c, f.rhs()}); });
      break;
    }
    default: throw RuleNotApplicable(std::string(rule_kind_name(inst.kind)) + " is not a logical rule");
  }
  return out;
}

Premises structural(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg) {
  Premises out;
  if (inst.kind == RuleKind::EM) {
    if (!cfg.em) throw RuleNotApplicable("EM is disabled in this system");
    Sequent left = s, right = s;
    if (cfg.use_substitution_calculus()) {
      if (inst.y == kEpsilon) throw RuleNotApplicable("EM would substitute the unit away");
      apply_subst_in_place(left, inst.y, inst.x);
    } else {
      left.add(RelAtom::eq(inst.x, inst.y));
    }
    right.add(RelAtom::neq(inst.x, inst.y));
    out.children.push_back(std::move(left));
    out.children.push_back(std::move(right));
    return out;
  }
  if (inst.kind != RuleKind::Frame) throw RuleNotApplicable("not a structural rule");
  if (inst.rule >= cfg.rules.size()) throw RuleNotApplicable("rule index out of range");
  const std::size_t nvars = nvars_of(cfg, inst.rule);
  std::vector<Label> th = inst.binding;
  if (th.size() != nvars + 1 || th[0] != kEpsilon) throw RuleNotApplicable("malformed binding");

  if (cfg.use_substitution_calculus()) {
    const auto& vs = cfg.subst_rules[inst.rule];
    if (inst.variant >= vs.size()) throw RuleNotApplicable("variant out of range");
    const SubstRule& v = vs[inst.variant];
    for (const auto& p : v.antecedent)
      if (!s.g.count(bind_atom(p, th))) throw RuleNotApplicable(to_string(bind_atom(p, th)) + " not in conclusion");
    std::vector<Label> fresh;
    for (Label f : v.fresh) fresh.push_back(th[f]);
    need_fresh(s, fresh, v.fresh.size());
    Sequent c = s;
    if (!run_substs(&c, v, th)) throw RuleNotApplicable("substitution would replace the unit");
    for (const auto& a : v.added) c.add(bind_atom(a, th));
    out.children.push_back(std::move(c));
    return out;
  }

  const StructuralRule& r = cfg.rules[inst.rule];
  for (const auto& p : r.antecedent)
    if (!s.g.count(bind_atom(p, th))) throw RuleNotApplicable(to_string(bind_atom(p, th)) + " not in conclusion");
  for (const auto& [a, b] : r.side)
    if (!s.eq_query(bound(th, a), bound(th, b)))
      throw RuleNotApplicable("side condition " + label_name(th[a]) + " = " + label_name(th[b]) + " fails");
  std::vector<Label> fresh;
  for (Label f : r.fresh) fresh.push_back(th[f]);
  need_fresh(s, fresh, r.fresh.size());
  Sequent c = s;
  for (const auto& a : r.added) c.add(bind_atom(a, th));
  out.children.push_back(std::move(c));
  return out;
}

void fill_fresh(RuleInstance& inst, LabelAllocator& alloc, const Sequent& s, std::size_t n) {
  if (!inst.fresh.empty()) return;
  alloc.reserve_above(s.max_label());
  for (std::size_t i = 0; i < n; ++i) inst.fresh.push_back(alloc.fresh());
}

}  // namespace

Premises apply_logical(const Sequent& s, RuleInstance& inst, LabelAllocator& alloc, const SystemConfig& cfg) {
  if (inst.kind == RuleKind::StarL || inst.kind == RuleKind::WandR) fill_fresh(inst, alloc, s, 2);
  return logical(s, inst, cfg);
}

std::vector<std::vector<Label>> match_structural(std::size_t rule, std::size_t variant, const Sequent& s,
                                                 const SystemConfig& cfg) {
  const std::size_t nvars = nvars_of(cfg, rule);
  std::vector<RelAtom> atoms(s.g.begin(), s.g.end());
  std::vector<std::vector<Label>> out;
  std::vector<Label> th(nvars + 1, kUnbound);
  th[0] = kEpsilon;

  if (cfg.use_substitution_calculus()) {
    const SubstRule& v = cfg.subst_rules.at(rule).at(variant);
    match_rec(v.antecedent, 0, atoms, th, out);
    expand_free(out, free_universals(v.antecedent, v.fresh, v.added, v.substs, nvars), s);
    std::vector<std::vector<Label>> ok;
    for (auto& b : out) {
      auto t = b;
      if (run_substs(nullptr, v, t)) ok.push_back(std::move(b));
    }
    std::sort(ok.begin(), ok.end());
    ok.erase(std::unique(ok.begin(), ok.end()), ok.end());
    return ok;
  }

  const StructuralRule& r = cfg.rules.at(rule);
  match_rec(r.antecedent, 0, atoms, th, out);
  expand_free(out, free_universals(r.antecedent, r.fresh, r.added, r.side, nvars), s);
  std::vector<std::vector<Label>> ok;
  for (auto& b : out) {
    bool good = true;
    for (const auto& [a, c] : r.side) good = good && s.eq_query(b[a], b[c]);
    if (good) ok.push_back(std::move(b));
  }
  std::sort(ok.begin(), ok.end());
  ok.erase(std::unique(ok.begin(), ok.end()), ok.end());
  return ok;
}

Premises apply_structural(const Sequent& s, RuleInstance& inst, LabelAllocator& alloc, const SystemConfig& cfg) {
  if (inst.kind == RuleKind::Frame) {
    alloc.reserve_above(s.max_label());
    const auto& fresh_vars = cfg.use_substitution_calculus() ? cfg.subst_rules.at(inst.rule).at(inst.variant).fresh
                                                             : cfg.rules.at(inst.rule).fresh;
    if (inst.fresh.empty()) {
      for (Label f : fresh_vars) {
        if (inst.binding.at(f) == kUnbound) inst.binding[f] = alloc.fresh();
        inst.fresh.push_back(inst.binding[f]);
      }
    }
    if (inst.atoms.empty())
      for (const auto& p : frame_antecedent(cfg, inst.rule, inst.variant)) inst.atoms.push_back(bind_atom(p, inst.binding));
  }
  return structural(s, inst, cfg);
}

Premises regenerate(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg) {
  if (is_closure(inst.kind)) {
    if (!closes(s, inst, cfg)) throw RuleNotApplicable("closure condition fails");
    return {};
  }
  if (inst.kind == RuleKind::Frame || inst.kind == RuleKind::EM) {
    if (inst.kind == RuleKind::Frame) {
      // recorded fresh labels must agree with the binding
      const auto& fresh_vars = cfg.use_substitution_calculus() ? cfg.subst_rules.at(inst.rule).at(inst.variant).fresh
                                                               : cfg.rules.at(inst.rule).fresh;
      if (inst.fresh.size() != fresh_vars.size()) throw RuleNotApplicable("fresh labels do not match the rule");
      for (std::size_t i = 0; i < fresh_vars.size(); ++i)
        if (inst.binding.at(fresh_vars[i]) != inst.fresh[i]) throw RuleNotApplicable("fresh labels do not match binding");
    }
    return structural(s, inst, cfg);
  }
  return logical(s, inst, cfg);
}

}  // namespace separata
