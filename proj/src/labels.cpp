#include "separata/labels.hpp"

#include <algorithm>

namespace separata {

std::string label_name(Label l) { return l == kEpsilon ? "e" : "w" + std::to_string(l); }

std::string to_string(const RelAtom& a) {
  switch (a.kind) {
    case AtomKind::Ternary:
      return "(" + label_name(a.a) + "," + label_name(a.b) + " > " + label_name(a.c) + ")";
    case AtomKind::Eq: return label_name(a.a) + " = " + label_name(a.b);
    case AtomKind::Neq: return label_name(a.a) + " != " + label_name(a.b);
  }
  return "?";
}

std::string to_string(const LabelledFormula& lf) { return label_name(lf.label) + ":" + render(lf.formula); }

void EqStore::grow(Label l) {
  if (l >= parent_.size()) {
    const std::size_t old = parent_.size();
    parent_.resize(static_cast<std::size_t>(l) + 1);
    for (std::size_t i = old; i < parent_.size(); ++i) parent_[i] = static_cast<Label>(i);
  }
}

Label EqStore::find(Label l) const {
  if (l >= parent_.size()) return l;
  while (parent_[l] != l) l = parent_[l];
  return l;
}

bool EqStore::unite(Label a, Label b) {
  grow(std::max(a, b));
  Label ra = find(a), rb = find(b);
  if (ra == rb) return false;
  if (rb < ra) std::swap(ra, rb);
  parent_[rb] = ra;
  for (Label x : {a, b}) {
    while (parent_[x] != ra) {
      Label next = parent_[x];
      parent_[x] = ra;
      x = next;
    }
  }
  return true;
}

void Sequent::add(const RelAtom& a) {
  g.insert(a);
  if (a.kind == AtomKind::Eq) eq.unite(a.a, a.b);
}

void Sequent::rebuild_eq() {
  eq.clear();
  for (const auto& a : g)
    if (a.kind == AtomKind::Eq) eq.unite(a.a, a.b);
}

std::set<Label> Sequent::labels() const {
  std::set<Label> out;
  for (const auto& a : g) {
    out.insert(a.a);
    out.insert(a.b);
    if (a.kind == AtomKind::Ternary) out.insert(a.c);
  }
  for (const auto& lf : gamma) out.insert(lf.label);
  for (const auto& lf : delta) out.insert(lf.label);
  return out;
}

Label Sequent::max_label() const {
  Label m = 0;
  for (Label l : labels()) m = std::max(m, l);
  return m;
}

bool eq_query(const Sequent& s, Label a, Label b) { return s.eq_query(a, b); }

Sequent assert_eq(const Sequent& s, Label a, Label b) {
  Sequent out = s;
  out.add(RelAtom::eq(a, b));
  return out;
}

void apply_subst_in_place(Sequent& s, Label from, Label to) {
  if (from == kEpsilon) throw SubstituteEpsilon();
  if (from == to) return;
  auto m = [&](Label l) { return l == from ? to : l; };
  std::set<RelAtom> g;
  for (const auto& a : s.g) g.insert(RelAtom{a.kind, m(a.a), m(a.b), a.kind == AtomKind::Ternary ? m(a.c) : 0});
  auto remap = [&](const std::set<LabelledFormula>& xs) {
    std::set<LabelledFormula> out;
    for (const auto& lf : xs) out.insert({m(lf.label), lf.formula});
    return out;
  };
  s.g = std::move(g);
  s.gamma = remap(s.gamma);
  s.delta = remap(s.delta);
  s.rebuild_eq();
}

Sequent apply_subst(const Sequent& s, Label from, Label to) {
  Sequent out = s;
  apply_subst_in_place(out, from, to);
  return out;
}

std::string to_string(const Sequent& s) {
  std::string out;
  bool first = true;
  for (const auto& a : s.g) {
    if (!first) out += "; ";
    out += to_string(a);
    first = false;
  }
  out += " || ";
  first = true;
  for (const auto& lf : s.gamma) {
    if (!first) out += "; ";
    out += to_string(lf);
    first = false;
  }
  out += " |- ";
  first = true;
  for (const auto& lf : s.delta) {
    if (!first) out += "; ";
    out += to_string(lf);
    first = false;
  }
  return out;
}

Label fresh_label(LabelAllocator& alloc) { return alloc.fresh(); }

}  // namespace separata
