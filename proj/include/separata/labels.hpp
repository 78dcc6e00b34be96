#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "separata/formula.hpp"

namespace separata {

/// Label 0 is the unit world; every other value is a label variable.
using Label = std::uint32_t;
inline constexpr Label kEpsilon = 0;

std::string label_name(Label l);

enum class AtomKind : std::uint8_t { Ternary, Eq, Neq };

/// (a,b > c) for Ternary, a = b / a != b otherwise (c unused, kept 0).
struct RelAtom {
  AtomKind kind = AtomKind::Ternary;
  Label a = 0, b = 0, c = 0;

  static RelAtom ternary(Label a, Label b, Label c) { return {AtomKind::Ternary, a, b, c}; }
  static RelAtom eq(Label a, Label b) { return {AtomKind::Eq, a, b, 0}; }
  static RelAtom neq(Label a, Label b) { return {AtomKind::Neq, a, b, 0}; }

  friend bool operator==(const RelAtom&, const RelAtom&) = default;
  friend auto operator<=>(const RelAtom&, const RelAtom&) = default;
};

std::string to_string(const RelAtom& a);

/// Union-find over labels. The representative of a class is its smallest
/// label, so the unit is always the representative of its own class.
class EqStore {
 public:
  Label find(Label l) const;
  bool query(Label a, Label b) const { return find(a) == find(b); }
  /// Returns false if a and b were already equal.
  bool unite(Label a, Label b);
  bool empty() const { return parent_.empty(); }
  void clear() { parent_.clear(); }

 private:
  void grow(Label l);
  std::vector<Label> parent_;
};

struct LabelledFormula {
  Label label = 0;
  Formula formula;

  friend bool operator==(const LabelledFormula& x, const LabelledFormula& y) {
    return x.label == y.label && x.formula == y.formula;
  }
  friend bool operator<(const LabelledFormula& x, const LabelledFormula& y) {
    if (x.label != y.label) return x.label < y.label;
    return x.formula < y.formula;
  }
};

std::string to_string(const LabelledFormula& lf);

class SubstituteEpsilon : public std::logic_error {
 public:
  SubstituteEpsilon() : std::logic_error("cannot substitute away the unit label") {}
};

/// G ; Gamma |- Delta. `eq` always equals the closure of the Eq atoms of `g`.
struct Sequent {
  std::set<RelAtom> g;
  std::set<LabelledFormula> gamma;
  std::set<LabelledFormula> delta;
  EqStore eq;

  bool eq_query(Label a, Label b) const { return eq.query(a, b); }
  /// Adds an arbitrary atom, keeping `eq` in sync.
  void add(const RelAtom& a);
  void rebuild_eq();

  /// Every label occurring in g, gamma or delta.
  std::set<Label> labels() const;
  Label max_label() const;

  friend bool operator==(const Sequent& x, const Sequent& y) {
    return x.g == y.g && x.gamma == y.gamma && x.delta == y.delta;
  }
};

bool eq_query(const Sequent& s, Label a, Label b);
Sequent assert_eq(const Sequent& s, Label a, Label b);
/// Replaces `from` by `to` everywhere. Throws SubstituteEpsilon if from is
/// the unit.
Sequent apply_subst(const Sequent& s, Label from, Label to);
void apply_subst_in_place(Sequent& s, Label from, Label to);

std::string to_string(const Sequent& s);

/// Hands out label variables that are unused in the current attempt.
class LabelAllocator {
 public:
  LabelAllocator() = default;
  explicit LabelAllocator(Label next) : next_(next < 1 ? 1 : next) {}
  /// Starts strictly above every label of s.
  static LabelAllocator above(const Sequent& s) { return LabelAllocator(s.max_label() + 1); }

  Label fresh() { return next_++; }
  Label peek() const { return next_; }
  void reserve_above(Label l) {
    if (l >= next_) next_ = l + 1;
  }

 private:
  Label next_ = 1;
};

Label fresh_label(LabelAllocator& alloc);

}  // namespace separata
