#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "separata/labels.hpp"

namespace separata {

/// Name of the unit constant inside axioms. `eps` and `ε` are accepted too.
inline constexpr const char* kUnitName = "e";

/// A relational atom over axiom variable names.
struct AxAtom {
  AtomKind kind = AtomKind::Ternary;
  std::string a, b, c;

  static AxAtom ternary(std::string a, std::string b, std::string c) {
    return {AtomKind::Ternary, std::move(a), std::move(b), std::move(c)};
  }
  static AxAtom eq(std::string a, std::string b) { return {AtomKind::Eq, std::move(a), std::move(b), {}}; }
  static AxAtom neq(std::string a, std::string b) { return {AtomKind::Neq, std::move(a), std::move(b), {}}; }

  friend bool operator==(const AxAtom&, const AxAtom&) = default;
};

/// forall universals. (s1 = t1 & ... & S1 & ... => exists existentials. T1 & ...)
struct FrameAxiom {
  std::string name;
  std::vector<std::string> universals;
  std::vector<std::pair<std::string, std::string>> equalities;
  std::vector<AxAtom> antecedent;
  std::vector<std::string> existentials;
  std::vector<AxAtom> consequent;
};

struct Violation {
  /// 1..4 for the four format conditions, 0 for scoping errors.
  int condition = 0;
  std::string message;
};

std::vector<Violation> validate_axiom(const FrameAxiom& a);

class InvalidAxiom : public std::runtime_error {
 public:
  InvalidAxiom(const std::string& name, std::vector<Violation> v);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class AxiomParseError : public std::runtime_error {
 public:
  AxiomParseError(std::size_t line, std::size_t column, const std::string& msg);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// One axiom per line; blank lines and `#` comments are skipped.
/// Format: name: forall x1 .. xm. [s1 = t1, ...] [S1; ...] => exists y1 .. yn. [T1; ...]
std::vector<FrameAxiom> parse_axioms(std::string_view text);
FrameAxiom parse_axiom(std::string_view line);
std::string render_axiom(const FrameAxiom& a);

// Rules are schematic: label 0 is the unit, variables are 1..var_names.size().

/// Equality-based structural rule.
struct StructuralRule {
  std::string name;
  std::vector<std::string> var_names;  // var i is var_names[i-1]
  std::vector<RelAtom> antecedent;
  std::vector<std::pair<Label, Label>> side;  // E(G) |- s = t
  std::vector<Label> fresh;
  std::vector<RelAtom> added;
};

/// Equality-free rule: the premise is the conclusion under `substs`
/// (applied left to right, pairs are (from, to)) plus `added`.
struct SubstRule {
  std::string name;
  std::vector<std::string> var_names;
  std::vector<RelAtom> antecedent;
  std::vector<std::pair<Label, Label>> substs;
  std::vector<Label> fresh;
  std::vector<RelAtom> added;
};

StructuralRule synthesize_rule(const FrameAxiom& a);

/// Side conditions folded into the pattern: consequent equalities kept as
/// unordered `unify` pairs. Both calculi and the search engine share this.
struct MergedRule {
  std::string name;
  std::vector<std::string> var_names;
  std::vector<RelAtom> antecedent;
  std::vector<std::pair<Label, Label>> unify;
  std::vector<Label> fresh;
  std::vector<RelAtom> added;  // no Eq atoms
};

MergedRule merge_side_conditions(const StructuralRule& r);
std::vector<SubstRule> to_subst_rules(const StructuralRule& r);

std::string render_rule(const StructuralRule& r);
std::string render_rule(const SubstRule& r);

/// Renaming-invariant keys; two rules are equal up to renaming iff keys match.
std::string canonical_key(const StructuralRule& r);
std::string canonical_key(const SubstRule& r);

class UnknownSystem : public std::runtime_error {
 public:
  explicit UnknownSystem(const std::string& name) : std::runtime_error("unknown system: " + name) {}
};

enum class Calculus : std::uint8_t { Substitution, Equality };

struct SystemConfig {
  std::string name;
  std::vector<FrameAxiom> axioms;
  bool neq = false;
  bool em = false;
  bool iu_shortcut = false;
  Calculus calculus = Calculus::Substitution;

  // Filled by compile(): one entry per axiom, then the unit shortcut if on.
  std::vector<StructuralRule> rules;
  std::vector<std::vector<SubstRule>> subst_rules;
  std::vector<MergedRule> merged;

  bool use_substitution_calculus() const { return calculus == Calculus::Substitution; }
};

/// Validates axioms, synthesises and converts their rules, forces EM/NEq
/// when an antecedent carries an inequality. Throws InvalidAxiom.
void compile(SystemConfig& cfg);

/// "bbi-nd", "pasl", "pasl-nocancel" optionally followed by "+iu", "+d",
/// "+s", "+cs", "+ext", "+p", "+c" (any combination).
SystemConfig builtin_system(const std::string& name);
SystemConfig system_from_axioms(const std::string& name, std::vector<FrameAxiom> axioms);

/// The DSL text of a named builtin axiom, e.g. "associativity".
const FrameAxiom& builtin_axiom(const std::string& name);
std::vector<std::string> builtin_axiom_names();
/// The unit-shortcut rule added by include_IU_shortcut.
const FrameAxiom& unit_shortcut_axiom();

}  // namespace separata
