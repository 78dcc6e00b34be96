#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "separata/frame_axioms.hpp"
#include "separata/labels.hpp"

namespace separata {

enum class RuleKind : std::uint8_t {
  // zero-premise
  Id,
  BotL,
  TopR,
  EmpR,
  NEq,
  // logical
  EmpL,
  AndL,
  AndR,
  OrL,
  OrR,
  NotL,
  NotR,
  ImpL,
  ImpR,
  StarL,
  StarR,
  WandL,
  WandR,
  // structural
  Frame,  // a rule synthesised from a frame axiom
  EM,
};

const char* rule_kind_name(RuleKind k) noexcept;
bool is_closure(RuleKind k) noexcept;

/// Marks pattern variables that a binding leaves open.
inline constexpr Label kUnbound = 0xffffffffu;

/// Everything needed to regenerate the premises of one rule application.
struct RuleInstance {
  RuleKind kind = RuleKind::Id;
  std::optional<LabelledFormula> principal;
  /// Principal relational atoms: the chosen atom for *R / -*L, the Neq atom
  /// for NEq, the matched antecedent for frame rules.
  std::vector<RelAtom> atoms;
  /// *L / -*R: the two new labels. Frame rules: labels of the fresh vars.
  std::vector<Label> fresh;
  /// Frame rules: rule index in SystemConfig::rules, substitution variant,
  /// and the full pattern binding (index = pattern variable, [0] = unit).
  std::size_t rule = 0;
  std::size_t variant = 0;
  std::vector<Label> binding;
  /// id: label of the right-hand atom. EM: the label pair.
  Label x = 0, y = 0;
};

std::string rule_name(const RuleInstance& r, const SystemConfig& cfg);
std::string to_string(const RuleInstance& r, const SystemConfig& cfg);

struct Premises {
  std::vector<Sequent> children;
};

class RuleNotApplicable : public std::runtime_error {
 public:
  explicit RuleNotApplicable(const std::string& why) : std::runtime_error("rule not applicable: " + why) {}
};

/// Some closing instance if the sequent is an axiom of the calculus.
std::optional<RuleInstance> close_check(const Sequent& s, const SystemConfig& cfg);
/// True iff `inst` is a zero-premise rule that closes `s`.
bool closes(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg);

/// Logical rules, EmpL included. Fresh labels are drawn from `alloc` when
/// inst.fresh is empty and written back into inst.
Premises apply_logical(const Sequent& s, RuleInstance& inst, LabelAllocator& alloc, const SystemConfig& cfg);

/// All bindings of the rule's antecedent in s; fresh variables stay
/// kUnbound. Equality calculus: syntactic match plus E(G) side conditions.
/// Substitution calculus: the given variant, matched syntactically, with
/// bindings that would substitute the unit away filtered out.
std::vector<std::vector<Label>> match_structural(std::size_t rule, std::size_t variant, const Sequent& s,
                                                 const SystemConfig& cfg);

/// Frame rules and EM. Fresh variables left kUnbound are allocated.
Premises apply_structural(const Sequent& s, RuleInstance& inst, LabelAllocator& alloc, const SystemConfig& cfg);

/// Dispatches on inst.kind. Never allocates: every fresh label must already
/// be present in inst. Throws RuleNotApplicable.
Premises regenerate(const Sequent& s, const RuleInstance& inst, const SystemConfig& cfg);

/// Antecedent pattern of a frame rule in the active calculus.
const std::vector<RelAtom>& frame_antecedent(const SystemConfig& cfg, std::size_t rule, std::size_t variant);

/// Tries every assignment of the pattern atoms to `atoms` (same length, any
/// order) and returns the bindings consistent with them.
std::vector<std::vector<Label>> bind_pattern(const std::vector<RelAtom>& pattern, std::size_t nvars,
                                             const std::vector<RelAtom>& atoms);

}  // namespace separata
