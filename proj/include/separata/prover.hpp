#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "separata/calculus.hpp"
#include "separata/formula.hpp"
#include "separata/frame_axioms.hpp"
#include "separata/semantics.hpp"

namespace separata {

struct Budget {
  double timeout_seconds = 60.0;
  std::optional<std::uint64_t> max_labels;
  std::optional<std::uint64_t> max_steps;
};

struct ProofNode {
  Sequent sequent;
  RuleInstance rule;
  std::vector<ProofNode> children;

  ProofNode() = default;
  ProofNode(const ProofNode&) = default;
  ProofNode(ProofNode&&) noexcept = default;
  ProofNode& operator=(const ProofNode&) = default;
  ProofNode& operator=(ProofNode&&) noexcept = default;
  /// Iterative, so deep proofs do not exhaust the stack.
  ~ProofNode();
};

struct Proof {
  Formula formula;
  Label root_label = 1;
  ProofNode root;

  std::size_t size() const;
  std::size_t depth() const;
};

enum class VerdictKind : std::uint8_t { Proved, Refuted, Unknown };
enum class UnknownReason : std::uint8_t { None, Timeout, Budget, SaturationUnvalidated, ReplayFailed };

const char* verdict_name(VerdictKind k) noexcept;
const char* reason_name(UnknownReason r) noexcept;

struct SearchStats {
  std::uint64_t steps = 0;
  std::uint64_t branches = 0;
  std::uint64_t backjumps = 0;
  std::uint64_t substitutions = 0;
  std::uint64_t saturation_rounds = 0;
  std::uint64_t labels = 0;
  std::uint64_t max_depth = 0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::optional<Proof> proof;
  std::optional<KripkeModel> model;
  World world = 0;
  /// Human-readable provenance of a counter-model or failure.
  std::string note;
  SearchStats stats;
  double seconds = 0;
};

/// One rule application seen by the engine, in engine labels.
struct SearchEvent {
  RuleKind kind = RuleKind::Id;
  std::string rule;
  std::optional<LabelledFormula> principal;
  std::vector<RelAtom> atoms;
  std::size_t depth = 0;
};

struct ProverOptions {
  bool backjumping = true;
  /// Orders *R / -*L candidates: immediately closing pairs, then label-tree
  /// hints, then insertion order. Off means insertion order only.
  bool heuristics = true;
  /// Also remember pairs whose premise would repeat the conclusion, so they
  /// are not re-examined. A pair actually applied is never reused either way.
  bool memo = true;
  /// On failure, try to turn the open branch, or failing that a small
  /// finite model search, into a validated counter-model.
  bool saturate = false;
  /// Fraction of the budget given to proof search when saturate is on.
  double search_share = 0.5;
  /// Replay the proof through check_proof before answering Proved.
  bool verify = true;
  std::function<void(const SearchEvent&)> observer;
};

Verdict prove(const Formula& f, const SystemConfig& cfg, const Budget& b, const ProverOptions& opt = {});

/// Replays every node through the calculus. `why` receives the first failure.
bool check_proof(const Proof& p, const SystemConfig& cfg, std::string* why = nullptr);

class NotSaturated : public std::runtime_error {
 public:
  NotSaturated() : std::runtime_error("branch is closed, no model to extract") {}
};

/// Worlds are label classes (under E(G)) plus the unit; R comes from the
/// ternary atoms, the valuation from atomic formulas in the antecedent.
KripkeModel extract_model(const Sequent& branch);

/// Atoms of the label tree matching the two halves of a *-formula at z,
/// in the order they should be tried. Empty when nothing matches.
std::vector<RelAtom> heuristic_hint(const Sequent& s, Label z, const Formula& f);

/// Runs only the label-unifying rules to a fixpoint on s, returning the
/// number of rule applications.
std::size_t unify_saturate(Sequent& s, const SystemConfig& cfg);

/// Searches commutative tables over up to max_worlds worlds that satisfy
/// the frame axioms for one falsifying f. Honours the deadline.
std::optional<std::pair<KripkeModel, World>> find_countermodel(const Formula& f, const SystemConfig& cfg,
                                                               double timeout_seconds, int max_worlds = 4);

/// Runs fn on a thread with a large stack and rethrows its exception.
void run_with_large_stack(const std::function<void()>& fn, std::size_t bytes = std::size_t{512} << 20);

// Output ----------------------------------------------------------------------

std::string proof_to_text(const Proof& p, const SystemConfig& cfg);
std::string proof_to_json(const Proof& p, const SystemConfig& cfg, int indent = -1);

}  // namespace separata
