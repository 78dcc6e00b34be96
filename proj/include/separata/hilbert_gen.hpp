#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "separata/formula.hpp"

namespace separata {

struct GenParams {
  /// Binary connectives in the random formulas, split across a schema's
  /// metavariables.
  int n = 10;
  /// Random -*1 / -*2 rewrites applied after instantiation.
  int i = 0;
  std::uint64_t seed = 0;
  int count = 100;
};

/// An axiom schema over metavariables A, B, C.
struct Schema {
  std::string name;
  Formula shape;
  std::vector<std::string> metavars;
};

/// Classical basis followed by the BI schemas, in a fixed order.
const std::vector<Schema>& hilbert_schemas();

/// Replaces each atom named in `subst` by its image, simultaneously.
Formula substitute(const Formula& f, const std::map<std::string, Formula>& subst);

/// A -> (B -* C)  becomes  (A * B) -> C.
std::optional<Formula> wand_elim(const Formula& f);
/// (A * B) -> C  becomes  A -> (B -* C).
std::optional<Formula> wand_intro(const Formula& f);

/// Random formula with exactly `connectives` binary connectives over the
/// atoms p, q, r, s.
Formula random_formula(std::uint64_t seed, std::uint64_t stream, int connectives);

/// Deterministic in (p.seed, p.n, p.i, k).
Formula gen_theorem(const GenParams& p, std::uint64_t k);
std::vector<Formula> gen_suite(const GenParams& p);

}  // namespace separata
