#pragma once

#include <cstdint>
#include <string>

namespace separata::testing {

struct PropertyResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
};

/// Equivalence-relation and monotonicity laws of the label equality store,
/// against a transitive-closure oracle.
PropertyResult prop_eq_store(std::uint64_t seed, std::size_t cases);
/// parse(render(f)) == f.
PropertyResult prop_round_trip(std::uint64_t seed, std::size_t cases);
/// Labels introduced by *L, -*R and frame rules are new, distinct and not
/// the unit; allocation stays fresh after substitutions.
PropertyResult prop_fresh_labels(std::uint64_t seed, std::size_t cases);
/// No (principal, atom) pair is used twice by *R / -*L along any branch of
/// a proof.
PropertyResult prop_memo(std::uint64_t seed, std::size_t cases);
/// Running only the unifying rules terminates within the number of labels.
PropertyResult prop_unify_bound(std::uint64_t seed, std::size_t cases);
/// A*emp == A and A*B == B*A pointwise on frames satisfying the unit and
/// commutativity axioms.
PropertyResult prop_semantic_laws(std::uint64_t seed, std::size_t cases);

}  // namespace separata::testing
