#include "doctest.h"
#include "properties.hpp"

using namespace separata::testing;

namespace {
constexpr std::size_t kCases = 1000;
constexpr std::uint64_t kSeed = 20240601;
}  // namespace

#define PROPERTY(name, fn)                                   \
  TEST_CASE(name) {                                          \
    PropertyResult r = fn(kSeed, kCases);                    \
    CHECK(r.cases >= kCases);                                \
    CHECK_MESSAGE(r.ok(), r.first_failure);                  \
  }

PROPERTY("equality store laws", prop_eq_store)
PROPERTY("parser round trip", prop_round_trip)
PROPERTY("fresh label discipline", prop_fresh_labels)
PROPERTY("right star / left wand pair memo", prop_memo)
PROPERTY("unifying phase is bounded by the label count", prop_unify_bound)
PROPERTY("unit and commutativity laws of the semantics", prop_semantic_laws)
