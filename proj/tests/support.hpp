#pragma once

#include <string>
#include <vector>

#include "separata/cli.hpp"
#include "separata/formula.hpp"
#include "separata/prover.hpp"
#include "separata/rng.hpp"

namespace separata::testing {

/// Any formula of the grammar, with up to `budget` binary connectives.
inline Formula random_ast(Rng& r, int budget) {
  static const char* names[] = {"a", "b", "c", "p_1", "q'", "Zed", "x9"};
  static const Op bin[] = {Op::And, Op::Or, Op::Imp, Op::Star, Op::Wand};
  Formula f;
  if (budget <= 0 || r.below(4) == 0) {
    switch (r.below(7)) {
      case 0: f = Formula::top(); break;
      case 1: f = Formula::bot(); break;
      case 2: f = Formula::emp(); break;
      default: f = Formula::atom(names[r.below(7)]);
    }
  } else {
    int left = static_cast<int>(r.below(static_cast<std::uint64_t>(budget)));
    Formula a = random_ast(r, left);
    Formula b = random_ast(r, budget - 1 - left);
    f = Formula::binary(bin[r.below(5)], a, b);
  }
  if (r.below(5) == 0) f = Formula::negate(f);
  return f;
}

inline Formula table2_formula(int row) {
  for (const auto& [i, text] : table2_suite())
    if (i == row) return parse(text);
  throw std::out_of_range("no such row");
}

inline Verdict prove_big(const Formula& f, const SystemConfig& cfg, double timeout, ProverOptions o = {}) {
  Verdict v;
  run_with_large_stack([&] { v = prove(f, cfg, Budget{timeout, std::nullopt, std::nullopt}, o); });
  return v;
}

}  // namespace separata::testing
