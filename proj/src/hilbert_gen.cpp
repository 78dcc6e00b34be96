#include "separata/hilbert_gen.hpp"

#include "separata/rng.hpp"

namespace separata {

const std::vector<Schema>& hilbert_schemas() {
  static const std::vector<Schema> table = [] {
    std::vector<std::pair<std::string, std::string>> src = {
        // classical
        {"k", "A -> (B -> A)"},
        {"s", "(A -> (B -> C)) -> ((A -> B) -> (A -> C))"},
        {"contra", "(~A -> ~B) -> (B -> A)"},
        {"not-intro", "(A -> bot) -> ~A"},
        {"not-elim", "~A -> (A -> bot)"},
        {"and-l", "A & B -> A"},
        {"and-r", "A & B -> B"},
        {"and-i", "A -> (B -> A & B)"},
        {"or-l", "A -> A | B"},
        {"or-r", "B -> A | B"},
        {"or-e", "(A -> C) -> ((B -> C) -> (A | B -> C))"},
        {"bot-e", "bot -> A"},
        {"top-i", "A -> top"},
        // bunched
        {"unit-in", "A -> emp * A"},
        {"unit-out", "emp * A -> A"},
        {"star-comm", "A * B -> B * A"},
        {"star-assoc", "A * (B * C) -> (A * B) * C"},
    };
    std::vector<Schema> out;
    for (auto& [name, text] : src) {
      Formula f = parse(text);
      out.push_back({name, f, atom_names(f)});
    }
    return out;
  }();
  return table;
}

Formula substitute(const Formula& f, const std::map<std::string, Formula>& subst) {
  switch (f.op()) {
    case Op::Atom: {
      auto it = subst.find(f.name());
      return it == subst.end() ? f : it->second;
    }
    case Op::Top:
    case Op::Bot:
    case Op::Emp:
      return f;
    case Op::Not:
      return Formula::negate(substitute(f.lhs(), subst));
    default:
      return Formula::binary(f.op(), substitute(f.lhs(), subst), substitute(f.rhs(), subst));
  }
}

std::optional<Formula> wand_elim(const Formula& f) {
  if (f.op() != Op::Imp || f.rhs().op() != Op::Wand) return std::nullopt;
  return Formula::imp(Formula::star(f.lhs(), f.rhs().lhs()), f.rhs().rhs());
}

std::optional<Formula> wand_intro(const Formula& f) {
  if (f.op() != Op::Imp || f.lhs().op() != Op::Star) return std::nullopt;
  return Formula::imp(f.lhs().lhs(), Formula::wand(f.lhs().rhs(), f.rhs()));
}

namespace {

const Op kBinary[] = {Op::And, Op::Or, Op::Imp, Op::Star, Op::Wand};
const char* kAtoms[] = {"p", "q", "r", "s"};

Formula leaf(Rng& r) {
  switch (r.below(10)) {
    case 0: return Formula::top();
    case 1: return Formula::bot();
    case 2: return Formula::emp();
    default: return Formula::atom(kAtoms[r.below(4)]);
  }
}

Formula grow(Rng& r, int c) {
  Formula f;
  if (c <= 0) {
    f = leaf(r);
  } else {
    Op op = kBinary[r.below(5)];
    int left = static_cast<int>(r.below(static_cast<std::uint64_t>(c)));
    Formula a = grow(r, left);
    Formula b = grow(r, c - 1 - left);
    f = Formula::binary(op, a, b);
  }
  if (r.below(6) == 0) f = Formula::negate(f);
  return f;
}

}  // namespace

Formula random_formula(std::uint64_t seed, std::uint64_t stream, int connectives) {
  Rng r(seed, stream);
  return grow(r, connectives);
}

Formula gen_theorem(const GenParams& p, std::uint64_t k) {
  Rng r(p.seed, k);
  const auto& schemas = hilbert_schemas();
  const Schema& sc = schemas[r.below(schemas.size())];

  // split n connectives over the metavariables (stars and bars)
  std::vector<int> share(sc.metavars.size(), 0);
  for (int j = 0; j < std::max(p.n, 0); ++j) ++share[r.below(share.size())];
  std::map<std::string, Formula> subst;
  for (std::size_t j = 0; j < sc.metavars.size(); ++j) subst[sc.metavars[j]] = grow(r, share[j]);
  Formula f = substitute(sc.shape, subst);

  for (int it = 0; it < p.i; ++it) {
    std::vector<Formula> options;
    if (auto g = wand_elim(f)) options.push_back(*g);
    if (auto g = wand_intro(f)) options.push_back(*g);
    if (options.empty()) continue;
    f = options[r.below(options.size())];
  }
  return f;
}

std::vector<Formula> gen_suite(const GenParams& p) {
  std::vector<Formula> out;
  out.reserve(static_cast<std::size_t>(std::max(p.count, 0)));
  for (int k = 0; k < p.count; ++k) out.push_back(gen_theorem(p, static_cast<std::uint64_t>(k)));
  return out;
}

}  // namespace separata
