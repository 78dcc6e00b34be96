#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace separata {

/// Connectives of propositional abstract separation logic.
enum class Op : std::uint8_t { Atom, Top, Bot, Emp, Not, And, Or, Imp, Star, Wand };

const char* op_name(Op op) noexcept;

/// Immutable formula handle. Copies share the underlying node; equality is
/// structural. A default-constructed Formula is `top`.
class Formula {
 public:
  Formula();

  static Formula atom(std::string name);
  static Formula top();
  static Formula bot();
  static Formula emp();
  static Formula negate(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula star(Formula a, Formula b);
  static Formula wand(Formula a, Formula b);
  static Formula binary(Op op, Formula a, Formula b);

  Op op() const noexcept { return node_->op; }
  const std::string& name() const noexcept { return node_->name; }
  /// Operand of Not, left operand of binary connectives.
  const Formula& lhs() const;
  const Formula& rhs() const;

  bool is_binary() const noexcept;
  bool is_atomic() const noexcept { return op() <= Op::Emp; }

  /// Node count.
  std::size_t size() const noexcept { return node_->size; }
  /// Number of binary connectives.
  std::size_t connectives() const noexcept { return node_->connectives; }
  std::uint64_t hash() const noexcept { return node_->hash; }
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept { return !(a == b); }
  /// Total, deterministic order (hash first, then structure).
  friend bool operator<(const Formula& a, const Formula& b) noexcept;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Op op, std::string name, std::vector<Formula> kids);

  struct Node {
    Op op;
    std::string name;
    std::vector<Formula> kids;
    std::size_t size;
    std::size_t connectives;
    std::uint64_t hash;
  };
  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return static_cast<std::size_t>(f.hash()); }
};

/// Thrown by parse() on malformed input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Precedence, lowest first: -> (right), -* (right), | (left), & (left),
// * (left), ~ (prefix). Keywords: top/T, bot, emp. Unicode synonyms:
// ⊤ ⊥ ⊤* ¬ ∧ ∨ → ∗ −∗.
Formula parse(std::string_view text);

/// Minimal-parenthesis rendering; parse(render(f)) == f.
std::string render(const Formula& f);

/// Binding strength used by render(); higher binds tighter.
int precedence(Op op) noexcept;

/// Every distinct subformula, children before parents.
std::vector<Formula> subformulas(const Formula& f);

/// Atom names occurring in f, sorted and unique.
std::vector<std::string> atom_names(const Formula& f);

}  // namespace separata
