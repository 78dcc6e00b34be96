#include "separata/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace separata {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdULL;
  return h ^ (h >> 33);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

const char* op_name(Op op) noexcept {
  switch (op) {
    case Op::Atom: return "atom";
    case Op::Top: return "top";
    case Op::Bot: return "bot";
    case Op::Emp: return "emp";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Imp: return "imp";
    case Op::Star: return "star";
    case Op::Wand: return "wand";
  }
  return "?";
}

Formula Formula::make(Op op, std::string name, std::vector<Formula> kids) {
  std::size_t size = 1;
  std::size_t conn = 0;
  std::uint64_t h = mix(0x5eed, static_cast<std::uint64_t>(op));
  if (op == Op::Atom) h = mix(h, fnv1a(name));
  for (const auto& k : kids) {
    size += k.size();
    conn += k.connectives();
    h = mix(h, k.hash());
  }
  if (kids.size() == 2) ++conn;
  return Formula(std::make_shared<const Node>(Node{op, std::move(name), std::move(kids), size, conn, h}));
}

Formula::Formula() : Formula(top()) {}

Formula Formula::atom(std::string name) { return make(Op::Atom, std::move(name), {}); }
Formula Formula::top() {
  static const Formula t = make(Op::Top, "", {});
  return t;
}
Formula Formula::bot() {
  static const Formula b = make(Op::Bot, "", {});
  return b;
}
Formula Formula::emp() {
  static const Formula e = make(Op::Emp, "", {});
  return e;
}
Formula Formula::negate(Formula f) { return make(Op::Not, "", {std::move(f)}); }
Formula Formula::conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
Formula Formula::imp(Formula a, Formula b) { return binary(Op::Imp, std::move(a), std::move(b)); }
Formula Formula::star(Formula a, Formula b) { return binary(Op::Star, std::move(a), std::move(b)); }
Formula Formula::wand(Formula a, Formula b) { return binary(Op::Wand, std::move(a), std::move(b)); }

Formula Formula::binary(Op op, Formula a, Formula b) {
  if (op < Op::And) throw std::invalid_argument("Formula::binary: not a binary connective");
  return make(op, "", {std::move(a), std::move(b)});
}

bool Formula::is_binary() const noexcept { return op() >= Op::And; }

const Formula& Formula::lhs() const {
  if (node_->kids.empty()) throw std::logic_error("Formula::lhs on atomic formula");
  return node_->kids[0];
}

const Formula& Formula::rhs() const {
  if (node_->kids.size() < 2) throw std::logic_error("Formula::rhs on non-binary formula");
  return node_->kids[1];
}

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
  if (a.op() == Op::Atom) return a.name() == b.name();
  const auto& ka = a.node_->kids;
  const auto& kb = b.node_->kids;
  for (std::size_t i = 0; i < ka.size(); ++i)
    if (!(ka[i] == kb[i])) return false;
  return true;
}

bool operator<(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return false;
  if (a.hash() != b.hash()) return a.hash() < b.hash();
  if (a.op() != b.op()) return a.op() < b.op();
  if (a.op() == Op::Atom) return a.name() < b.name();
  const auto& ka = a.node_->kids;
  const auto& kb = b.node_->kids;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (ka[i] < kb[i]) return true;
    if (kb[i] < ka[i]) return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Ident, Top, Bot, Emp, Not, And, Or, Imp, Star, Wand, LParen, RParen, End };

const char* tok_text(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Top: return "top";
    case Tok::Bot: return "bot";
    case Tok::Emp: return "emp";
    case Tok::Not: return "~";
    case Tok::And: return "&";
    case Tok::Or: return "|";
    case Tok::Imp: return "->";
    case Tok::Star: return "*";
    case Tok::Wand: return "-*";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, start, ""};

    // Unicode synonyms (UTF-8), longest first.
    struct Syn {
      std::string_view bytes;
      Tok kind;
    };
    static constexpr Syn syns[] = {
        {"⊤*", Tok::Emp},   {"⊤∗", Tok::Emp}, {"−∗", Tok::Wand},
        {"-∗", Tok::Wand},  {"−*", Tok::Wand},     {"⊤", Tok::Top},
        {"⊥", Tok::Bot},    {"¬", Tok::Not},       {"∧", Tok::And},
        {"∨", Tok::Or},     {"→", Tok::Imp},       {"∗", Tok::Star},
    };
    for (const auto& s : syns) {
      if (src_.substr(pos_, s.bytes.size()) == s.bytes) {
        pos_ += s.bytes.size();
        return {s.kind, start, std::string(s.bytes)};
      }
    }

    const char c = src_[pos_];
    auto two = src_.substr(pos_, 2);
    if (two == "->") return advance(2, Tok::Imp, start);
    if (two == "-*") return advance(2, Tok::Wand, start);
    switch (c) {
      case '~': return advance(1, Tok::Not, start);
      case '&': return advance(1, Tok::And, start);
      case '|': return advance(1, Tok::Or, start);
      case '*': return advance(1, Tok::Star, start);
      case '(': return advance(1, Tok::LParen, start);
      case ')': return advance(1, Tok::RParen, start);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_ + 1;
      while (end < src_.size()) {
        const char d = src_[end];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'')
          ++end;
        else
          break;
      }
      std::string word(src_.substr(pos_, end - pos_));
      pos_ = end;
      if (word == "top" || word == "T") return {Tok::Top, start, word};
      if (word == "bot") return {Tok::Bot, start, word};
      if (word == "emp") return {Tok::Emp, start, word};
      return {Tok::Ident, start, word};
    }
    throw ParseError(start, {"formula"}, std::string(1, c));
  }

 private:
  Token advance(std::size_t n, Tok k, std::size_t start) {
    pos_ += n;
    return {k, start, std::string(src_.substr(start, n))};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  Formula parse_all() {
    Formula f = parse_imp();
    if (cur_.kind != Tok::End) fail({"->", "-*", "|", "&", "*", "end of input"});
    return f;
  }

 private:
  // Levels, low to high: -> , -* , | , & , * , ~/primary
  Formula parse_imp() {
    Formula lhs = parse_wand();
    if (cur_.kind == Tok::Imp) {
      bump();
      return Formula::imp(std::move(lhs), parse_imp());
    }
    return lhs;
  }

  Formula parse_wand() {
    Formula lhs = parse_or();
    if (cur_.kind == Tok::Wand) {
      bump();
      return Formula::wand(std::move(lhs), parse_wand());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (cur_.kind == Tok::Or) {
      bump();
      f = Formula::disj(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_star();
    while (cur_.kind == Tok::And) {
      bump();
      f = Formula::conj(std::move(f), parse_star());
    }
    return f;
  }

  Formula parse_star() {
    Formula f = parse_unary();
    while (cur_.kind == Tok::Star) {
      bump();
      f = Formula::star(std::move(f), parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    switch (cur_.kind) {
      case Tok::Not:
        bump();
        return Formula::negate(parse_unary());
      case Tok::Ident: {
        std::string name = cur_.text;
        bump();
        return Formula::atom(std::move(name));
      }
      case Tok::Top: bump(); return Formula::top();
      case Tok::Bot: bump(); return Formula::bot();
      case Tok::Emp: bump(); return Formula::emp();
      case Tok::LParen: {
        bump();
        Formula f = parse_imp();
        if (cur_.kind != Tok::RParen) fail({")", "->", "-*", "|", "&", "*"});
        bump();
        return f;
      }
      default:
        fail({"identifier", "top", "bot", "emp", "~", "("});
    }
  }

  void bump() { cur_ = lex_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(cur_.offset, std::move(expected), cur_.kind == Tok::End ? tok_text(Tok::End) : cur_.text);
  }

  Lexer lex_;
  Token cur_;
};

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += "'" + xs[i] + "'";
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": found '" + found +
                         "', expected one of " + join(expected)),
      offset_(offset),
      expected_(std::move(expected)) {}

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

int precedence(Op op) noexcept {
  switch (op) {
    case Op::Imp: return 1;
    case Op::Wand: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Star: return 5;
    case Op::Not: return 6;
    default: return 7;
  }
}

namespace {

bool right_assoc(Op op) { return op == Op::Imp || op == Op::Wand; }

const char* infix(Op op) {
  switch (op) {
    case Op::And: return " & ";
    case Op::Or: return " | ";
    case Op::Imp: return " -> ";
    case Op::Star: return " * ";
    case Op::Wand: return " -* ";
    default: return "?";
  }
}

void render_into(const Formula& f, std::string& out) {
  switch (f.op()) {
    case Op::Atom: out += f.name(); return;
    case Op::Top: out += "top"; return;
    case Op::Bot: out += "bot"; return;
    case Op::Emp: out += "emp"; return;
    case Op::Not: {
      out += '~';
      const bool paren = precedence(f.lhs().op()) < precedence(Op::Not);
      if (paren) out += '(';
      render_into(f.lhs(), out);
      if (paren) out += ')';
      return;
    }
    default: break;
  }
  const int p = precedence(f.op());
  const bool ra = right_assoc(f.op());
  const int pl = precedence(f.lhs().op());
  const int pr = precedence(f.rhs().op());
  const bool paren_l = ra ? pl <= p : pl < p;
  const bool paren_r = ra ? pr < p : pr <= p;
  if (paren_l) out += '(';
  render_into(f.lhs(), out);
  if (paren_l) out += ')';
  out += infix(f.op());
  if (paren_r) out += '(';
  render_into(f.rhs(), out);
  if (paren_r) out += ')';
}

}  // namespace

std::string render(const Formula& f) {
  std::string out;
  render_into(f, out);
  return out;
}

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (seen.count(g)) return;
    if (g.op() == Op::Not) walk(g.lhs());
    if (g.is_binary()) {
      walk(g.lhs());
      walk(g.rhs());
    }
    seen.insert(g);
    out.push_back(g);
  };
  walk(f);
  return out;
}

std::vector<std::string> atom_names(const Formula& f) {
  std::set<std::string> names;
  for (const auto& g : subformulas(f))
    if (g.op() == Op::Atom) names.insert(g.name());
  return {names.begin(), names.end()};
}

}  // namespace separata
