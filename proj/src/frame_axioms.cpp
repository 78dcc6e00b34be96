#include "separata/frame_axioms.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace separata {

namespace {

bool is_unit(const std::string& s) { return s == "e" || s == "eps" || s == "\xCE\xB5"; }

std::string norm_term(const std::string& s) { return is_unit(s) ? std::string(kUnitName) : s; }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

std::string render_ax_atom(const AxAtom& a) {
  switch (a.kind) {
    case AtomKind::Ternary: return "(" + a.a + "," + a.b + " > " + a.c + ")";
    case AtomKind::Eq: return a.a + " = " + a.b;
    case AtomKind::Neq: return a.a + " != " + a.b;
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_axiom(const FrameAxiom& ax) {
  std::vector<Violation> out;
  std::set<std::string> univ(ax.universals.begin(), ax.universals.end());
  std::set<std::string> exist(ax.existentials.begin(), ax.existentials.end());

  if (univ.size() != ax.universals.size()) out.push_back({0, "duplicate universal variable"});
  if (exist.size() != ax.existentials.size()) out.push_back({0, "duplicate existential variable"});
  for (const auto& y : ax.existentials) {
    if (univ.count(y)) out.push_back({0, "variable " + y + " is both universal and existential"});
    if (is_unit(y)) out.push_back({0, "the unit cannot be quantified"});
  }
  for (const auto& x : ax.universals)
    if (is_unit(x)) out.push_back({0, "the unit cannot be quantified"});

  auto in_scope = [&](const std::string& t, bool allow_exist) {
    return is_unit(t) || univ.count(t) || (allow_exist && exist.count(t));
  };
  auto terms = [](const AxAtom& a) {
    std::vector<std::string> ts{a.a, a.b};
    if (a.kind == AtomKind::Ternary) ts.push_back(a.c);
    return ts;
  };

  for (const auto& [s, t] : ax.equalities)
    for (const auto& v : {s, t})
      if (!in_scope(v, false)) out.push_back({0, "equality mentions unbound variable " + v});

  std::map<std::string, int> occurrences;
  for (const auto& s : ax.antecedent) {
    if (s.kind == AtomKind::Eq)
      out.push_back({1, "antecedent atom " + render_ax_atom(s) + " is neither ternary nor an inequality"});
    for (const auto& v : terms(s)) {
      if (!in_scope(v, false)) out.push_back({0, "antecedent mentions unbound variable " + v});
      if (!is_unit(v)) ++occurrences[v];
    }
    if (s.kind == AtomKind::Ternary) {
      for (const auto& v : terms(s))
        if (is_unit(v)) {
          out.push_back({4, "unit occurs in ternary antecedent atom " + render_ax_atom(s)});
          break;
        }
    }
  }
  for (const auto& [v, n] : occurrences)
    if (n > 1) out.push_back({3, "variable " + v + " occurs " + std::to_string(n) + " times in the antecedent"});

  for (const auto& t : ax.consequent) {
    bool ok = t.kind == AtomKind::Ternary || t.kind == AtomKind::Eq || t.kind == AtomKind::Neq;
    for (const auto& v : terms(t)) ok = ok && !v.empty();
    if (!ok) {
      out.push_back({2, "consequent item " + render_ax_atom(t) + " is not a relational atom"});
      continue;
    }
    for (const auto& v : terms(t))
      if (!in_scope(v, true)) out.push_back({0, "consequent mentions unbound variable " + v});
  }
  return out;
}

InvalidAxiom::InvalidAxiom(const std::string& name, std::vector<Violation> v)
    : std::runtime_error([&] {
        std::string msg = "invalid axiom " + name + ":";
        for (const auto& x : v) msg += " [condition " + std::to_string(x.condition) + "] " + x.message + ";";
        return msg;
      }()),
      violations_(std::move(v)) {}

AxiomParseError::AxiomParseError(std::size_t line, std::size_t column, const std::string& msg)
    : std::runtime_error("axiom line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// DSL

namespace {

class AxiomLexer {
 public:
  AxiomLexer(std::string_view src, std::size_t line) : src_(src), line_(line) {}

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= src_.size();
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (src_.substr(pos_, tok.size()) == tok) {
      // keywords must not run into an identifier
      if (std::isalpha(static_cast<unsigned char>(tok.back())) && pos_ + tok.size() < src_.size()) {
        char n = src_[pos_ + tok.size()];
        if (std::isalnum(static_cast<unsigned char>(n)) || n == '_' || n == '\'') return false;
      }
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  bool peek_ident() {
    skip_ws();
    if (pos_ >= src_.size()) return false;
    unsigned char c = static_cast<unsigned char>(src_[pos_]);
    return std::isalpha(c) || c == '_' || c == 0xCE;
  }
  std::string ident() {
    skip_ws();
    if (src_.substr(pos_, 2) == "\xCE\xB5") {
      pos_ += 2;
      return kUnitName;
    }
    std::size_t start = pos_;
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
      while (pos_ < src_.size()) {
        char c = src_[pos_];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-')
          ++pos_;
        else
          break;
      }
    }
    if (start == pos_) fail("expected identifier");
    return std::string(src_.substr(start, pos_ - start));
  }
  [[noreturn]] void fail(const std::string& msg) { throw AxiomParseError(line_, pos_ + 1, msg); }

 private:
  std::string_view src_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

AxAtom parse_ax_atom(AxiomLexer& lx) {
  if (lx.accept("(")) {
    std::string a = norm_term(lx.ident());
    lx.expect(",");
    std::string b = norm_term(lx.ident());
    lx.expect(">");
    std::string c = norm_term(lx.ident());
    lx.expect(")");
    return AxAtom::ternary(a, b, c);
  }
  std::string a = norm_term(lx.ident());
  if (lx.accept("!=")) return AxAtom::neq(a, norm_term(lx.ident()));
  lx.expect("=");
  return AxAtom::eq(a, norm_term(lx.ident()));
}

std::vector<AxAtom> parse_group(AxiomLexer& lx) {
  std::vector<AxAtom> out;
  lx.expect("[");
  if (lx.accept("]")) return out;
  do {
    out.push_back(parse_ax_atom(lx));
  } while (lx.accept(",") || lx.accept(";"));
  lx.expect("]");
  return out;
}

std::vector<std::string> parse_binder(AxiomLexer& lx) {
  std::vector<std::string> vars;
  while (lx.peek_ident()) vars.push_back(norm_term(lx.ident()));
  lx.expect(".");
  return vars;
}

FrameAxiom parse_axiom_line(std::string_view line, std::size_t lineno) {
  AxiomLexer lx(line, lineno);
  FrameAxiom ax;
  ax.name = lx.ident();
  lx.expect(":");
  if (lx.accept("forall")) ax.universals = parse_binder(lx);
  auto first = parse_group(lx);
  std::vector<AxAtom> second;
  bool two = false;
  {
    // the equality group may be omitted when the antecedent group follows
    two = !lx.accept("=>");
    if (two) {
      second = parse_group(lx);
      lx.expect("=>");
    }
  }
  if (two) {
    for (const auto& e : first) {
      if (e.kind != AtomKind::Eq) lx.fail("first group may only contain equalities");
      ax.equalities.emplace_back(e.a, e.b);
    }
    ax.antecedent = std::move(second);
  } else {
    ax.antecedent = std::move(first);
  }
  if (lx.accept("exists")) ax.existentials = parse_binder(lx);
  ax.consequent = parse_group(lx);
  if (!lx.at_end()) lx.fail("trailing input");
  return ax;
}

}  // namespace

FrameAxiom parse_axiom(std::string_view line) { return parse_axiom_line(line, 1); }

std::vector<FrameAxiom> parse_axioms(std::string_view text) {
  std::vector<FrameAxiom> out;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    bool blank = std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (!blank) out.push_back(parse_axiom_line(line, lineno));
    start = end + 1;
  }
  return out;
}

std::string render_axiom(const FrameAxiom& a) {
  std::string out = a.name + ": forall " + join(a.universals, " ") + ". [";
  std::vector<std::string> eqs;
  for (const auto& [s, t] : a.equalities) eqs.push_back(s + " = " + t);
  out += join(eqs, ", ") + "] [";
  std::vector<std::string> ants;
  for (const auto& s : a.antecedent) ants.push_back(render_ax_atom(s));
  out += join(ants, "; ") + "] => ";
  if (!a.existentials.empty()) out += "exists " + join(a.existentials, " ") + ". ";
  std::vector<std::string> cons;
  for (const auto& t : a.consequent) cons.push_back(render_ax_atom(t));
  return out + "[" + join(cons, "; ") + "]";
}

// ---------------------------------------------------------------------------
// Synthesis and conversion

StructuralRule synthesize_rule(const FrameAxiom& ax) {
  if (auto v = validate_axiom(ax); !v.empty()) throw InvalidAxiom(ax.name, std::move(v));
  StructuralRule r;
  r.name = ax.name;
  std::map<std::string, Label> ids;
  for (const auto& x : ax.universals) {
    r.var_names.push_back(x);
    ids[x] = static_cast<Label>(r.var_names.size());
  }
  for (const auto& y : ax.existentials) {
    r.var_names.push_back(y);
    ids[y] = static_cast<Label>(r.var_names.size());
    r.fresh.push_back(ids[y]);
  }
  auto id = [&](const std::string& t) -> Label { return is_unit(t) ? kEpsilon : ids.at(t); };
  auto conv = [&](const AxAtom& a) {
    return RelAtom{a.kind, id(a.a), id(a.b), a.kind == AtomKind::Ternary ? id(a.c) : 0};
  };
  for (const auto& s : ax.antecedent) r.antecedent.push_back(conv(s));
  for (const auto& [s, t] : ax.equalities) r.side.emplace_back(id(s), id(t));
  for (const auto& t : ax.consequent) r.added.push_back(conv(t));
  return r;
}

namespace {

RelAtom map_atom(const RelAtom& a, const std::function<Label(Label)>& m) {
  return RelAtom{a.kind, m(a.a), m(a.b), a.kind == AtomKind::Ternary ? m(a.c) : 0};
}

}  // namespace

MergedRule merge_side_conditions(const StructuralRule& r) {
  MergedRule m;
  m.name = r.name;
  m.var_names = r.var_names;
  m.antecedent = r.antecedent;
  m.fresh = r.fresh;
  std::vector<RelAtom> added = r.added;
  std::vector<std::pair<Label, Label>> side = r.side;

  for (std::size_t i = 0; i < side.size(); ++i) {
    auto [s, t] = side[i];
    Label from, to;
    if (s == t) continue;
    if (t != kEpsilon) {
      from = t;
      to = s;
    } else {
      from = s;
      to = kEpsilon;
    }
    auto sub = [&](Label l) { return l == from ? to : l; };
    for (auto& a : m.antecedent) a = map_atom(a, sub);
    for (auto& a : added) a = map_atom(a, sub);
    for (std::size_t j = i + 1; j < side.size(); ++j) side[j] = {sub(side[j].first), sub(side[j].second)};
  }
  for (const auto& a : added) {
    if (a.kind == AtomKind::Eq) {
      if (a.a != a.b) m.unify.emplace_back(a.a, a.b);
    } else {
      m.added.push_back(a);
    }
  }
  return m;
}

std::vector<SubstRule> to_subst_rules(const StructuralRule& r) {
  const MergedRule m = merge_side_conditions(r);

  struct Partial {
    std::vector<std::pair<Label, Label>> substs;
    std::vector<std::pair<Label, Label>> pending;
    std::vector<RelAtom> added;
  };
  std::vector<Partial> work{{{}, m.unify, m.added}};
  std::vector<Partial> done;
  while (!work.empty()) {
    Partial p = std::move(work.back());
    work.pop_back();
    if (p.pending.empty()) {
      done.push_back(std::move(p));
      continue;
    }
    auto [x, y] = p.pending.front();
    p.pending.erase(p.pending.begin());
    if (x == y) {
      work.push_back(std::move(p));
      continue;
    }
    // one variant per legal direction; the unit is never substituted away
    for (auto [from, to] : {std::pair{x, y}, std::pair{y, x}}) {
      if (from == kEpsilon) continue;
      Partial q = p;
      auto sub = [from = from, to = to](Label l) { return l == from ? to : l; };
      q.substs.emplace_back(from, to);
      for (auto& pr : q.pending) pr = {sub(pr.first), sub(pr.second)};
      for (auto& a : q.added) a = map_atom(a, sub);
      work.push_back(std::move(q));
    }
  }
  std::reverse(done.begin(), done.end());

  std::vector<SubstRule> out;
  std::set<std::string> seen;
  for (auto& p : done) {
    SubstRule s;
    s.name = m.name;
    s.var_names = m.var_names;
    s.antecedent = m.antecedent;
    s.substs = std::move(p.substs);
    s.fresh = m.fresh;
    std::sort(p.added.begin(), p.added.end());
    p.added.erase(std::unique(p.added.begin(), p.added.end()), p.added.end());
    s.added = std::move(p.added);
    if (seen.insert(canonical_key(s)).second) out.push_back(std::move(s));
  }
  if (out.size() > 1)
    for (std::size_t i = 0; i < out.size(); ++i) out[i].name += "-" + std::to_string(i + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Rendering and canonical keys

namespace {

std::string var_text(const std::vector<std::string>& names, Label v) {
  if (v == kEpsilon) return kUnitName;
  if (v - 1 < names.size()) return names[v - 1];
  return "v" + std::to_string(v);
}

std::string atom_text(const std::vector<std::string>& names, const RelAtom& a) {
  switch (a.kind) {
    case AtomKind::Ternary:
      return "(" + var_text(names, a.a) + "," + var_text(names, a.b) + " > " + var_text(names, a.c) + ")";
    case AtomKind::Eq: return var_text(names, a.a) + " = " + var_text(names, a.b);
    case AtomKind::Neq: return var_text(names, a.a) + " != " + var_text(names, a.b);
  }
  return "?";
}

std::string atoms_text(const std::vector<std::string>& names, const std::vector<RelAtom>& xs) {
  std::vector<std::string> parts;
  for (const auto& a : xs) parts.push_back(atom_text(names, a));
  return join(parts, "; ");
}

/// Tries every antecedent order and every order of the variables that do
/// not occur in the antecedent; returns the smallest serialisation.
template <class Serialise>
std::string min_key(const std::vector<RelAtom>& antecedent, const std::vector<Label>& all_vars, Serialise ser) {
  std::vector<std::size_t> perm(antecedent.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  bool have = false;
  do {
    std::map<Label, Label> ren;
    Label next = 1;
    auto touch = [&](Label l) {
      if (l != kEpsilon && !ren.count(l)) ren[l] = next++;
    };
    for (std::size_t i : perm) {
      const auto& a = antecedent[i];
      touch(a.a);
      touch(a.b);
      if (a.kind == AtomKind::Ternary) touch(a.c);
    }
    std::vector<Label> rest;
    for (Label v : all_vars)
      if (v != kEpsilon && !ren.count(v)) rest.push_back(v);
    std::sort(rest.begin(), rest.end());
    const bool enumerate_rest = rest.size() <= 6;
    do {
      auto ren2 = ren;
      Label n2 = next;
      for (Label v : rest) ren2[v] = n2++;
      auto m = [&](Label l) -> Label { return l == kEpsilon ? kEpsilon : ren2.at(l); };
      std::string key = ser(perm, m);
      if (!have || key < best) {
        best = std::move(key);
        have = true;
      }
    } while (enumerate_rest && std::next_permutation(rest.begin(), rest.end()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::string atom_key(const RelAtom& a) {
  std::ostringstream os;
  os << static_cast<int>(a.kind) << ':' << a.a << ',' << a.b << ',' << a.c;
  return os.str();
}

RelAtom normalise_symmetric(RelAtom a) {
  if (a.kind != AtomKind::Ternary && a.b < a.a) std::swap(a.a, a.b);
  return a;
}

template <class Rule>
std::vector<Label> vars_of(const Rule& r) {
  std::set<Label> vs;
  auto add = [&](const RelAtom& a) {
    vs.insert(a.a);
    vs.insert(a.b);
    if (a.kind == AtomKind::Ternary) vs.insert(a.c);
  };
  for (const auto& a : r.antecedent) add(a);
  for (const auto& a : r.added) add(a);
  for (Label f : r.fresh) vs.insert(f);
  return {vs.begin(), vs.end()};
}

}  // namespace

std::string render_rule(const StructuralRule& r) {
  std::string out = r.name + ":";
  if (!r.antecedent.empty()) out += " " + atoms_text(r.var_names, r.antecedent);
  if (!r.side.empty()) {
    std::vector<std::string> parts;
    for (const auto& [s, t] : r.side) parts.push_back(var_text(r.var_names, s) + " = " + var_text(r.var_names, t));
    out += " | " + join(parts, ", ");
  }
  out += " ==>";
  if (!r.fresh.empty()) {
    std::vector<std::string> parts;
    for (Label f : r.fresh) parts.push_back(var_text(r.var_names, f));
    out += " fresh " + join(parts, " ") + ".";
  }
  if (!r.added.empty()) out += " " + atoms_text(r.var_names, r.added);
  return out;
}

std::string render_rule(const SubstRule& r) {
  std::string out = r.name + ":";
  if (!r.antecedent.empty()) out += " " + atoms_text(r.var_names, r.antecedent);
  out += " ==>";
  for (const auto& [from, to] : r.substs) out += " [" + var_text(r.var_names, to) + "/" + var_text(r.var_names, from) + "]";
  if (!r.fresh.empty()) {
    std::vector<std::string> parts;
    for (Label f : r.fresh) parts.push_back(var_text(r.var_names, f));
    out += " fresh " + join(parts, " ") + ".";
  }
  if (!r.added.empty()) out += " " + atoms_text(r.var_names, r.added);
  return out;
}

std::string canonical_key(const StructuralRule& r) {
  std::vector<Label> vars = vars_of(r);
  for (const auto& [s, t] : r.side) {
    vars.push_back(s);
    vars.push_back(t);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return min_key(r.antecedent, vars, [&](const std::vector<std::size_t>& perm, auto m) {
    std::string k = "A";
    for (std::size_t i : perm) k += "|" + atom_key(map_atom(r.antecedent[i], m));
    std::vector<std::string> side;
    for (const auto& [s, t] : r.side) {
      Label a = m(s), b = m(t);
      if (b < a) std::swap(a, b);
      side.push_back(std::to_string(a) + "=" + std::to_string(b));
    }
    std::sort(side.begin(), side.end());
    k += "#S";
    for (const auto& s : side) k += "|" + s;
    std::vector<std::string> added;
    for (const auto& a : r.added) added.push_back(atom_key(normalise_symmetric(map_atom(a, m))));
    std::sort(added.begin(), added.end());
    k += "#T";
    for (const auto& s : added) k += "|" + s;
    std::vector<Label> fr;
    for (Label f : r.fresh) fr.push_back(m(f));
    std::sort(fr.begin(), fr.end());
    k += "#F";
    for (Label f : fr) k += "|" + std::to_string(f);
    return k;
  });
}

std::string canonical_key(const SubstRule& r) {
  std::vector<Label> vars = vars_of(r);
  for (const auto& [s, t] : r.substs) {
    vars.push_back(s);
    vars.push_back(t);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return min_key(r.antecedent, vars, [&](const std::vector<std::size_t>& perm, auto m) {
    std::string k = "A";
    for (std::size_t i : perm) k += "|" + atom_key(map_atom(r.antecedent[i], m));
    k += "#S";
    for (const auto& [s, t] : r.substs) k += "|" + std::to_string(m(s)) + ">" + std::to_string(m(t));
    std::vector<std::string> added;
    for (const auto& a : r.added) added.push_back(atom_key(normalise_symmetric(map_atom(a, m))));
    std::sort(added.begin(), added.end());
    k += "#T";
    for (const auto& s : added) k += "|" + s;
    std::vector<Label> fr;
    for (Label f : r.fresh) fr.push_back(m(f));
    std::sort(fr.begin(), fr.end());
    k += "#F";
    for (Label f : fr) k += "|" + std::to_string(f);
    return k;
  });
}

// ---------------------------------------------------------------------------
// Builtin library

namespace {

const std::vector<std::pair<std::string, std::string>>& builtin_texts() {
  static const std::vector<std::pair<std::string, std::string>> texts = {
      {"unit-elim", "unit-elim: forall h1 h2 h3. [h2 = e] [(h1,h2 > h3)] => [h1 = h3]"},
      {"unit-intro", "unit-intro: forall h1 h2. [h1 = h2] [] => [(h1,e > h2)]"},
      {"comm", "comm: forall h1 h2 h3. [] [(h1,h2 > h3)] => [(h2,h1 > h3)]"},
      {"assoc",
       "assoc: forall h1 h2 h3 h4 h5 h5'. [h5 = h5'] [(h1,h5 > h4); (h2,h3 > h5')] => exists h6. "
       "[(h6,h3 > h4); (h1,h2 > h6)]"},
      {"cancel",
       "cancel: forall h1 h2 h3 h4 h1' h3'. [h1 = h1', h3 = h3'] [(h1,h2 > h3); (h1',h4 > h3')] => [h2 = h4]"},
      {"pdet",
       "pdet: forall h1 h1' h2 h2' h3 h4. [h1 = h1', h2 = h2'] [(h1,h2 > h3); (h1',h2' > h4)] => [h3 = h4]"},
      {"indiv-unit", "indiv-unit: forall h1 h2 h0. [h0 = e] [(h1,h2 > h0)] => [h1 = e]"},
      {"disjoint", "disjoint: forall h1 h2 h3. [h1 = h3] [(h1,h3 > h2)] => [h1 = e]"},
      {"split", "split: forall h0. [] [h0 != e] => exists h1 h2. [h1 != e; h2 != e; (h1,h2 > h0)]"},
      {"cross-split",
       "cross-split: forall x y z u v z'. [z = z'] [(x,y > z); (u,v > z')] => exists p q s t. "
       "[(p,q > x); (p,s > u); (s,t > y); (q,t > v)]"},
      {"extend", "extend: forall h1. [] [] => exists h2 h3. [h2 != e; (h1,h2 > h3)]"},
  };
  return texts;
}

const std::map<std::string, FrameAxiom>& builtin_map() {
  static const std::map<std::string, FrameAxiom> m = [] {
    std::map<std::string, FrameAxiom> out;
    for (const auto& [name, text] : builtin_texts()) out[name] = parse_axiom(text);
    return out;
  }();
  return m;
}

}  // namespace

const FrameAxiom& builtin_axiom(const std::string& name) {
  auto it = builtin_map().find(name);
  if (it == builtin_map().end()) throw std::out_of_range("no builtin axiom named " + name);
  return it->second;
}

std::vector<std::string> builtin_axiom_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtin_texts()) out.push_back(name);
  return out;
}

const FrameAxiom& unit_shortcut_axiom() { return builtin_axiom("indiv-unit"); }

void compile(SystemConfig& cfg) {
  cfg.rules.clear();
  cfg.subst_rules.clear();
  cfg.merged.clear();
  bool has_iu = false;
  for (const auto& ax : cfg.axioms) {
    cfg.rules.push_back(synthesize_rule(ax));
    if (ax.name == unit_shortcut_axiom().name) has_iu = true;
    for (const auto& s : ax.antecedent)
      if (s.kind == AtomKind::Neq) cfg.em = cfg.neq = true;
  }
  if (cfg.iu_shortcut && !has_iu) cfg.rules.push_back(synthesize_rule(unit_shortcut_axiom()));
  for (const auto& r : cfg.rules) {
    cfg.subst_rules.push_back(to_subst_rules(r));
    cfg.merged.push_back(merge_side_conditions(r));
  }
}

SystemConfig system_from_axioms(const std::string& name, std::vector<FrameAxiom> axioms) {
  SystemConfig cfg;
  cfg.name = name;
  cfg.axioms = std::move(axioms);
  compile(cfg);
  return cfg;
}

SystemConfig builtin_system(const std::string& name) {
  std::vector<std::string> parts;
  {
    std::string cur;
    for (char c : name) {
      if (c == '+') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
  }
  std::vector<std::string> ax;
  const std::string& base = parts.front();
  if (base == "bbi-nd") {
    ax = {"unit-elim", "unit-intro", "comm", "assoc"};
  } else if (base == "pasl") {
    ax = {"unit-elim", "unit-intro", "comm", "assoc", "cancel", "pdet"};
  } else if (base == "pasl-nocancel") {
    ax = {"unit-elim", "unit-intro", "comm", "assoc", "pdet"};
  } else {
    throw UnknownSystem(name);
  }
  SystemConfig cfg;
  cfg.name = name;
  auto add = [&](const std::string& a) {
    if (std::find(ax.begin(), ax.end(), a) == ax.end()) ax.push_back(a);
  };
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& f = parts[i];
    if (f == "iu") {
      add("indiv-unit");
    } else if (f == "d") {
      add("disjoint");
      cfg.iu_shortcut = true;
    } else if (f == "s") {
      add("split");
    } else if (f == "cs") {
      add("cross-split");
    } else if (f == "ext") {
      add("extend");
    } else if (f == "p") {
      add("pdet");
    } else if (f == "c") {
      add("cancel");
    } else {
      throw UnknownSystem(name);
    }
  }
  for (const auto& a : ax) cfg.axioms.push_back(builtin_axiom(a));
  compile(cfg);
  return cfg;
}

}  // namespace separata
