#include "separata/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "separata/rng.hpp"

namespace separata {

using json = nlohmann::json;

World KripkeModel::world(const std::string& name) const {
  for (World i = 0; i < worlds.size(); ++i)
    if (worlds[i] == name) return i;
  throw UnknownWorld(name);
}

void KripkeModel::validate() const {
  if (worlds.empty()) throw std::invalid_argument("model has no worlds");
  if (epsilon >= worlds.size()) throw std::invalid_argument("unit is not a world");
  for (const auto& t : rel)
    for (World w : t)
      if (w >= worlds.size()) throw std::invalid_argument("relation mentions a missing world");
  for (const auto& [atom, ws] : valuation)
    for (World w : ws)
      if (w >= worlds.size()) throw std::invalid_argument("valuation of " + atom + " mentions a missing world");
  for (const auto& [l, w] : rho)
    if (w >= worlds.size()) throw std::invalid_argument("label " + label_name(l) + " maps to a missing world");
}

// Evaluation ----------------------------------------------------------------

namespace {

using Truth = std::vector<char>;

class Evaluator {
 public:
  explicit Evaluator(const KripkeModel& m) : m_(m) {}

  const Truth& truth(const Formula& f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    const std::size_t n = m_.size();
    Truth r(n, 0);
    switch (f.op()) {
      case Op::Atom: {
        auto v = m_.valuation.find(f.name());
        if (v != m_.valuation.end())
          for (World w : v->second) r[w] = 1;
        break;
      }
      case Op::Top:
        r.assign(n, 1);
        break;
      case Op::Bot:
        break;
      case Op::Emp:
        r[m_.epsilon] = 1;
        break;
      case Op::Not: {
        const Truth a = truth(f.lhs());
        for (std::size_t i = 0; i < n; ++i) r[i] = !a[i];
        break;
      }
      case Op::And:
      case Op::Or:
      case Op::Imp: {
        const Truth a = truth(f.lhs());
        const Truth b = truth(f.rhs());
        for (std::size_t i = 0; i < n; ++i) {
          if (f.op() == Op::And) r[i] = a[i] && b[i];
          else if (f.op() == Op::Or) r[i] = a[i] || b[i];
          else r[i] = !a[i] || b[i];
        }
        break;
      }
      case Op::Star: {
        const Truth a = truth(f.lhs());
        const Truth b = truth(f.rhs());
        for (const auto& [h1, h2, h] : m_.rel)
          if (a[h1] && b[h2]) r[h] = 1;
        break;
      }
      case Op::Wand: {
        // forall h1 h2. R(h, h1, h2) and h1 |= A imply h2 |= B
        const Truth a = truth(f.lhs());
        const Truth b = truth(f.rhs());
        r.assign(n, 1);
        for (const auto& [h, h1, h2] : m_.rel)
          if (a[h1] && !b[h2]) r[h] = 0;
        break;
      }
    }
    return memo_.emplace(f, std::move(r)).first->second;
  }

 private:
  const KripkeModel& m_;
  std::unordered_map<Formula, Truth, FormulaHash> memo_;
};

}  // namespace

bool eval(const KripkeModel& m, World h, const Formula& f) {
  if (h >= m.size()) throw std::out_of_range("world index out of range");
  Evaluator ev(m);
  return ev.truth(f)[h] != 0;
}

std::vector<bool> eval_all(const KripkeModel& m, const Formula& f) {
  Evaluator ev(m);
  const Truth& t = ev.truth(f);
  return std::vector<bool>(t.begin(), t.end());
}

// Frame conditions ----------------------------------------------------------

namespace {

constexpr World kFree = static_cast<World>(-1);

struct CompiledAtom {
  AtomKind kind;
  int a, b, c;  // variable slots; -1 is the unit
};

class FrameChecker {
 public:
  FrameChecker(const KripkeModel& m, const FrameAxiom& ax) : m_(m), ax_(ax) {
    for (const auto& u : ax.universals) slot(u);
    nuniv_ = names_.size();
    for (const auto& e : ax.existentials) slot(e);
    for (const auto& [s, t] : ax.equalities) hyp_.push_back({AtomKind::Eq, slot(s), slot(t), 0});
    for (const auto& a : ax.antecedent) hyp_.push_back(compile(a));
    for (const auto& a : ax.consequent) concl_.push_back(compile(a));
    // ternary atoms bind fastest; equalities next
    std::stable_sort(hyp_.begin(), hyp_.end(), [](const CompiledAtom& x, const CompiledAtom& y) {
      return rank(x.kind) < rank(y.kind);
    });
    std::stable_sort(concl_.begin(), concl_.end(), [](const CompiledAtom& x, const CompiledAtom& y) {
      return rank(x.kind) < rank(y.kind);
    });
    by_a_.resize(m.size());
    for (const auto& t : m.rel) by_a_[t[0]].push_back(t);
  }

  void run(std::vector<FrameViolation>& out, std::size_t limit) {
    out_ = &out;
    limit_ = limit;
    found_ = 0;
    std::vector<World> env(names_.size(), kFree);
    match(hyp_, 0, env, true);
  }

 private:
  static int rank(AtomKind k) { return k == AtomKind::Ternary ? 0 : k == AtomKind::Eq ? 1 : 2; }

  int slot(const std::string& v) {
    if (v == kUnitName || v == "eps" || v == "\xCE\xB5") return -1;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == v) return static_cast<int>(i);
    names_.push_back(v);
    return static_cast<int>(names_.size() - 1);
  }

  CompiledAtom compile(const AxAtom& a) {
    CompiledAtom c{a.kind, slot(a.a), slot(a.b), 0};
    if (a.kind == AtomKind::Ternary) c.c = slot(a.c);
    return c;
  }

  World get(const std::vector<World>& env, int s) const { return s < 0 ? m_.epsilon : env[s]; }

  // Binds slot s to w, returning false on conflict; `bound` records new bindings.
  static bool bind(std::vector<World>& env, int s, World w, World unit, std::vector<int>& bound) {
    if (s < 0) return w == unit;
    if (env[s] == kFree) {
      env[s] = w;
      bound.push_back(s);
      return true;
    }
    return env[s] == w;
  }

  static void unbind(std::vector<World>& env, std::vector<int>& bound) {
    for (int s : bound) env[s] = kFree;
    bound.clear();
  }

  bool stop() const { return found_ >= limit_; }

  // Enumerates satisfying extensions of env over atoms[i..]. In hypothesis
  // mode each complete universal assignment is checked against the
  // consequent; otherwise returns true as soon as one witness exists.
  bool match(const std::vector<CompiledAtom>& atoms, std::size_t i, std::vector<World>& env, bool hyp) {
    if (hyp && stop()) return true;
    if (i == atoms.size()) return hyp ? complete_universals(env, 0) : complete_existentials(env, nuniv_);
    const CompiledAtom& a = atoms[i];
    if (a.kind == AtomKind::Ternary) {
      auto try_triple = [&](const std::array<World, 3>& t) {
        std::vector<int> bound;
        bool ok = bind(env, a.a, t[0], m_.epsilon, bound) && bind(env, a.b, t[1], m_.epsilon, bound) &&
                  bind(env, a.c, t[2], m_.epsilon, bound);
        bool r = ok && match(atoms, i + 1, env, hyp);
        unbind(env, bound);
        return r;
      };
      World wa = get(env, a.a);
      if (wa != kFree) {
        for (const auto& t : by_a_[wa])
          if (try_triple(t) && !hyp) return true;
      } else {
        for (const auto& t : m_.rel)
          if (try_triple(t) && !hyp) return true;
      }
      return false;
    }
    World x = get(env, a.a), y = get(env, a.b);
    if (a.kind == AtomKind::Eq && (x == kFree) != (y == kFree)) {
      std::vector<int> bound;
      if (x == kFree) bind(env, a.a, y, m_.epsilon, bound);
      else bind(env, a.b, x, m_.epsilon, bound);
      bool r = match(atoms, i + 1, env, hyp);
      unbind(env, bound);
      return r;
    }
    if (x == kFree || y == kFree) {
      // bind one free side over H, then retry this atom
      int s = x == kFree ? a.a : a.b;
      for (World w = 0; w < m_.size(); ++w) {
        env[s] = w;
        bool r = match(atoms, i, env, hyp);
        env[s] = kFree;
        if (r && !hyp) return true;
        if (hyp && stop()) return true;
      }
      return false;
    }
    bool holds = a.kind == AtomKind::Eq ? x == y : x != y;
    return holds && match(atoms, i + 1, env, hyp);
  }

  bool complete_universals(std::vector<World>& env, std::size_t s) {
    if (stop()) return true;
    if (s == nuniv_) {
      if (!match(concl_, 0, env, false)) report(env);
      return true;
    }
    if (env[s] != kFree) return complete_universals(env, s + 1);
    for (World w = 0; w < m_.size() && !stop(); ++w) {
      env[s] = w;
      complete_universals(env, s + 1);
    }
    env[s] = kFree;
    return true;
  }

  bool complete_existentials(std::vector<World>& env, std::size_t s) {
    if (s == names_.size()) return true;
    if (env[s] != kFree) return complete_existentials(env, s + 1);
    // an existential absent from the consequent only needs H non-empty
    return !m_.worlds.empty();
  }

  void report(const std::vector<World>& env) {
    FrameViolation v;
    v.axiom = ax_.name;
    for (std::size_t i = 0; i < nuniv_; ++i) v.witness[names_[i]] = m_.worlds[env[i]];
    out_->push_back(std::move(v));
    ++found_;
  }

  const KripkeModel& m_;
  const FrameAxiom& ax_;
  std::vector<std::string> names_;
  std::size_t nuniv_ = 0;
  std::vector<CompiledAtom> hyp_, concl_;
  std::vector<std::vector<std::array<World, 3>>> by_a_;
  std::vector<FrameViolation>* out_ = nullptr;
  std::size_t limit_ = 1, found_ = 0;
};

}  // namespace

std::string to_string(const FrameViolation& v) {
  std::ostringstream os;
  os << v.axiom << " fails at";
  for (const auto& [k, w] : v.witness) os << ' ' << k << '=' << w;
  return os.str();
}

std::vector<FrameViolation> check_frame(const KripkeModel& m, const std::vector<FrameAxiom>& axioms,
                                        std::size_t per_axiom) {
  std::vector<FrameViolation> out;
  if (per_axiom == 0) return out;
  for (const auto& ax : axioms) {
    FrameChecker fc(m, ax);
    fc.run(out, per_axiom);
  }
  return out;
}

bool falsifiable(const KripkeModel& m, const Sequent& s) {
  auto at = [&](Label l) -> World {
    auto it = m.rho.find(l);
    if (it == m.rho.end()) {
      if (l == kEpsilon) return m.epsilon;
      throw UnmappedLabel(l);
    }
    return it->second;
  };
  if (at(kEpsilon) != m.epsilon) return false;
  for (const auto& a : s.g) {
    switch (a.kind) {
      case AtomKind::Ternary:
        if (!m.related(at(a.a), at(a.b), at(a.c))) return false;
        break;
      case AtomKind::Eq:
        if (at(a.a) != at(a.b)) return false;
        break;
      case AtomKind::Neq:
        if (at(a.a) == at(a.b)) return false;
        break;
    }
  }
  Evaluator ev(m);
  for (const auto& lf : s.gamma)
    if (!ev.truth(lf.formula)[at(lf.label)]) return false;
  for (const auto& lf : s.delta)
    if (ev.truth(lf.formula)[at(lf.label)]) return false;
  return true;
}

// Concrete models -----------------------------------------------------------

KripkeModel heap_frame(int locations, int values, std::size_t cap) {
  if (locations < 0 || values < 0) throw std::invalid_argument("negative heap bounds");
  std::size_t count = 1;
  for (int i = 0; i < locations; ++i) {
    count *= static_cast<std::size_t>(values) + 1;
    if (count > cap) throw CapExceeded("heap frame exceeds " + std::to_string(cap) + " worlds");
  }
  KripkeModel m;
  // world index = base-(values+1) digits, digit 0 = unallocated
  std::vector<std::vector<int>> heaps(count, std::vector<int>(locations));
  for (std::size_t w = 0; w < count; ++w) {
    std::size_t x = w;
    std::string name = "{";
    bool first = true;
    for (int l = 0; l < locations; ++l) {
      heaps[w][l] = static_cast<int>(x % (values + 1));
      x /= values + 1;
      if (heaps[w][l]) {
        if (!first) name += ",";
        name += "l" + std::to_string(l) + ":" + std::to_string(heaps[w][l]);
        first = false;
      }
    }
    m.worlds.push_back(name + "}");
  }
  m.epsilon = 0;
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = 0; b < count; ++b) {
      bool disjoint = true;
      for (int l = 0; l < locations && disjoint; ++l) disjoint = !(heaps[a][l] && heaps[b][l]);
      if (disjoint) m.rel.insert({a, b, a + b});  // digits never carry when disjoint
    }
  return m;
}

void for_each_heap_model(int locations, int values, const std::vector<std::string>& atoms, std::size_t samples,
                         std::uint64_t seed, const std::function<void(const KripkeModel&)>& fn, std::size_t cap) {
  KripkeModel m = heap_frame(locations, values);
  const std::size_t n = m.size();
  const std::size_t bits = n * atoms.size();
  if (samples == 0) {
    if (bits >= 63 || (std::size_t{1} << bits) > cap)
      throw CapExceeded("more than " + std::to_string(cap) + " valuations");
    for (std::size_t code = 0; code < (std::size_t{1} << bits); ++code) {
      m.valuation.clear();
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        auto& ws = m.valuation[atoms[i]];
        for (World w = 0; w < n; ++w)
          if (code >> (i * n + w) & 1) ws.insert(w);
      }
      fn(m);
    }
    return;
  }
  Rng rng(seed, 0x5e3a);
  for (std::size_t k = 0; k < samples; ++k) {
    m.valuation.clear();
    for (const auto& a : atoms) {
      auto& ws = m.valuation[a];
      for (World w = 0; w < n; ++w)
        if (rng.coin()) ws.insert(w);
    }
    fn(m);
  }
}

std::vector<KripkeModel> enumerate_heap_models(int locations, int values, const std::vector<std::string>& atoms,
                                               std::size_t samples, std::uint64_t seed, std::size_t cap) {
  std::vector<KripkeModel> out;
  for_each_heap_model(locations, values, atoms, samples, seed, [&](const KripkeModel& m) { out.push_back(m); },
                      cap);
  return out;
}

KripkeModel make_monoid(const std::vector<std::vector<int>>& table, World unit, std::vector<std::string> names) {
  const std::size_t n = table.size();
  if (unit >= n) throw std::invalid_argument("unit outside the table");
  KripkeModel m;
  if (names.empty())
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  if (names.size() != n) throw std::invalid_argument("name count differs from table size");
  m.worlds = std::move(names);
  m.epsilon = unit;
  for (std::size_t a = 0; a < n; ++a) {
    if (table[a].size() != n) throw std::invalid_argument("table is not square");
    for (std::size_t b = 0; b < n; ++b) {
      int c = table[a][b];
      if (c < 0) continue;
      if (static_cast<std::size_t>(c) >= n) throw std::invalid_argument("table entry out of range");
      m.rel.insert({a, b, static_cast<World>(c)});
    }
  }
  return m;
}

KripkeModel z_mod(int n) {
  if (n < 1) throw std::invalid_argument("modulus must be positive");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return make_monoid(t, 0);
}

KripkeModel fractional_permissions(int denominator) {
  if (denominator < 1) throw std::invalid_argument("denominator must be positive");
  const int n = denominator + 1;
  std::vector<std::vector<int>> t(n, std::vector<int>(n, -1));
  std::vector<std::string> names;
  for (int a = 0; a < n; ++a) {
    names.push_back(a == 0 ? "0" : a == denominator ? "1" : std::to_string(a) + "/" + std::to_string(denominator));
    for (int b = 0; a + b < n; ++b) t[a][b] = a + b;
  }
  return make_monoid(t, 0, names);
}

// JSON ----------------------------------------------------------------------

std::string model_to_json(const KripkeModel& m, int indent) {
  json j;
  j["worlds"] = m.worlds;
  j["epsilon"] = m.worlds.at(m.epsilon);
  json rel = json::array();
  for (const auto& [a, b, c] : m.rel) rel.push_back({m.worlds[a], m.worlds[b], m.worlds[c]});
  j["rel"] = rel;
  json val = json::object();
  for (const auto& [atom, ws] : m.valuation) {
    json arr = json::array();
    for (World w : ws) arr.push_back(m.worlds[w]);
    val[atom] = arr;
  }
  j["valuation"] = val;
  if (!m.rho.empty()) {
    json rho = json::object();
    for (const auto& [l, w] : m.rho) rho[label_name(l)] = m.worlds[w];
    j["rho"] = rho;
  }
  return j.dump(indent);
}

namespace {

Label parse_label_name(const std::string& s) {
  if (s == "e" || s == "eps" || s == "\xCE\xB5") return kEpsilon;
  if (s.size() >= 2 && s[0] == 'w') {
    std::size_t pos = 0;
    unsigned long v = std::stoul(s.substr(1), &pos);
    if (pos == s.size() - 1 && v > 0 && v < 0xffffffffUL) return static_cast<Label>(v);
  }
  throw ModelFormatError("bad label name " + s);
}

}  // namespace

KripkeModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelFormatError(e.what());
  }
  KripkeModel m;
  try {
    if (!j.is_object()) throw ModelFormatError("top level must be an object");
    for (const auto& w : j.at("worlds")) m.worlds.push_back(w.is_string() ? w.get<std::string>() : w.dump());
    if (m.worlds.empty()) throw ModelFormatError("no worlds");
    auto name_of = [](const json& w) { return w.is_string() ? w.get<std::string>() : w.dump(); };
    auto world = [&](const json& w) {
      try {
        return m.world(name_of(w));
      } catch (const UnknownWorld& e) {
        throw ModelFormatError(e.what());
      }
    };
    m.epsilon = j.contains("epsilon") ? world(j["epsilon"]) : 0;
    for (const auto& t : j.at("rel")) {
      if (!t.is_array() || t.size() != 3) throw ModelFormatError("relation entries must be triples");
      m.rel.insert({world(t[0]), world(t[1]), world(t[2])});
    }
    if (j.contains("valuation"))
      for (const auto& [atom, ws] : j["valuation"].items()) {
        auto& set = m.valuation[atom];
        for (const auto& w : ws) set.insert(world(w));
      }
    if (j.contains("rho"))
      for (const auto& [l, w] : j["rho"].items()) m.rho[parse_label_name(l)] = world(w);
  } catch (const json::exception& e) {
    throw ModelFormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(e.what());
  }
  return m;
}

}  // namespace separata
