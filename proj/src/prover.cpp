#include "separata/prover.hpp"

#include <pthread.h>

#include <algorithm>
#include <chrono>
#include <exception>
#include <unordered_map>
#include <unordered_set>

#include "separata/log.hpp"
#include "separata/rng.hpp"

namespace separata {

const char* verdict_name(VerdictKind k) noexcept {
  switch (k) {
    case VerdictKind::Proved: return "Proved";
    case VerdictKind::Refuted: return "Refuted";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

const char* reason_name(UnknownReason r) noexcept {
  switch (r) {
    case UnknownReason::None: return "none";
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::Budget: return "budget";
    case UnknownReason::SaturationUnvalidated: return "saturation-unvalidated";
    case UnknownReason::ReplayFailed: return "replay-failed";
  }
  return "?";
}

void run_with_large_stack(const std::function<void()>& fn, std::size_t bytes) {
  struct Job {
    const std::function<void()>* fn;
    std::exception_ptr error;
  } job{&fn, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t th;
  auto body = [](void* p) -> void* {
    auto* j = static_cast<Job*>(p);
    try {
      (*j->fn)();
    } catch (...) {
      j->error = std::current_exception();
    }
    return nullptr;
  };
  int rc = pthread_create(&th, &attr, body, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();  // no thread available; run inline
    return;
  }
  pthread_join(th, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::uint32_t kNone = 0xffffffffu;

enum Side : std::uint8_t { kGamma = 0, kDelta = 1 };

// Subformula table shared by every branch of one search.
struct FTable {
  std::vector<Formula> form;
  std::vector<Op> op;
  std::vector<std::uint32_t> lhs, rhs;
  std::unordered_map<Formula, std::uint32_t, FormulaHash> id;

  std::uint32_t intern(const Formula& f) {
    if (auto it = id.find(f); it != id.end()) return it->second;
    std::uint32_t l = kNone, r = kNone;
    if (f.op() == Op::Not) {
      l = intern(f.lhs());
    } else if (f.is_binary()) {
      l = intern(f.lhs());
      r = intern(f.rhs());
    }
    auto k = static_cast<std::uint32_t>(form.size());
    form.push_back(f);
    op.push_back(f.op());
    lhs.push_back(l);
    rhs.push_back(r);
    id.emplace(f, k);
    return k;
  }
};

struct Item {
  Label l;
  std::uint32_t f;
  std::uint32_t origin;
  bool alive;
};

struct GAtom {
  Label a, b, c;
  std::uint32_t origin;
};

struct NAtom {
  Label a, b;
  std::uint32_t origin;
};

inline std::uint64_t lf_key(Label l, std::uint32_t f) { return (std::uint64_t{l} << 32) | f; }

struct Triple {
  Label a, b, c;
  friend bool operator==(const Triple&, const Triple&) = default;
};
struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    return splitmix64((std::uint64_t{t.a} << 32 | t.b) ^ splitmix64(t.c));
  }
};

struct MemoKey {
  Label l;
  std::uint32_t f;
  Label a, b, c;
  friend bool operator==(const MemoKey&, const MemoKey&) = default;
};
struct MemoHash {
  std::size_t operator()(const MemoKey& k) const {
    return splitmix64(lf_key(k.l, k.f) ^ splitmix64((std::uint64_t{k.a} << 32 | k.b) ^ splitmix64(k.c)));
  }
};

struct VecHash {
  std::size_t operator()(const std::vector<Label>& v) const {
    std::uint64_t h = v.size();
    for (Label x : v) h = splitmix64(h ^ x);
    return h;
  }
};

struct Closure {
  RuleInstance inst;
  std::vector<std::uint32_t> core;
};

// One search branch in the current calculus, kept canonical under the
// label substitutions performed so far.
struct Branch {
  Label next_label = 2;
  Label root = 1;
  std::vector<Item> items[2];
  std::unordered_map<std::uint64_t, std::uint32_t> index[2];
  std::vector<GAtom> atoms;
  std::unordered_map<Triple, std::uint32_t, TripleHash> atom_index;
  std::vector<std::vector<std::uint32_t>> by_a, by_b, by_c;
  std::vector<NAtom> neqs;
  std::unordered_map<std::uint64_t, std::uint32_t> neq_index;
  std::vector<std::pair<Side, std::uint32_t>> agenda_unary, agenda_binary;
  std::vector<std::pair<Side, std::uint32_t>> nd;
  std::unordered_set<MemoKey, MemoHash> memo;
  std::unordered_set<std::vector<Label>, VecHash> sat_memo;
  std::vector<std::uint32_t> pending;
  std::optional<Closure> closed;
};

struct StepRec {
  RuleInstance inst;
  std::vector<std::uint32_t> principals;  // sorted
  std::vector<std::uint32_t> created;     // sorted
  bool keep = false;
};

struct TNode {
  std::vector<StepRec> rsteps;  // last step first
  bool split = false;
  RuleInstance inst;  // closing rule, or the binary rule when split
  std::unique_ptr<TNode> left, right;

  TNode() = default;
  TNode(const TNode&) = delete;
  TNode& operator=(const TNode&) = delete;
  ~TNode() {
    std::vector<std::unique_ptr<TNode>> stack;
    if (left) stack.push_back(std::move(left));
    if (right) stack.push_back(std::move(right));
    while (!stack.empty()) {
      auto n = std::move(stack.back());
      stack.pop_back();
      if (n->left) stack.push_back(std::move(n->left));
      if (n->right) stack.push_back(std::move(n->right));
    }
  }
};

enum class OutcomeKind { Closed, Open, Aborted };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Aborted;
  std::vector<std::uint32_t> core;
  std::unique_ptr<TNode> node;
  std::unique_ptr<Branch> open;
  UnknownReason reason = UnknownReason::None;
};

void sorted_insert(std::vector<std::uint32_t>& v, std::uint32_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

bool intersects(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

std::vector<std::uint32_t> minus_union(const std::vector<std::uint32_t>& core, const std::vector<std::uint32_t>& drop,
                                       const std::vector<std::uint32_t>& add) {
  std::vector<std::uint32_t> tmp, out;
  std::set_difference(core.begin(), core.end(), drop.begin(), drop.end(), std::back_inserter(tmp));
  std::set_union(tmp.begin(), tmp.end(), add.begin(), add.end(), std::back_inserter(out));
  return out;
}

enum class RuleClass { Unifying, Closing, Expanding, Free };

class Search {
 public:
  Search(const SystemConfig& cfg, const Budget& budget, const ProverOptions& opt)
      : cfg_(cfg), budget_(budget), opt_(opt), start_(Clock::now()) {
    deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                             std::chrono::duration<double>(std::max(0.0, budget.timeout_seconds)));
    for (const auto& r : cfg.merged) {
      RuleClass c;
      if (r.antecedent.empty()) c = RuleClass::Free;
      else if (!r.fresh.empty()) c = RuleClass::Expanding;
      else if (!r.unify.empty()) c = RuleClass::Unifying;
      else c = RuleClass::Closing;
      classes_.push_back(c);
    }
  }

  FTable ft;
  SearchStats stats;

  Outcome run(const Formula& f) {
    Branch b;
    b.by_a.resize(2);
    b.by_b.resize(2);
    b.by_c.resize(2);
    add_item(b, kDelta, 1, ft.intern(f), next_origin());
    return solve(b, 0);
  }

  /// Applies the unifying rules to a fixpoint, for unify_saturate.
  std::size_t unify_only(Branch& b) {
    std::vector<StepRec> steps;
    std::size_t n = 0;
    while (unify_step(b, steps)) ++n;
    return n;
  }

  // -- state primitives ----------------------------------------------------

  std::uint32_t next_origin() { return origin_counter_++; }

  Label fresh_label(Branch& b) {
    Label l = b.next_label++;
    ++stats.labels;
    grow(b, b.next_label);
    return l;
  }

  static void grow(Branch& b, Label n) {
    if (b.by_a.size() < n) {
      b.by_a.resize(n);
      b.by_b.resize(n);
      b.by_c.resize(n);
    }
  }

  void close(Branch& b, RuleKind kind, std::optional<LabelledFormula> principal, std::vector<std::uint32_t> core,
             Label x = 0, std::optional<RelAtom> atom = std::nullopt) {
    if (b.closed) return;
    Closure c;
    c.inst.kind = kind;
    c.inst.principal = std::move(principal);
    c.inst.x = x;
    if (atom) c.inst.atoms.push_back(*atom);
    std::sort(core.begin(), core.end());
    c.core = std::move(core);
    b.closed = std::move(c);
  }

  LabelledFormula lf(const Item& it) const { return {it.l, ft.form[it.f]}; }

  void check_item_closure(Branch& b, Side side, std::uint32_t idx) {
    const Item& it = b.items[side][idx];
    const Op op = ft.op[it.f];
    if (side == kGamma) {
      if (op == Op::Bot) return close(b, RuleKind::BotL, lf(it), {it.origin});
      if (op == Op::Atom) {
        auto j = b.index[kDelta].find(lf_key(it.l, it.f));
        if (j != b.index[kDelta].end())
          return close(b, RuleKind::Id, lf(it), {it.origin, b.items[kDelta][j->second].origin}, it.l);
      }
    } else {
      if (op == Op::Top) return close(b, RuleKind::TopR, lf(it), {it.origin});
      if (op == Op::Emp && it.l == kEpsilon) return close(b, RuleKind::EmpR, lf(it), {it.origin});
      if (op == Op::Atom) {
        auto j = b.index[kGamma].find(lf_key(it.l, it.f));
        if (j != b.index[kGamma].end()) {
          const Item& g = b.items[kGamma][j->second];
          return close(b, RuleKind::Id, lf(g), {g.origin, it.origin}, it.l);
        }
      }
    }
  }

  void classify(Branch& b, Side side, std::uint32_t idx) {
    const Op op = ft.op[b.items[side][idx].f];
    if (side == kGamma) {
      switch (op) {
        case Op::And:
        case Op::Not:
        case Op::Emp:
        case Op::Star: b.agenda_unary.emplace_back(side, idx); break;
        case Op::Or:
        case Op::Imp: b.agenda_binary.emplace_back(side, idx); break;
        case Op::Wand: b.nd.emplace_back(side, idx); break;
        default: break;
      }
    } else {
      switch (op) {
        case Op::Or:
        case Op::Not:
        case Op::Imp:
        case Op::Wand: b.agenda_unary.emplace_back(side, idx); break;
        case Op::And: b.agenda_binary.emplace_back(side, idx); break;
        case Op::Star: b.nd.emplace_back(side, idx); break;
        default: break;
      }
    }
  }

  /// Returns the new origin, or kNone when the item was already present.
  std::uint32_t add_item(Branch& b, Side side, Label l, std::uint32_t f, std::uint32_t origin) {
    auto [it, fresh] = b.index[side].emplace(lf_key(l, f), static_cast<std::uint32_t>(b.items[side].size()));
    if (!fresh) return kNone;
    b.items[side].push_back({l, f, origin, true});
    check_item_closure(b, side, it->second);
    classify(b, side, it->second);
    return origin;
  }

  void kill(Branch& b, Side side, std::uint32_t idx) {
    Item& it = b.items[side][idx];
    if (!it.alive) return;
    it.alive = false;
    b.index[side].erase(lf_key(it.l, it.f));
  }

  std::uint32_t add_atom(Branch& b, Label x, Label y, Label z, std::uint32_t origin) {
    auto idx = static_cast<std::uint32_t>(b.atoms.size());
    if (!b.atom_index.emplace(Triple{x, y, z}, idx).second) return kNone;
    grow(b, std::max({x, y, z}) + 1);
    b.atoms.push_back({x, y, z, origin});
    b.by_a[x].push_back(idx);
    b.by_b[y].push_back(idx);
    b.by_c[z].push_back(idx);
    b.pending.push_back(idx);
    return origin;
  }

  static std::uint64_t neq_key(Label x, Label y) { return (std::uint64_t{x} << 32) | y; }

  std::uint32_t add_neq(Branch& b, Label x, Label y, std::uint32_t origin) {
    auto idx = static_cast<std::uint32_t>(b.neqs.size());
    if (!b.neq_index.emplace(neq_key(x, y), idx).second) return kNone;
    b.neqs.push_back({x, y, origin});
    if (cfg_.neq && x == y) close(b, RuleKind::NEq, std::nullopt, {origin}, 0, RelAtom::neq(x, y));
    return origin;
  }

  bool has_atom(const Branch& b, Label x, Label y, Label z) const { return b.atom_index.count(Triple{x, y, z}) != 0; }

  /// Replaces `from` by `to` everywhere and restores every index.
  void substitute(Branch& b, Label from, Label to) {
    ++stats.substitutions;
    auto m = [&](Label l) { return l == from ? to : l; };
    b.root = m(b.root);
    for (int s = 0; s < 2; ++s) {
      b.index[s].clear();
      for (std::uint32_t i = 0; i < b.items[s].size(); ++i) {
        Item& it = b.items[s][i];
        if (!it.alive) continue;
        it.l = m(it.l);
        if (!b.index[s].emplace(lf_key(it.l, it.f), i).second) it.alive = false;
      }
    }
    std::vector<GAtom> old = std::move(b.atoms);
    b.atoms.clear();
    b.atom_index.clear();
    for (auto& v : b.by_a) v.clear();
    for (auto& v : b.by_b) v.clear();
    for (auto& v : b.by_c) v.clear();
    b.pending.clear();
    for (const auto& a : old) add_atom(b, m(a.a), m(a.b), m(a.c), a.origin);
    std::vector<NAtom> oldn = std::move(b.neqs);
    b.neqs.clear();
    b.neq_index.clear();
    for (const auto& a : oldn) add_neq(b, m(a.a), m(a.b), a.origin);
    std::unordered_set<MemoKey, MemoHash> memo;
    for (const auto& k : b.memo) memo.insert({m(k.l), k.f, m(k.a), m(k.b), m(k.c)});
    b.memo = std::move(memo);
    std::unordered_set<std::vector<Label>, VecHash> sat;
    for (auto k : b.sat_memo) {
      for (std::size_t i = 1; i < k.size(); ++i)
        if (k[i] == from) k[i] = to;
      sat.insert(std::move(k));
    }
    b.sat_memo = std::move(sat);
    for (int s = 0; s < 2; ++s)
      for (std::uint32_t i = 0; i < b.items[s].size(); ++i)
        if (b.items[s][i].alive) check_item_closure(b, static_cast<Side>(s), i);
  }

  // -- budget ----------------------------------------------------------------

  bool over_budget() {
    if (abort_ != UnknownReason::None) return true;
    ++stats.steps;
    if (budget_.max_steps && stats.steps > *budget_.max_steps) abort_ = UnknownReason::Budget;
    if (budget_.max_labels && stats.labels > *budget_.max_labels) abort_ = UnknownReason::Budget;
    if ((stats.steps & 127) == 0 && Clock::now() > deadline_) abort_ = UnknownReason::Timeout;
    return abort_ != UnknownReason::None;
  }

  bool timed_out_soft() {
    if (abort_ != UnknownReason::None) return true;
    if (++soft_ticks_ % 1024 == 0 && Clock::now() > deadline_) abort_ = UnknownReason::Timeout;
    return abort_ != UnknownReason::None;
  }

  Outcome aborted() {
    Outcome o;
    o.kind = OutcomeKind::Aborted;
    o.reason = abort_;
    return o;
  }

  void notify(const RuleInstance& inst, std::size_t depth) {
    if (log_level() >= 3) SEPARATA_LOG(3, "d" << depth << " " << to_string(inst, cfg_));
    if (!opt_.observer) return;
    SearchEvent e;
    e.kind = inst.kind;
    e.rule = rule_name(inst, cfg_);
    e.principal = inst.principal;
    e.atoms = inst.atoms;
    e.depth = depth;
    opt_.observer(e);
  }

  // -- matching --------------------------------------------------------------

  // Enumerates bindings of `pat` in b. `chosen` receives the origin of the
  // fact matched by each pattern atom. Stops when cb returns true.
  template <class CB>
  bool match(const Branch& b, const std::vector<RelAtom>& pat, std::vector<Label>& th,
             std::vector<std::uint32_t>& chosen, std::vector<char>& done, std::size_t left, std::size_t atom_limit,
             std::size_t neq_limit, CB&& cb) const {
    if (left == 0) return cb(th, chosen);
    // most constrained atom first
    std::size_t best = pat.size();
    int best_score = -1;
    for (std::size_t i = 0; i < pat.size(); ++i) {
      if (done[i]) continue;
      const RelAtom& p = pat[i];
      int score = (th[p.a] != kUnbound) + (th[p.b] != kUnbound);
      if (p.kind == AtomKind::Ternary) score += 2 * (th[p.c] != kUnbound);
      if (score > best_score) {
        best_score = score;
        best = i;
      }
    }
    const RelAtom& p = pat[best];
    done[best] = 1;
    bool stop = false;
    auto attempt = [&](Label x, Label y, Label z, std::uint32_t origin) {
      Label sa = th[p.a], sb = th[p.b], sc = p.kind == AtomKind::Ternary ? th[p.c] : 0;
      bool ok = true;
      auto unify = [&](Label var, Label val) {
        if (th[var] == kUnbound) th[var] = val;
        else ok = ok && th[var] == val;
      };
      unify(p.a, x);
      if (ok) unify(p.b, y);
      if (ok && p.kind == AtomKind::Ternary) unify(p.c, z);
      if (ok) {
        chosen[best] = origin;
        stop = match(b, pat, th, chosen, done, left - 1, atom_limit, neq_limit, cb);
      }
      th[p.a] = sa;
      th[p.b] = sb;
      if (p.kind == AtomKind::Ternary) th[p.c] = sc;
      th[0] = kEpsilon;
    };
    if (p.kind == AtomKind::Ternary) {
      const std::vector<std::uint32_t>* list = nullptr;
      if (th[p.c] != kUnbound) list = th[p.c] < b.by_c.size() ? &b.by_c[th[p.c]] : &empty_;
      else if (th[p.a] != kUnbound) list = th[p.a] < b.by_a.size() ? &b.by_a[th[p.a]] : &empty_;
      else if (th[p.b] != kUnbound) list = th[p.b] < b.by_b.size() ? &b.by_b[th[p.b]] : &empty_;
      if (list) {
        for (std::size_t k = 0; k < list->size() && !stop; ++k) {
          std::uint32_t j = (*list)[k];
          if (j >= atom_limit) break;
          const GAtom& a = b.atoms[j];
          attempt(a.a, a.b, a.c, a.origin);
        }
      } else {
        for (std::size_t j = 0; j < std::min(atom_limit, b.atoms.size()) && !stop; ++j) {
          const GAtom& a = b.atoms[j];
          attempt(a.a, a.b, a.c, a.origin);
        }
      }
    } else if (p.kind == AtomKind::Neq) {
      for (std::size_t j = 0; j < std::min(neq_limit, b.neqs.size()) && !stop; ++j) {
        const NAtom& a = b.neqs[j];
        attempt(a.a, a.b, 0, a.origin);
      }
    } else {
      // equality atoms never occur in merged patterns
    }
    done[best] = 0;
    return stop;
  }

  template <class CB>
  bool match_all(const Branch& b, const std::vector<RelAtom>& pat, std::vector<Label> th, std::size_t atom_limit,
                 std::size_t neq_limit, CB&& cb) const {
    std::vector<std::uint32_t> chosen(pat.size(), kNone);
    std::vector<char> done(pat.size(), 0);
    return match(b, pat, th, chosen, done, pat.size(), atom_limit, neq_limit, cb);
  }

  /// Does some assignment of the rule's fresh variables make all added atoms present?
  bool has_witness(const Branch& b, const MergedRule& r, const std::vector<Label>& th) const {
    std::vector<RelAtom> pat;
    for (const auto& a : r.added)
      if (a.kind != AtomKind::Eq) pat.push_back(a);
    if (pat.empty()) return true;
    std::vector<Label> t = th;
    bool found = match_all(b, pat, t, b.atoms.size(), b.neqs.size(),
                           [](const std::vector<Label>&, const std::vector<std::uint32_t>&) { return true; });
    return found;
  }

  std::vector<RelAtom> bound_antecedent(const MergedRule& r, const std::vector<Label>& th) const {
    std::vector<RelAtom> out;
    for (const auto& p : r.antecedent)
      out.push_back({p.kind, th[p.a], th[p.b], p.kind == AtomKind::Ternary ? th[p.c] : 0});
    return out;
  }

  // Substitution calculus: pick the variant and pattern order whose
  // substitutions run from larger to smaller labels where possible.
  void choose_variant(std::size_t ri, const std::vector<Label>& th, const std::vector<RelAtom>& matched,
                      RuleInstance& inst, std::vector<std::pair<Label, Label>>& substs) const {
    const MergedRule& mr = cfg_.merged[ri];
    const auto& variants = cfg_.subst_rules[ri];
    int best = -1;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const SubstRule& sr = variants[v];
      for (auto bind : bind_pattern(sr.antecedent, mr.var_names.size(), matched)) {
        for (std::size_t i = 1; i < bind.size(); ++i)
          if (bind[i] == kUnbound) bind[i] = th[i];
        std::vector<Label> cur = bind;
        std::vector<std::pair<Label, Label>> seq;
        bool ok = true;
        int score = 0;
        for (const auto& [fv, tv] : sr.substs) {
          if (cur[fv] == kUnbound || cur[tv] == kUnbound) {
            ok = false;
            break;
          }
          Label from = cur[fv], to = cur[tv];
          if (from == to) continue;
          if (from == kEpsilon) {
            ok = false;
            break;
          }
          if (from < to) ++score;
          seq.emplace_back(from, to);
          for (auto& l : cur)
            if (l == from) l = to;
        }
        if (!ok) continue;
        if (best < 0 || score < best) {
          best = score;
          inst.variant = v;
          inst.binding = bind;
          substs = seq;
        }
        if (best == 0) return;
      }
    }
    if (best < 0) throw std::logic_error("no substitution variant fits " + mr.name);
  }

  // -- steps -----------------------------------------------------------------

  /// Step 2: one label-unifying rule instance, if any applies.
  bool unify_step(Branch& b, std::vector<StepRec>& steps, std::size_t depth = 0) {
    while (!b.pending.empty()) {
      if (timed_out_soft()) return false;
      const std::uint32_t seed = b.pending.back();
      const GAtom sa = b.atoms[seed];
      for (std::size_t ri = 0; ri < cfg_.merged.size(); ++ri) {
        if (classes_[ri] != RuleClass::Unifying) continue;
        const MergedRule& r = cfg_.merged[ri];
        for (std::size_t pos = 0; pos < r.antecedent.size(); ++pos) {
          const RelAtom& p = r.antecedent[pos];
          if (p.kind != AtomKind::Ternary) continue;
          std::vector<Label> th(r.var_names.size() + 1, kUnbound);
          th[0] = kEpsilon;
          auto bindv = [&](Label var, Label val) {
            if (th[var] == kUnbound) th[var] = val;
            return th[var] == val;
          };
          if (!(bindv(p.a, sa.a) && bindv(p.b, sa.b) && bindv(p.c, sa.c))) continue;
          std::vector<Label> found;
          std::vector<std::uint32_t> origins;
          match_all(b, r.antecedent, th, b.atoms.size(), b.neqs.size(),
                    [&](const std::vector<Label>& t, const std::vector<std::uint32_t>& ch) {
                      for (const auto& [u, v] : r.unify)
                        if (t[u] != kUnbound && t[v] != kUnbound && t[u] != t[v]) {
                          found = t;
                          origins = ch;
                          return true;
                        }
                      return false;
                    });
          if (found.empty()) continue;
          apply_unifying(b, ri, found, origins, steps, depth);
          return true;
        }
      }
      b.pending.pop_back();
    }
    return false;
  }

  void apply_unifying(Branch& b, std::size_t ri, const std::vector<Label>& th, const std::vector<std::uint32_t>& origins,
                      std::vector<StepRec>& steps, std::size_t depth) {
    const MergedRule& r = cfg_.merged[ri];
    StepRec st;
    st.keep = true;
    st.inst.kind = RuleKind::Frame;
    st.inst.rule = ri;
    st.inst.atoms = bound_antecedent(r, th);
    std::vector<std::pair<Label, Label>> substs;
    if (cfg_.use_substitution_calculus()) {
      choose_variant(ri, th, st.inst.atoms, st.inst, substs);
    } else {
      st.inst.binding = th;
      std::vector<Label> cur = th;
      for (const auto& [u, v] : r.unify) {
        Label x = cur[u], y = cur[v];
        if (x == y) continue;
        Label from = std::max(x, y), to = std::min(x, y);
        substs.emplace_back(from, to);
        for (auto& l : cur)
          if (l == from) l = to;
      }
    }
    for (std::uint32_t o : origins)
      if (o != kNone) sorted_insert(st.principals, o);
    notify(st.inst, depth);
    std::vector<Label> cur = st.inst.binding;
    for (const auto& [from, to] : substs) {
      substitute(b, from, to);
      for (auto& l : cur)
        if (l == from) l = to;
    }
    for (const auto& a : cfg_.use_substitution_calculus() ? cfg_.subst_rules[ri][st.inst.variant].added : r.added) {
      if (a.kind == AtomKind::Eq) continue;
      std::uint32_t o = a.kind == AtomKind::Ternary ? add_atom(b, cur[a.a], cur[a.b], cur[a.c], next_origin())
                                                    : add_neq(b, cur[a.a], cur[a.b], next_origin());
      if (o != kNone) sorted_insert(st.created, o);
    }
    steps.push_back(std::move(st));
  }

  std::uint32_t add_new(Branch& b, Side s, Label l, std::uint32_t f, std::vector<std::uint32_t>& created) {
    std::uint32_t o = add_item(b, s, l, f, next_origin());
    if (o != kNone) sorted_insert(created, o);
    return o;
  }

  void apply_unary(Branch& b, Side side, std::uint32_t idx, std::vector<StepRec>& steps, std::size_t depth) {
    const Item it = b.items[side][idx];
    StepRec st;
    st.inst.principal = lf(it);
    st.principals = {it.origin};
    const std::uint32_t A = ft.lhs[it.f], B = ft.rhs[it.f];
    const Label w = it.l;
    kill(b, side, idx);
    switch (ft.op[it.f]) {
      case Op::And:
        st.inst.kind = RuleKind::AndL;
        add_new(b, kGamma, w, A, st.created);
        add_new(b, kGamma, w, B, st.created);
        break;
      case Op::Not:
        st.inst.kind = side == kGamma ? RuleKind::NotL : RuleKind::NotR;
        add_new(b, side == kGamma ? kDelta : kGamma, w, A, st.created);
        break;
      case Op::Emp:
        st.inst.kind = RuleKind::EmpL;
        if (w != kEpsilon) {
          st.keep = true;
          substitute(b, w, kEpsilon);
        }
        break;
      case Op::Star: {
        st.inst.kind = RuleKind::StarL;
        Label x = fresh_label(b), y = fresh_label(b);
        st.inst.fresh = {x, y};
        sorted_insert(st.created, add_atom(b, x, y, w, next_origin()));
        add_new(b, kGamma, x, A, st.created);
        add_new(b, kGamma, y, B, st.created);
        break;
      }
      case Op::Or:
        st.inst.kind = RuleKind::OrR;
        add_new(b, kDelta, w, A, st.created);
        add_new(b, kDelta, w, B, st.created);
        break;
      case Op::Imp:
        st.inst.kind = RuleKind::ImpR;
        add_new(b, kGamma, w, A, st.created);
        add_new(b, kDelta, w, B, st.created);
        break;
      case Op::Wand: {
        st.inst.kind = RuleKind::WandR;
        Label x = fresh_label(b), y = fresh_label(b);
        st.inst.fresh = {x, y};
        sorted_insert(st.created, add_atom(b, x, w, y, next_origin()));
        add_new(b, kGamma, x, A, st.created);
        add_new(b, kDelta, y, B, st.created);
        break;
      }
      default: throw std::logic_error("not a unary rule");
    }
    notify(st.inst, depth);
    steps.push_back(std::move(st));
  }

  Outcome unwind(std::vector<StepRec>& steps, std::vector<std::uint32_t> core, std::unique_ptr<TNode> node) {
    for (std::size_t i = steps.size(); i-- > 0;) {
      StepRec& s = steps[i];
      if (!opt_.backjumping || s.keep || intersects(core, s.created)) {
        core = minus_union(core, s.created, s.principals);
        node->rsteps.push_back(std::move(s));
      }
    }
    Outcome o;
    o.kind = OutcomeKind::Closed;
    o.core = std::move(core);
    o.node = std::move(node);
    return o;
  }

  // Explores both premises of a binary rule. `left_edit` and `right_edit`
  // turn a copy of the conclusion into each premise and report created origins.
  template <class L, class R>
  Outcome binary(Branch& b, std::vector<StepRec>& steps, RuleInstance inst, std::vector<std::uint32_t> principals,
                 bool may_skip, std::size_t depth, L&& left_edit, R&& right_edit) {
    notify(inst, depth);
    ++stats.branches;
    stats.max_depth = std::max<std::uint64_t>(stats.max_depth, depth + 1);
    std::vector<std::uint32_t> cl, cr;
    Outcome lo;
    {
      Branch left = b;
      left_edit(left, cl);
      lo = solve(left, depth + 1);
    }
    if (lo.kind != OutcomeKind::Closed) return lo;
    if (opt_.backjumping && may_skip && !intersects(lo.core, cl)) {
      ++stats.backjumps;
      return unwind(steps, std::move(lo.core), std::move(lo.node));
    }
    right_edit(b, cr);
    Outcome ro = solve(b, depth + 1);
    if (ro.kind != OutcomeKind::Closed) return ro;
    if (opt_.backjumping && may_skip && !intersects(ro.core, cr)) {
      ++stats.backjumps;
      return unwind(steps, std::move(ro.core), std::move(ro.node));
    }
    std::vector<std::uint32_t> both, created, core;
    std::set_union(lo.core.begin(), lo.core.end(), ro.core.begin(), ro.core.end(), std::back_inserter(both));
    std::set_union(cl.begin(), cl.end(), cr.begin(), cr.end(), std::back_inserter(created));
    std::sort(principals.begin(), principals.end());
    core = minus_union(both, created, principals);
    auto node = std::make_unique<TNode>();
    node->split = true;
    node->inst = std::move(inst);
    node->left = std::move(lo.node);
    node->right = std::move(ro.node);
    return unwind(steps, std::move(core), std::move(node));
  }

  Outcome apply_binary(Branch& b, Side side, std::uint32_t idx, std::vector<StepRec>& steps, std::size_t depth) {
    const Item it = b.items[side][idx];
    RuleInstance inst;
    inst.principal = lf(it);
    const std::uint32_t A = ft.lhs[it.f], B = ft.rhs[it.f];
    const Label w = it.l;
    kill(b, side, idx);
    Side ls, rs;
    switch (ft.op[it.f]) {
      case Op::Or:
        inst.kind = RuleKind::OrL;
        ls = rs = kGamma;
        break;
      case Op::Imp:
        inst.kind = RuleKind::ImpL;
        ls = kDelta;
        rs = kGamma;
        break;
      case Op::And:
        inst.kind = RuleKind::AndR;
        ls = rs = kDelta;
        break;
      default: throw std::logic_error("not a binary rule");
    }
    return binary(
        b, steps, std::move(inst), {it.origin}, true, depth,
        [&](Branch& x, std::vector<std::uint32_t>& c) { add_new(x, ls, w, A, c); },
        [&](Branch& x, std::vector<std::uint32_t>& c) { add_new(x, rs, w, B, c); });
  }

  bool supports(const Branch& b, Label l, std::uint32_t f, int depth) const {
    if (b.index[kGamma].count(lf_key(l, f))) return true;
    if (depth == 0 || ft.op[f] != Op::Star || l >= b.by_c.size()) return false;
    for (std::uint32_t j : b.by_c[l]) {
      const GAtom& a = b.atoms[j];
      if (supports(b, a.a, ft.lhs[f], depth - 1) && supports(b, a.b, ft.rhs[f], depth - 1)) return true;
    }
    return false;
  }

  // Does adding (l, f) to `side` close the branch at once (or after identity expansion)?
  bool closes_with(const Branch& b, Side side, Label l, std::uint32_t f) const {
    const Op op = ft.op[f];
    if (side == kDelta) {
      if (op == Op::Top || (op == Op::Emp && l == kEpsilon)) return true;
      return b.index[kGamma].count(lf_key(l, f)) != 0;
    }
    if (op == Op::Bot) return true;
    return b.index[kDelta].count(lf_key(l, f)) != 0;
  }

  /// Step 4: one *R or -*L application over an existing atom.
  bool nd_step(Branch& b, std::vector<StepRec>& steps, std::size_t depth, Outcome& out) {
    std::size_t best_pos = 0;
    std::uint32_t best_atom = kNone;
    int best_prio = -1;
    // drop dead principals
    b.nd.erase(std::remove_if(b.nd.begin(), b.nd.end(),
                              [&](const auto& e) { return !b.items[e.first][e.second].alive; }),
               b.nd.end());
    std::vector<std::pair<std::size_t, std::uint32_t>> redundant;
    for (std::size_t pos = 0; pos < b.nd.size(); ++pos) {
      const auto [side, idx] = b.nd[pos];
      const Item& it = b.items[side][idx];
      if (it.l >= b.by_c.size()) continue;
      const auto& cands = side == kDelta ? b.by_c[it.l] : b.by_b[it.l];
      const std::uint32_t A = ft.lhs[it.f], B = ft.rhs[it.f];
      for (std::uint32_t j : cands) {
        const GAtom& a = b.atoms[j];
        if (b.memo.count({it.l, it.f, a.a, a.b, a.c})) continue;
        // a premise equal to the conclusion makes the application pointless
        Side rs = side == kDelta ? kDelta : kGamma;
        Label rl = side == kDelta ? a.b : a.c;
        if (b.index[kDelta].count(lf_key(a.a, A)) || b.index[rs].count(lf_key(rl, B))) {
          redundant.emplace_back(pos, j);
          continue;
        }
        int prio = 0;
        if (opt_.heuristics) {
          bool lc = closes_with(b, kDelta, a.a, A), rc = closes_with(b, rs, rl, B);
          prio = (lc ? 2 : 0) + (rc ? 2 : 0);
          if (side == kDelta) {
            if (!lc && supports(b, a.a, A, 3)) prio += 1;
            if (!rc && supports(b, a.b, B, 3)) prio += 1;
          }
        }
        if (prio > best_prio) {
          best_prio = prio;
          best_pos = pos;
          best_atom = j;
        }
        if (!opt_.heuristics || prio >= 4) break;
      }
      if (best_atom != kNone && (!opt_.heuristics || best_prio >= 4)) break;
    }
    if (opt_.memo) {
      for (const auto& [pos, j] : redundant) {
        const Item& it = b.items[b.nd[pos].first][b.nd[pos].second];
        const GAtom& a = b.atoms[j];
        b.memo.insert({it.l, it.f, a.a, a.b, a.c});
      }
    }
    if (best_atom == kNone) return false;

    const auto [side, idx] = b.nd[best_pos];
    const Item it = b.items[side][idx];
    const GAtom a = b.atoms[best_atom];
    b.memo.insert({it.l, it.f, a.a, a.b, a.c});
    // fairness: the principal goes to the back of the list
    b.nd.erase(b.nd.begin() + static_cast<std::ptrdiff_t>(best_pos));
    b.nd.emplace_back(side, idx);

    RuleInstance inst;
    inst.kind = side == kDelta ? RuleKind::StarR : RuleKind::WandL;
    inst.principal = lf(it);
    inst.atoms = {RelAtom::ternary(a.a, a.b, a.c)};
    const std::uint32_t A = ft.lhs[it.f], B = ft.rhs[it.f];
    const Side rs = side == kDelta ? kDelta : kGamma;
    const Label rl = side == kDelta ? a.b : a.c;
    out = binary(
        b, steps, std::move(inst), {it.origin, a.origin}, true, depth,
        [&](Branch& x, std::vector<std::uint32_t>& c) { add_new(x, kDelta, a.a, A, c); },
        [&](Branch& x, std::vector<std::uint32_t>& c) { add_new(x, rs, rl, B, c); });
    return true;
  }

  std::vector<Label> label_universe(const Branch& b) const {
    std::vector<char> seen(b.next_label + 1, 0);
    seen[kEpsilon] = 1;
    for (int s = 0; s < 2; ++s)
      for (const auto& it : b.items[s])
        if (it.alive) seen[it.l] = 1;
    for (const auto& a : b.atoms) seen[a.a] = seen[a.b] = seen[a.c] = 1;
    for (const auto& a : b.neqs) seen[a.a] = seen[a.b] = 1;
    std::vector<Label> out;
    for (Label l = 0; l < seen.size(); ++l)
      if (seen[l]) out.push_back(l);
    return out;
  }

  /// Step 5: one saturation round over a snapshot of the relational atoms.
  bool saturation_round(Branch& b, std::vector<StepRec>& steps, std::size_t depth) {
    ++stats.saturation_rounds;
    const std::size_t atom_limit = b.atoms.size(), neq_limit = b.neqs.size();
    const std::vector<Label> universe = label_universe(b);
    bool progress = false;
    for (RuleClass cls : {RuleClass::Closing, RuleClass::Expanding, RuleClass::Free}) {
      for (std::size_t ri = 0; ri < cfg_.merged.size(); ++ri) {
        if (classes_[ri] != cls) continue;
        const MergedRule& r = cfg_.merged[ri];
        std::vector<std::pair<std::vector<Label>, std::vector<std::uint32_t>>> found;
        std::vector<Label> th(r.var_names.size() + 1, kUnbound);
        th[0] = kEpsilon;
        match_all(b, r.antecedent, th, atom_limit, neq_limit,
                  [&](const std::vector<Label>& t, const std::vector<std::uint32_t>& ch) {
                    found.emplace_back(t, ch);
                    return timed_out_soft();
                  });
        // free universals range over the labels of the sequent and the unit
        std::vector<Label> free_vars;
        {
          std::vector<char> bound(r.var_names.size() + 1, 0);
          bound[0] = 1;
          for (const auto& p : r.antecedent) {
            bound[p.a] = bound[p.b] = 1;
            if (p.kind == AtomKind::Ternary) bound[p.c] = 1;
          }
          for (Label f : r.fresh) bound[f] = 1;
          auto need = [&](Label v) {
            if (!bound[v]) {
              bound[v] = 1;
              free_vars.push_back(v);
            }
          };
          for (const auto& a : r.added) {
            need(a.a);
            need(a.b);
            if (a.kind == AtomKind::Ternary) need(a.c);
          }
          for (const auto& [u, v] : r.unify) {
            need(u);
            need(v);
          }
        }
        for (Label v : free_vars) {
          std::vector<std::pair<std::vector<Label>, std::vector<std::uint32_t>>> next;
          for (const auto& [t, ch] : found)
            for (Label l : universe) {
              auto t2 = t;
              t2[v] = l;
              next.emplace_back(std::move(t2), ch);
            }
          found = std::move(next);
        }
        for (auto& [t, ch] : found) {
          if (over_budget()) return progress;
          std::vector<Label> key = t;
          key.insert(key.begin(), static_cast<Label>(ri));
          if (b.sat_memo.count(key)) continue;
          if (r.fresh.empty()) {
            bool all = true;
            for (const auto& a : r.added) {
              if (a.kind == AtomKind::Ternary && !has_atom(b, t[a.a], t[a.b], t[a.c])) all = false;
              if (a.kind == AtomKind::Neq && !b.neq_index.count(neq_key(t[a.a], t[a.b]))) all = false;
            }
            if (all) {
              b.sat_memo.insert(std::move(key));
              continue;
            }
          } else if (has_witness(b, r, t)) {
            b.sat_memo.insert(std::move(key));
            continue;
          }
          b.sat_memo.insert(std::move(key));
          StepRec st;
          st.inst.kind = RuleKind::Frame;
          st.inst.rule = ri;
          std::vector<Label> bind = t;
          for (Label f : r.fresh) {
            bind[f] = fresh_label(b);
            st.inst.fresh.push_back(bind[f]);
          }
          st.inst.binding = bind;
          st.inst.atoms = bound_antecedent(r, bind);
          for (std::uint32_t o : ch)
            if (o != kNone) sorted_insert(st.principals, o);
          for (const auto& a : r.added) {
            std::uint32_t o = a.kind == AtomKind::Ternary ? add_atom(b, bind[a.a], bind[a.b], bind[a.c], next_origin())
                                                          : add_neq(b, bind[a.a], bind[a.b], next_origin());
            if (o != kNone) sorted_insert(st.created, o);
          }
          std::vector<std::pair<Label, Label>> substs;
          if (!r.unify.empty()) {
            // rules mixing fresh witnesses and equalities: rare, handled generically
            st.keep = true;
            if (cfg_.use_substitution_calculus()) {
              choose_variant(ri, bind, st.inst.atoms, st.inst, substs);
            } else {
              std::vector<Label> cur = bind;
              for (const auto& [u, v] : r.unify) {
                Label x = cur[u], y = cur[v];
                if (x == y) continue;
                substs.emplace_back(std::max(x, y), std::min(x, y));
                for (auto& l : cur)
                  if (l == std::max(x, y)) l = std::min(x, y);
              }
            }
          }
          notify(st.inst, depth);
          progress = true;
          steps.push_back(std::move(st));
          if (!substs.empty()) {
            for (const auto& [from, to] : substs) substitute(b, from, to);
            return true;  // bindings of this round are stale now
          }
        }
      }
    }
    return progress;
  }

  bool em_step(Branch& b, std::vector<StepRec>& steps, std::size_t depth, Outcome& out) {
    if (!cfg_.em) return false;
    const std::vector<Label> ls = label_universe(b);
    for (std::size_t i = 0; i < ls.size(); ++i)
      for (std::size_t j = i + 1; j < ls.size(); ++j) {
        Label x = ls[i], y = ls[j];
        if (b.neq_index.count(neq_key(x, y)) || b.neq_index.count(neq_key(y, x))) continue;
        RuleInstance inst;
        inst.kind = RuleKind::EM;
        inst.x = x;
        inst.y = y;
        out = binary(
            b, steps, std::move(inst), {}, false, depth,
            [&](Branch& br, std::vector<std::uint32_t>&) { substitute(br, y, x); },
            [&](Branch& br, std::vector<std::uint32_t>& c) {
              std::uint32_t o = add_neq(br, x, y, next_origin());
              if (o != kNone) sorted_insert(c, o);
            });
        return true;
      }
    return false;
  }

  Outcome solve(Branch& b, std::size_t depth) {
    std::vector<StepRec> steps;
    for (;;) {
      if (over_budget()) return aborted();
      if (b.closed) {
        auto node = std::make_unique<TNode>();
        node->inst = b.closed->inst;
        notify(node->inst, depth);
        return unwind(steps, b.closed->core, std::move(node));
      }
      if (unify_step(b, steps, depth)) continue;
      if (!b.agenda_unary.empty()) {
        auto [side, idx] = b.agenda_unary.back();
        b.agenda_unary.pop_back();
        if (b.items[side][idx].alive) apply_unary(b, side, idx, steps, depth);
        continue;
      }
      if (!b.agenda_binary.empty()) {
        auto [side, idx] = b.agenda_binary.back();
        b.agenda_binary.pop_back();
        if (b.items[side][idx].alive) return apply_binary(b, side, idx, steps, depth);
        continue;
      }
      Outcome out;
      if (nd_step(b, steps, depth, out)) return out;
      if (saturation_round(b, steps, depth)) continue;
      if (abort_ != UnknownReason::None) return aborted();
      if (em_step(b, steps, depth, out)) return out;
      SEPARATA_LOG(2, "open branch after " << stats.steps << " steps");
      Outcome o;
      o.kind = OutcomeKind::Open;
      o.open = std::make_unique<Branch>(std::move(b));
      return o;
    }
  }

  Sequent to_sequent(const Branch& b) const {
    Sequent s;
    for (int side = 0; side < 2; ++side)
      for (const auto& it : b.items[side])
        if (it.alive) (side == kGamma ? s.gamma : s.delta).insert({it.l, ft.form[it.f]});
    for (const auto& a : b.atoms) s.add(RelAtom::ternary(a.a, a.b, a.c));
    for (const auto& a : b.neqs) s.add(RelAtom::neq(a.a, a.b));
    return s;
  }

  UnknownReason abort_reason() const { return abort_; }

 private:
  const SystemConfig& cfg_;
  Budget budget_;
  const ProverOptions& opt_;
  Clock::time_point start_, deadline_;
  std::vector<RuleClass> classes_;
  std::uint32_t origin_counter_ = 0;
  UnknownReason abort_ = UnknownReason::None;
  std::uint64_t soft_ticks_ = 0;
  inline static const std::vector<std::uint32_t> empty_{};
};

// ---------------------------------------------------------------------------
// Replay: turn the engine trace into a proof in the public calculus.

bool principal_in_gamma(RuleKind k) {
  switch (k) {
    case RuleKind::EmpL:
    case RuleKind::AndL:
    case RuleKind::OrL:
    case RuleKind::NotL:
    case RuleKind::ImpL:
    case RuleKind::StarL:
    case RuleKind::WandL:
    case RuleKind::BotL:
    case RuleKind::Id: return true;
    default: return false;
  }
}

RelAtom image(const Sequent& s, const RelAtom& a) {
  return {a.kind, s.eq.find(a.a), s.eq.find(a.b), a.kind == AtomKind::Ternary ? s.eq.find(a.c) : 0};
}

// Equality calculus: the engine works on label classes, so each instance is
// mapped back onto concrete members of the public sequent.
RuleInstance lift(const Sequent& s, const RuleInstance& e, const SystemConfig& cfg) {
  RuleInstance r = e;
  auto find_lf = [&](const std::set<LabelledFormula>& side, const LabelledFormula& p) {
    for (const auto& lf : side)
      if (lf.formula == p.formula && s.eq.find(lf.label) == p.label) return lf;
    throw RuleNotApplicable("no member of the class of " + to_string(p));
  };
  auto find_atom = [&](const RelAtom& want, const RelAtom* pattern) {
    for (const auto& a : s.g) {
      if (a.kind != want.kind || image(s, a) != want) continue;
      if (pattern) {
        if (pattern->a == kEpsilon && a.a != kEpsilon) continue;
        if (pattern->b == kEpsilon && a.b != kEpsilon) continue;
        if (pattern->kind == AtomKind::Ternary && pattern->c == kEpsilon && a.c != kEpsilon) continue;
      }
      return a;
    }
    throw RuleNotApplicable("no atom in the class of " + to_string(want));
  };
  if (e.principal) r.principal = find_lf(principal_in_gamma(e.kind) ? s.gamma : s.delta, *e.principal);
  switch (e.kind) {
    case RuleKind::Id: {
      LabelledFormula want{e.x, e.principal->formula};
      r.x = find_lf(s.delta, want).label;
      break;
    }
    case RuleKind::StarR:
    case RuleKind::WandL:
    case RuleKind::NEq: r.atoms = {find_atom(e.atoms.at(0), nullptr)}; break;
    case RuleKind::Frame: {
      const StructuralRule& sr = cfg.rules.at(e.rule);
      std::vector<Label> th(sr.var_names.size() + 1, kUnbound);
      th[0] = kEpsilon;
      r.atoms.clear();
      for (std::size_t i = 0; i < sr.antecedent.size(); ++i) {
        const RelAtom& p = sr.antecedent[i];
        RelAtom raw = find_atom(e.atoms.at(i), &p);
        r.atoms.push_back(raw);
        auto put = [&](Label v, Label l) {
          if (v != kEpsilon) th[v] = l;
        };
        put(p.a, raw.a);
        put(p.b, raw.b);
        if (p.kind == AtomKind::Ternary) put(p.c, raw.c);
      }
      auto close_sides = [&] {
        for (bool changed = true; changed;) {
          changed = false;
          for (const auto& [x, y] : sr.side) {
            if (th[x] == kUnbound && th[y] != kUnbound) th[x] = th[y], changed = true;
            if (th[y] == kUnbound && th[x] != kUnbound) th[y] = th[x], changed = true;
          }
        }
      };
      close_sides();
      for (std::size_t v = 1; v < th.size(); ++v)
        if (th[v] == kUnbound && v < e.binding.size()) th[v] = e.binding[v];
      close_sides();
      r.binding = th;
      r.variant = 0;
      break;
    }
    default: break;
  }
  return r;
}

struct ReplayResult {
  bool ok = true;
  std::string why;
};

ReplayResult replay(const TNode& root, const Sequent& start, const SystemConfig& cfg, ProofNode& out) {
  struct Work {
    const TNode* node;
    Sequent seq;
    ProofNode* target;
  };
  std::vector<Work> stack;
  stack.push_back({&root, start, &out});
  const bool eq_mode = !cfg.use_substitution_calculus();
  try {
    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      ProofNode* cur = w.target;
      Sequent seq = std::move(w.seq);
      for (std::size_t i = w.node->rsteps.size(); i-- > 0;) {
        const RuleInstance& e = w.node->rsteps[i].inst;
        RuleInstance inst = eq_mode ? lift(seq, e, cfg) : e;
        Premises p = regenerate(seq, inst, cfg);
        if (p.children.size() != 1) throw RuleNotApplicable("unary step with " + std::to_string(p.children.size()));
        cur->sequent = std::move(seq);
        cur->rule = std::move(inst);
        cur->children.emplace_back();
        cur = &cur->children.back();
        seq = std::move(p.children[0]);
      }
      RuleInstance inst = eq_mode ? lift(seq, w.node->inst, cfg) : w.node->inst;
      if (!w.node->split) {
        if (!closes(seq, inst, cfg)) throw RuleNotApplicable("leaf does not close: " + to_string(inst, cfg));
        cur->sequent = std::move(seq);
        cur->rule = std::move(inst);
        continue;
      }
      Premises p = regenerate(seq, inst, cfg);
      if (p.children.size() != 2) throw RuleNotApplicable("binary step without two premises");
      cur->sequent = std::move(seq);
      cur->rule = std::move(inst);
      cur->children.resize(2);
      stack.push_back({w.node->right.get(), std::move(p.children[1]), &cur->children[1]});
      stack.push_back({w.node->left.get(), std::move(p.children[0]), &cur->children[0]});
    }
  } catch (const std::exception& ex) {
    return {false, ex.what()};
  }
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------

Verdict prove(const Formula& f, const SystemConfig& cfg, const Budget& budget, const ProverOptions& opt) {
  const auto t0 = Clock::now();
  Verdict v;
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  Budget search_budget = budget;
  if (opt.saturate) {
    search_budget.timeout_seconds = budget.timeout_seconds * opt.search_share;
    // small frames first: cheap, and saturation may never reach a fixpoint
    if (auto cm = find_countermodel(f, cfg, std::min(1.0, 0.05 * budget.timeout_seconds), 3)) {
      v.kind = VerdictKind::Refuted;
      v.model = std::move(cm->first);
      v.world = cm->second;
      v.note = "found by finite model search";
      v.seconds = elapsed();
      return v;
    }
  }

  run_with_large_stack([&] {
    Search search(cfg, search_budget, opt);
    Outcome o = search.run(f);
    v.stats = search.stats;
    SEPARATA_LOG(1, "search " << (o.kind == OutcomeKind::Closed ? "closed" : o.kind == OutcomeKind::Open ? "open" : "aborted")
                              << " steps=" << v.stats.steps << " branches=" << v.stats.branches
                              << " backjumps=" << v.stats.backjumps);
    if (o.kind == OutcomeKind::Closed) {
      Proof p;
      p.formula = f;
      p.root_label = 1;
      Sequent start;
      start.delta.insert({1, f});
      ReplayResult rr = replay(*o.node, start, cfg, p.root);
      o.node.reset();
      std::string why = rr.why;
      if (rr.ok && opt.verify && !check_proof(p, cfg, &why)) rr.ok = false;
      if (!rr.ok) {
        v.kind = VerdictKind::Unknown;
        v.reason = UnknownReason::ReplayFailed;
        v.note = why;
        SEPARATA_LOG(1, "replay failed: " << why);
        return;
      }
      v.kind = VerdictKind::Proved;
      v.proof = std::move(p);
      return;
    }
    if (o.kind == OutcomeKind::Aborted) {
      v.kind = VerdictKind::Unknown;
      v.reason = o.reason;
      return;
    }
    // open branch: a candidate counter-model
    v.kind = VerdictKind::Unknown;
    v.reason = UnknownReason::SaturationUnvalidated;
    if (!opt.saturate) {
      v.note = "search saturated without closing";
      return;
    }
    Sequent branch = search.to_sequent(*o.open);
    KripkeModel m = extract_model(branch);
    Sequent root;
    root.delta.insert({o.open->root, f});
    auto bad = check_frame(m, cfg.axioms);
    if (bad.empty() && falsifiable(m, root)) {
      v.kind = VerdictKind::Refuted;
      v.reason = UnknownReason::None;
      v.world = m.rho.at(o.open->root);
      v.model = std::move(m);
      v.note = "extracted from a saturated branch";
    } else {
      v.note = bad.empty() ? "extracted model does not falsify the formula" : "extracted model: " + to_string(bad[0]);
    }
  });

  if (opt.saturate && v.kind == VerdictKind::Unknown) {
    double left = budget.timeout_seconds - elapsed();
    if (left > 0) {
      if (auto cm = find_countermodel(f, cfg, left)) {
        v.kind = VerdictKind::Refuted;
        v.reason = UnknownReason::None;
        v.model = std::move(cm->first);
        v.world = cm->second;
        v.note = "found by finite model search";
      }
    }
  }
  v.seconds = elapsed();
  return v;
}

std::size_t unify_saturate(Sequent& s, const SystemConfig& cfg) {
  // Runs the public rules directly so the bound is checked independently
  // of the engine.
  std::size_t n = 0;
  LabelAllocator alloc = LabelAllocator::above(s);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t ri = 0; ri < cfg.rules.size() && !changed; ++ri) {
      const MergedRule& mr = cfg.merged[ri];
      if (mr.unify.empty() || !mr.fresh.empty() || mr.antecedent.empty()) continue;
      const std::size_t nv = cfg.use_substitution_calculus() ? cfg.subst_rules[ri].size() : 1;
      for (std::size_t v = 0; v < nv && !changed; ++v) {
        for (const auto& th : match_structural(ri, v, s, cfg)) {
          // only instances that identify two distinct labels count
          bool useful = false;
          for (const auto& [a, b] : mr.unify) {
            Label x = th[a], y = th[b];
            if (x == kUnbound || y == kUnbound) continue;
            if (cfg.use_substitution_calculus() ? x != y : !s.eq_query(x, y)) useful = true;
          }
          if (!useful) continue;
          RuleInstance inst;
          inst.kind = RuleKind::Frame;
          inst.rule = ri;
          inst.variant = v;
          inst.binding = th;
          Premises p = apply_structural(s, inst, alloc, cfg);
          s = std::move(p.children.at(0));
          ++n;
          changed = true;
          break;
        }
      }
    }
  }
  return n;
}

}  // namespace separata
