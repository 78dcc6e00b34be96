#include "separata/cli.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "separata/hilbert_gen.hpp"
#include "separata/log.hpp"
#include "separata/prover.hpp"

namespace separata {

const std::vector<std::pair<int, std::string>>& table2_suite() {
  static const std::vector<std::pair<int, std::string>> rows = {
      {1, "(a -* b) & (top * (emp & a)) -> b"},
      {2, "(emp -* ~(~a * emp)) -> a"},
      {3, "~((a -* ~(a * b)) & ((~a -* ~b) & b))"},
      {4, "emp -> ((a -* (b -* c)) -* ((a * b) -* c))"},
      {5, "emp -> ((a * (b * c)) -* ((a * b) * c))"},
      {6, "emp -> ((a * ((b -* e) * c)) -* ((a * (b -* e)) * c))"},
      {7, "~(((a -* ~(~(d -* ~(a * (c * b))) * a)) & c) * (d & (a * b)))"},
      {8, "~((c * (d * e)) & ((a -* ~(~(b -* ~(d * (e * c))) * a)) * (b & (a * top))))"},
      {9, "~(((a -* ~(~(d -* ~((c * e) * (b * a))) * a)) & c) * (d & (a * (b * e))))"},
      {10, "(a * (b * (c * d))) -> (d * (c * (b * a)))"},
      {11, "(a * (b * (c * d))) -> (d * (b * (c * a)))"},
      {12, "(a * (b * (c * (d * e)))) -> (e * (d * (a * (b * c))))"},
      {13, "(a * (b * (c * (d * e)))) -> (e * (b * (a * (c * d))))"},
      {14, "emp -> ((a * ((b -* e) * (c * d))) -* ((a * d) * (c * (b -* e))))"},
      {15, "~(emp & (a & (b * ~(c -* (emp -> a)))))"},
      {16, "(((emp -> a) -> ((a * a) -* ((emp -> a) * (a * a)))) -> (b -* (((emp -> a) -> ((a * a) -* (((emp -> a) "
           "* a) * a))) * b)))"},
      {17, "((emp -> (a -* (((a * (a -* b)) * ~b) -* (a * (a * ((a -* b) * ~b)))))) -> ((((emp * a) * (a * ((a -* b) "
           "* ~b))) -> (((a * a) * (a -* b)) * ~b)) * emp))"},
      {18, "(~(top -* ~emp) * ~(top -* ~emp)) -> ~(top -* ~emp)"},
      {19, "emp & (a * b) -> a"},
  };
  return rows;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-blank, non-comment lines of an axiom file with their 1-based numbers.
std::vector<std::size_t> axiom_lines(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(n);
  }
  return out;
}

// Parses and validates an axiom file; violations are reported with their
// line numbers.
std::vector<FrameAxiom> load_axioms(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<FrameAxiom> axioms;
  try {
    axioms = parse_axioms(text);
  } catch (const AxiomParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  const auto lines = axiom_lines(text);
  std::string report;
  for (std::size_t i = 0; i < axioms.size(); ++i)
    for (const auto& v : validate_axiom(axioms[i]))
      report += path + ":" + std::to_string(i < lines.size() ? lines[i] : 0) + ": " + axioms[i].name +
                ": condition " + std::to_string(v.condition) + ": " + v.message + "\n";
  if (!report.empty()) {
    report.pop_back();
    throw UsageError(report);
  }
  return axioms;
}

struct SystemArgs {
  std::string system = "pasl+d";
  std::string axioms_file;
  std::string calculus = "subst";
  bool unit_shortcut = false;
};

void add_system_options(CLI::App* app, SystemArgs& a) {
  app->add_option("-s,--system", a.system,
                  "bbi-nd, pasl or pasl-nocancel, with optional +iu +d +s +cs +ext +p +c")
      ->capture_default_str();
  app->add_option("--axioms", a.axioms_file, "Frame axiom file used instead of --system");
  app->add_option("--calculus", a.calculus, "Label equality handling")
      ->check(CLI::IsMember({"subst", "eq"}))
      ->capture_default_str();
  app->add_flag("--unit-shortcut", a.unit_shortcut, "With --axioms, add the indivisible-unit shortcut rule");
}

SystemConfig make_system(const SystemArgs& a) {
  SystemConfig cfg;
  if (!a.axioms_file.empty()) {
    cfg.name = a.axioms_file;
    cfg.axioms = load_axioms(a.axioms_file);
    cfg.iu_shortcut = a.unit_shortcut;
  } else {
    try {
      cfg = builtin_system(a.system);
    } catch (const UnknownSystem& e) {
      throw UsageError(e.what());
    }
  }
  cfg.calculus = a.calculus == "eq" ? Calculus::Equality : Calculus::Substitution;
  compile(cfg);
  return cfg;
}

Formula parse_or_usage(const std::string& text) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    std::string exp;
    for (const auto& x : e.expected()) exp += (exp.empty() ? "" : ", ") + x;
    throw UsageError(std::string("parse error: ") + e.what() + (exp.empty() ? "" : " (expected " + exp + ")"));
  }
}

Formula formula_arg(const std::string& inline_text, const std::string& file) {
  if (!inline_text.empty() && !file.empty()) throw UsageError("give either --formula or --file, not both");
  if (!file.empty()) {
    std::string t = read_file(file);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    return parse_or_usage(t);
  }
  if (inline_text.empty()) throw UsageError("a formula is required (--formula or --file)");
  return parse_or_usage(inline_text);
}

std::string stats_line(const SearchStats& s) {
  std::ostringstream os;
  os << "steps=" << s.steps << " branches=" << s.branches << " backjumps=" << s.backjumps
     << " substitutions=" << s.substitutions << " saturation_rounds=" << s.saturation_rounds
     << " labels=" << s.labels << " max_depth=" << s.max_depth;
  return os.str();
}

std::string verdict_text(const Verdict& v) {
  std::string s = verdict_name(v.kind);
  if (v.kind == VerdictKind::Unknown) s += std::string(" (") + reason_name(v.reason) + ")";
  return s;
}

Verdict run_prove(const Formula& f, const SystemConfig& cfg, const Budget& b, const ProverOptions& o) {
  Verdict v;
  run_with_large_stack([&] { v = prove(f, cfg, b, o); });
  return v;
}

// prove ----------------------------------------------------------------------

struct ProveArgs {
  SystemArgs sys;
  std::string formula, file;
  double timeout = 60;
  std::uint64_t max_labels = 0, max_steps = 0;
  bool saturate = false, proof = false, model = false;
  std::string proof_format = "text";
  std::string model_out;
  bool no_backjump = false, no_heuristics = false, no_memo = false;
};

int cmd_prove(const ProveArgs& a, std::ostream& out) {
  SystemConfig cfg = make_system(a.sys);
  Formula f = formula_arg(a.formula, a.file);
  Budget b{a.timeout, std::nullopt, std::nullopt};
  if (a.max_labels) b.max_labels = a.max_labels;
  if (a.max_steps) b.max_steps = a.max_steps;
  ProverOptions o;
  o.saturate = a.saturate;
  o.backjumping = !a.no_backjump;
  o.heuristics = !a.no_heuristics;
  o.memo = !a.no_memo;
  SEPARATA_LOG(1, "prove " << render(f) << " in " << cfg.name);
  Verdict v = run_prove(f, cfg, b, o);

  out << "formula: " << render(f) << "\n";
  out << "system: " << cfg.name << "\n";
  out << "verdict: " << verdict_text(v) << "\n";
  out << "time: " << std::fixed << std::setprecision(6) << v.seconds << std::defaultfloat << " s\n";
  out << "stats: " << stats_line(v.stats) << "\n";
  if (!v.note.empty()) out << "note: " << v.note << "\n";
  if (v.kind == VerdictKind::Proved && v.proof) {
    out << "proof-size: " << v.proof->size() << "\n";
    if (a.proof) {
      if (a.proof_format == "json") out << proof_to_json(*v.proof, cfg, 2) << "\n";
      else out << proof_to_text(*v.proof, cfg);
    }
  }
  if (v.kind == VerdictKind::Refuted && v.model) {
    out << "world: " << v.model->worlds[v.world] << "\n";
    std::string js = model_to_json(*v.model);
    if (a.model) out << js << "\n";
    if (!a.model_out.empty()) {
      std::ofstream mf(a.model_out);
      if (!mf) throw UsageError("cannot write " + a.model_out);
      mf << js << "\n";
    }
  }
  switch (v.kind) {
    case VerdictKind::Proved: return kExitProved;
    case VerdictKind::Refuted: return kExitRefuted;
    default: return kExitUnknown;
  }
}

// check-model -----------------------------------------------------------------

struct CheckArgs {
  std::string model_file, formula, file, world, frame, axioms_file;
};

int cmd_check_model(const CheckArgs& a, std::ostream& out) {
  KripkeModel m;
  try {
    m = model_from_json(read_file(a.model_file));
  } catch (const ModelFormatError& e) {
    throw UsageError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad model: ") + e.what());
  }
  bool have_formula = !a.formula.empty() || !a.file.empty();
  bool have_frame = !a.frame.empty() || !a.axioms_file.empty();
  if (!have_formula && !have_frame) throw UsageError("nothing to check: give a formula and/or --frame");

  bool frame_ok = true;
  if (have_frame) {
    std::vector<FrameAxiom> axioms;
    std::string label;
    if (!a.axioms_file.empty()) {
      axioms = load_axioms(a.axioms_file);
      label = a.axioms_file;
    } else {
      try {
        axioms = builtin_system(a.frame).axioms;
      } catch (const UnknownSystem& e) {
        throw UsageError(e.what());
      }
      label = a.frame;
    }
    auto viol = check_frame(m, axioms);
    frame_ok = viol.empty();
    out << "frame " << label << ": " << (frame_ok ? "ok" : std::to_string(viol.size()) + " violation(s)") << "\n";
    for (const auto& v : viol) out << "  " << to_string(v) << "\n";
  }
  if (!have_formula) return frame_ok ? 0 : kExitRefuted;

  Formula f = formula_arg(a.formula, a.file);
  std::vector<World> worlds;
  if (!a.world.empty()) {
    auto it = std::find(m.worlds.begin(), m.worlds.end(), a.world);
    if (it == m.worlds.end()) throw UsageError("no world named " + a.world);
    worlds.push_back(static_cast<World>(it - m.worlds.begin()));
  } else {
    for (World w = 0; w < m.worlds.size(); ++w) worlds.push_back(w);
  }
  auto truth = eval_all(m, f);
  std::vector<std::string> false_at;
  for (World w : worlds)
    if (!truth[w]) false_at.push_back(m.worlds[w]);
  if (false_at.empty()) {
    out << "formula holds at " << (a.world.empty() ? "every world" : "world " + a.world) << "\n";
    return 0;
  }
  out << "falsified at:";
  for (const auto& w : false_at) out << " " << w;
  out << "\nwitness: " << false_at.front() << "\n";
  return kExitRefuted;
}

// bench -------------------------------------------------------------------------

struct BenchArgs {
  SystemArgs sys;
  std::string suite;
  double timeout = 60;
  int jobs = 1;
  GenParams gen{10, 20, 0, 100};
  std::string table_file;
  std::vector<int> only;
  std::string format = "tsv";
};

struct BenchRow {
  int index = 0;
  std::string formula;
  Verdict verdict;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  SystemConfig cfg = make_system(a.sys);
  std::vector<std::pair<int, Formula>> items;
  if (a.suite == "table2") {
    std::vector<std::pair<int, std::string>> src;
    if (!a.table_file.empty()) {
      std::istringstream in(read_file(a.table_file));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int row;
        if (!(ls >> row)) throw UsageError("bad table line: " + line);
        std::string rest;
        std::getline(ls, rest);
        src.emplace_back(row, rest);
      }
    } else {
      src = table2_suite();
    }
    for (const auto& [row, text] : src)
      if (a.only.empty() || std::find(a.only.begin(), a.only.end(), row) != a.only.end())
        items.emplace_back(row, parse_or_usage(text));
  } else {
    auto suite = gen_suite(a.gen);
    for (std::size_t k = 0; k < suite.size(); ++k) items.emplace_back(static_cast<int>(k), suite[k]);
  }

  std::vector<std::optional<BenchRow>> done(items.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= items.size()) return;
      BenchRow r{items[k].first, render(items[k].second), {}};
      ProverOptions o;
      o.verify = true;
      r.verdict = run_prove(items[k].second, cfg, Budget{a.timeout, std::nullopt, std::nullopt}, o);
      SEPARATA_LOG(1, "bench " << r.index << " " << verdict_text(r.verdict));
      std::lock_guard<std::mutex> lk(mu);
      done[k] = std::move(r);
      cv.notify_all();
    }
  };
  int jobs = std::max(1, a.jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);

  nlohmann::json rows = nlohmann::json::array();
  if (a.format == "tsv") out << "index\tverdict\treason\tseconds\tproof_size\tformula\n";
  std::size_t proved = 0;
  double proved_time = 0, total_time = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    BenchRow r;
    {
      std::unique_lock<std::mutex> lk(mu);
      cv.wait(lk, [&] { return done[k].has_value(); });
      r = std::move(*done[k]);
      done[k].reset();
    }
    const Verdict& v = r.verdict;
    std::size_t size = v.proof ? v.proof->size() : 0;
    total_time += v.seconds;
    if (v.kind == VerdictKind::Proved) {
      ++proved;
      proved_time += v.seconds;
    }
    if (a.format == "tsv") {
      out << r.index << '\t' << verdict_name(v.kind) << '\t' << reason_name(v.reason) << '\t' << std::fixed
          << std::setprecision(4) << v.seconds << std::defaultfloat << '\t' << size << '\t' << r.formula << '\n'
          << std::flush;
    } else {
      rows.push_back({{"index", r.index},
                      {"verdict", verdict_name(v.kind)},
                      {"reason", reason_name(v.reason)},
                      {"seconds", v.seconds},
                      {"proof_size", size},
                      {"formula", r.formula}});
    }
  }
  for (auto& t : pool) t.join();

  const double rate = items.empty() ? 0.0 : 100.0 * static_cast<double>(proved) / static_cast<double>(items.size());
  const double avg = proved ? proved_time / static_cast<double>(proved) : 0.0;
  if (a.format == "tsv") {
    out << "# proved " << proved << "/" << items.size() << " (" << std::fixed << std::setprecision(1) << rate
        << "%) avg_proved_seconds " << std::setprecision(4) << avg << " total_seconds " << total_time
        << std::defaultfloat << "\n";
  } else {
    nlohmann::json j{{"suite", a.suite},
                     {"system", cfg.name},
                     {"timeout", a.timeout},
                     {"rows", rows},
                     {"proved", proved},
                     {"count", items.size()},
                     {"proved_rate", rate},
                     {"avg_proved_seconds", avg}};
    out << j.dump(2) << "\n";
  }
  return 0;
}

// gen / synth -------------------------------------------------------------------

int cmd_gen(const GenParams& p, std::ostream& out) {
  if (p.n < 1 || p.i < 0 || p.count < 0) throw UsageError("need n >= 1, i >= 0, count >= 0");
  for (const auto& f : gen_suite(p)) out << render(f) << "\n";
  return 0;
}

struct SynthArgs {
  std::string file, system;
  bool subst = false, unit_shortcut = false;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.file.empty() == a.system.empty()) throw UsageError("give exactly one of an axiom file or --system");
  SystemConfig cfg;
  if (!a.file.empty()) {
    cfg.name = a.file;
    cfg.axioms = load_axioms(a.file);
    cfg.iu_shortcut = a.unit_shortcut;
    compile(cfg);
  } else {
    try {
      cfg = builtin_system(a.system);
    } catch (const UnknownSystem& e) {
      throw UsageError(e.what());
    }
  }
  for (std::size_t i = 0; i < cfg.rules.size(); ++i) {
    out << render_rule(cfg.rules[i]) << "\n";
    if (a.subst)
      for (const auto& s : cfg.subst_rules[i]) out << "  " << render_rule(s) << "\n";
  }
  if (cfg.em) out << "# excluded middle on labels enabled\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Labelled sequent prover for abstract separation logic", "separata"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  ProveArgs pa;
  auto* prove_cmd = app.add_subcommand("prove", "Search for a proof of a formula");
  add_system_options(prove_cmd, pa.sys);
  prove_cmd->add_option("-f,--formula", pa.formula, "Formula text");
  prove_cmd->add_option("--file", pa.file, "Read the formula from a file");
  prove_cmd->add_option("--timeout", pa.timeout, "Wall-clock budget in seconds")->capture_default_str();
  prove_cmd->add_option("--max-labels", pa.max_labels, "Fresh label budget (0 = none)");
  prove_cmd->add_option("--max-steps", pa.max_steps, "Rule application budget (0 = none)");
  prove_cmd->add_flag("--saturate", pa.saturate, "On failure, look for a validated counter-model");
  prove_cmd->add_flag("--proof", pa.proof, "Print the derivation");
  prove_cmd->add_option("--proof-format", pa.proof_format)->check(CLI::IsMember({"text", "json"}));
  prove_cmd->add_flag("--model", pa.model, "Print the counter-model as JSON");
  prove_cmd->add_option("--model-out", pa.model_out, "Write the counter-model to a file");
  prove_cmd->add_flag("--no-backjump", pa.no_backjump);
  prove_cmd->add_flag("--no-heuristics", pa.no_heuristics);
  prove_cmd->add_flag("--no-memo", pa.no_memo);

  CheckArgs ca;
  auto* check_cmd = app.add_subcommand("check-model", "Evaluate a formula and frame axioms on a finite model");
  check_cmd->add_option("-m,--model,model", ca.model_file, "Model JSON file")->required();
  check_cmd->add_option("-f,--formula", ca.formula);
  check_cmd->add_option("--file", ca.file);
  check_cmd->add_option("--world", ca.world, "Only check this world");
  check_cmd->add_option("--frame", ca.frame, "Report frame axioms of this system");
  check_cmd->add_option("--axioms", ca.axioms_file, "Report frame axioms from a file");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("suite", ba.suite)->required()->check(CLI::IsMember({"table2", "random"}));
  add_system_options(bench_cmd, ba.sys);
  bench_cmd->add_option("--timeout", ba.timeout)->capture_default_str();
  bench_cmd->add_option("-j,--jobs", ba.jobs)->capture_default_str();
  bench_cmd->add_option("--n", ba.gen.n)->capture_default_str();
  bench_cmd->add_option("--i", ba.gen.i)->capture_default_str();
  bench_cmd->add_option("--count", ba.gen.count)->capture_default_str();
  bench_cmd->add_option("--seed", ba.gen.seed)->capture_default_str();
  bench_cmd->add_option("--table", ba.table_file, "Read table2 rows from a file instead");
  bench_cmd->add_option("--rows", ba.only, "Only these table2 rows")->delimiter(',');
  bench_cmd->add_option("--format", ba.format)->check(CLI::IsMember({"tsv", "json"}));

  GenParams gp{10, 20, 0, 100};
  auto* gen_cmd = app.add_subcommand("gen", "Print random theorems, one per line");
  gen_cmd->add_option("--n", gp.n, "Binary connectives per instantiation")->capture_default_str();
  gen_cmd->add_option("--i", gp.i, "Mutation iterations")->capture_default_str();
  gen_cmd->add_option("--count", gp.count)->capture_default_str();
  gen_cmd->add_option("--seed", gp.seed)->capture_default_str();

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Print the structural rules of a set of frame axioms");
  synth_cmd->add_option("axioms", sa.file, "Axiom file");
  synth_cmd->add_option("-s,--system", sa.system, "Builtin system instead of a file");
  synth_cmd->add_flag("--subst", sa.subst, "Also print the substitution forms");
  synth_cmd->add_flag("--unit-shortcut", sa.unit_shortcut);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // subcommand-level help requests arrive here too
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (prove_cmd->parsed()) return cmd_prove(pa, out);
    if (check_cmd->parsed()) return cmd_check_model(ca, out);
    if (bench_cmd->parsed()) return cmd_bench(ba, out);
    if (gen_cmd->parsed()) return cmd_gen(gp, out);
    if (synth_cmd->parsed()) return cmd_synth(sa, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidAxiom& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace separata
