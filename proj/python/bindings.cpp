#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "separata/cli.hpp"
#include "separata/frame_axioms.hpp"
#include "separata/hilbert_gen.hpp"
#include "separata/prover.hpp"
#include "separata/semantics.hpp"

namespace py = pybind11;
using namespace separata;

namespace {

SystemConfig system_for(const std::string& system, const std::optional<std::string>& axioms,
                        const std::string& calculus, bool unit_shortcut) {
  SystemConfig cfg;
  if (axioms) {
    cfg.name = "custom";
    cfg.axioms = parse_axioms(*axioms);
    cfg.iu_shortcut = unit_shortcut;
  } else {
    cfg = builtin_system(system);
  }
  if (calculus != "subst" && calculus != "eq") throw py::value_error("calculus must be subst or eq");
  cfg.calculus = calculus == "eq" ? Calculus::Equality : Calculus::Substitution;
  compile(cfg);
  return cfg;
}

py::dict prove_py(const std::string& formula, const std::string& system, double timeout, bool saturate,
                  const std::string& calculus, const std::optional<std::string>& axioms, bool unit_shortcut,
                  bool want_proof) {
  Formula f = parse(formula);
  SystemConfig cfg = system_for(system, axioms, calculus, unit_shortcut);
  Budget b;
  b.timeout_seconds = timeout;
  ProverOptions o;
  o.saturate = saturate;
  Verdict v;
  {
    py::gil_scoped_release nogil;
    run_with_large_stack([&] { v = prove(f, cfg, b, o); });
  }
  py::dict d;
  d["verdict"] = verdict_name(v.kind);
  d["reason"] = reason_name(v.reason);
  d["seconds"] = v.seconds;
  d["note"] = v.note;
  d["proof_size"] = v.proof ? py::cast(v.proof->size()) : py::none();
  d["proof"] = v.proof && want_proof ? py::cast(proof_to_json(*v.proof, cfg)) : py::none();
  d["model"] = v.model ? py::cast(model_to_json(*v.model)) : py::none();
  return d;
}

py::dict check_model_py(const std::string& model_json, const std::string& formula,
                        const std::optional<std::string>& world) {
  KripkeModel m = model_from_json(model_json);
  Formula f = parse(formula);
  py::list falsified;
  if (world) {
    if (!eval(m, m.world(*world), f)) falsified.append(*world);
  } else {
    auto vals = eval_all(m, f);
    for (World w = 0; w < m.size(); ++w)
      if (!vals[w]) falsified.append(m.worlds[w]);
  }
  py::dict d;
  d["holds"] = falsified.empty();
  d["falsified_at"] = falsified;
  return d;
}

std::vector<std::string> check_frame_py(const std::string& model_json, const std::string& system) {
  KripkeModel m = model_from_json(model_json);
  std::vector<std::string> out;
  for (const auto& v : check_frame(m, builtin_system(system).axioms)) out.push_back(to_string(v));
  return out;
}

std::vector<std::string> gen_py(int n, int i, int count, std::uint64_t seed) {
  if (n < 1 || i < 0 || count < 0) throw py::value_error("n must be positive, i and count non-negative");
  std::vector<std::string> out;
  for (const auto& f : gen_suite(GenParams{n, i, seed, count})) out.push_back(render(f));
  return out;
}

std::vector<std::string> synth_py(const std::string& system, const std::optional<std::string>& axioms,
                                  bool subst, bool unit_shortcut) {
  SystemConfig cfg = system_for(system, axioms, "subst", unit_shortcut);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < cfg.rules.size(); ++i) {
    if (!subst) out.push_back(render_rule(cfg.rules[i]));
    else
      for (const auto& r : cfg.subst_rules[i]) out.push_back(render_rule(r));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Labelled sequent prover for propositional abstract separation logics";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<UnknownSystem>(m, "UnknownSystem", PyExc_ValueError);
  py::register_exception<AxiomParseError>(m, "AxiomParseError", PyExc_ValueError);
  py::register_exception<InvalidAxiom>(m, "InvalidAxiom", PyExc_ValueError);
  py::register_exception<ModelFormatError>(m, "ModelFormatError", PyExc_ValueError);

  m.def("normalize", [](const std::string& s) { return render(parse(s)); }, py::arg("formula"),
        "Parse a formula and render it back in canonical form.");
  m.def("systems", [] { return std::vector<std::string>{"bbi-nd", "pasl", "pasl+d", "pasl-nocancel"}; });
  m.def("prove", &prove_py, py::arg("formula"), py::arg("system") = "pasl+d", py::arg("timeout") = 60.0,
        py::arg("saturate") = false, py::arg("calculus") = "subst", py::arg("axioms") = py::none(),
        py::arg("unit_shortcut") = false, py::arg("proof") = false,
        "Run the prover. Returns a dict with verdict, reason, seconds, note, proof_size, proof and model.");
  m.def("check_model", &check_model_py, py::arg("model"), py::arg("formula"), py::arg("world") = py::none(),
        "Evaluate a formula on a model given as JSON text.");
  m.def("check_frame", &check_frame_py, py::arg("model"), py::arg("system"),
        "List the frame axiom violations of a model against a builtin system.");
  m.def("gen", &gen_py, py::arg("n") = 10, py::arg("i") = 0, py::arg("count") = 100, py::arg("seed") = 0);
  m.def("synth", &synth_py, py::arg("system") = "pasl", py::arg("axioms") = py::none(),
        py::arg("subst") = false, py::arg("unit_shortcut") = false);
  m.def("table2", [] { return table2_suite(); });
}
