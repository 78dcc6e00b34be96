#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "separata/cli.hpp"
#include "separata/formula.hpp"

using namespace separata;

#ifndef SEPARATA_DATA_DIR
#define SEPARATA_DATA_DIR "data"
#endif

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

std::string data(const std::string& f) { return std::string(SEPARATA_DATA_DIR) + "/" + f; }

}  // namespace

TEST_CASE("prove exit codes") {
  CHECK(run({"prove", "-s", "pasl+d", "-f", "emp & (a*b) -> a"}).code == kExitProved);
  Run r = run({"prove", "-s", "pasl", "-f", "emp & (a*b) -> a", "--saturate", "--model"});
  CHECK(r.code == kExitRefuted);
  CHECK(r.out.find("\"worlds\"") != std::string::npos);
  Run u = run({"prove", "-s", "bbi-nd", "-f", "(~(top -* ~emp) * ~(top -* ~emp)) -> ~(top -* ~emp)", "--timeout", "1"});
  CHECK(u.code == kExitUnknown);
  CHECK(u.out.find("Unknown (timeout)") != std::string::npos);
}

TEST_CASE("prove usage errors") {
  CHECK(run({"prove", "-f", "a &"}).code == kExitUsage);
  CHECK(run({"prove", "-s", "nosuch", "-f", "a"}).code == kExitUsage);
  CHECK(run({"prove"}).code == kExitUsage);
  CHECK(run({"prove", "-f", "a", "--bogus"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
}

TEST_CASE("prove prints proofs and writes models") {
  Run p = run({"prove", "-f", "a -> a", "--proof"});
  CHECK(p.code == 0);
  CHECK(p.out.find("impR") != std::string::npos);
  Run j = run({"prove", "-f", "a -> a", "--proof", "--proof-format", "json"});
  CHECK(j.out.find("\"root_label\"") != std::string::npos);
  std::string path = "cli_model_out.json";
  Run m = run({"prove", "-s", "pasl", "-f", "emp & (a*b) -> a", "--saturate", "--model-out", path});
  CHECK(m.code == kExitRefuted);
  Run c = run({"check-model", path, "-f", "emp & (a*b) -> a", "--frame", "pasl"});
  CHECK(c.code == kExitRefuted);
  CHECK(c.out.find("frame pasl: ok") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("check-model") {
  Run z = run({"check-model", data("z2.json"), "-f", "emp & (a*b) -> a"});
  CHECK(z.code == kExitRefuted);
  CHECK(z.out.find("witness: 0") != std::string::npos);
  CHECK(run({"check-model", data("z2.json"), "-f", "top"}).code == 0);
  CHECK(run({"check-model", data("z2.json"), "-f", "emp & (a*b) -> a", "--world", "1"}).code == 0);
  CHECK(run({"check-model", data("z2.json"), "-f", "a", "--world", "7"}).code == kExitUsage);
  Run d = run({"check-model", data("z2.json"), "--frame", "pasl+d"});
  CHECK(d.code == kExitRefuted);
  CHECK(d.out.find("disjoint") != std::string::npos);
  CHECK(run({"check-model", data("pasl.ax"), "-f", "top"}).code == kExitUsage);
  CHECK(run({"check-model", "no/such/file.json", "-f", "top"}).code == kExitUsage);
}

TEST_CASE("check-model on a one-cell heap") {
  std::ofstream("heap11.json") << R"({"worlds": ["{}", "{l0:1}"], "epsilon": "{}",
    "rel": [["{}", "{}", "{}"], ["{}", "{l0:1}", "{l0:1}"], ["{l0:1}", "{}", "{l0:1}"]], "valuation": {}})";
  Run r = run({"check-model", "heap11.json", "--frame", "pasl"});
  CHECK(r.code == 0);
  CHECK(r.out.find("frame pasl: ok") != std::string::npos);
  std::remove("heap11.json");
}

TEST_CASE("synth") {
  Run r = run({"synth", data("pasl.ax")});
  CHECK(r.code == 0);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 6);
  Run bad = run({"synth", data("bad_assoc.ax")});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("condition 3") != std::string::npos);
  CHECK(bad.err.find(":2:") != std::string::npos);
  Run s = run({"synth", "-s", "pasl", "--subst"});
  CHECK(s.out.find("unit-elim-1") != std::string::npos);
  CHECK(s.out.find("unit-elim-2") != std::string::npos);
  CHECK(run({"synth"}).code == kExitUsage);
}

TEST_CASE("gen") {
  Run g = run({"gen", "--n", "5", "--i", "3", "--count", "4", "--seed", "9"});
  CHECK(g.code == 0);
  std::istringstream in(g.out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    CHECK_NOTHROW(parse(line));
    ++n;
  }
  CHECK(n == 4);
  CHECK(run({"gen", "--n", "0"}).code == kExitUsage);
}

TEST_CASE("bench") {
  CHECK(run({"bench", ""}).code == kExitUsage);
  CHECK(run({"bench"}).code == kExitUsage);
  Run t = run({"bench", "table2", "--rows", "1,2,19", "--jobs", "3", "--timeout", "10"});
  CHECK(t.code == 0);
  std::istringstream in(t.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line.rfind("index", 0) != 0) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("1\tProved", 0) == 0);
  CHECK(rows[1].rfind("2\tProved", 0) == 0);
  CHECK(rows[2].rfind("19\tProved", 0) == 0);
  Run r = run({"bench", "random", "--n", "4", "--i", "4", "--count", "5", "--seed", "1", "--timeout", "5",
               "--format", "json", "-s", "bbi-nd"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"proved_rate\"") != std::string::npos);
}

TEST_CASE("embedded benchmark matches the data file and round-trips") {
  std::ifstream in(data("table2.txt"));
  REQUIRE(in);
  std::string line;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    REQUIRE(k < table2_suite().size());
    const auto& [row, text] = table2_suite()[k++];
    CHECK(line == std::to_string(row) + " " + text);
    Formula f = parse(text);
    CHECK(parse(render(f)) == f);
  }
  CHECK(k == 19);
}
