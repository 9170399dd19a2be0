#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/dispatch.hpp"
#include "dspec/timoshenko.hpp"
#include "support.hpp"

using namespace dspec;
using namespace dspec::test;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dspec_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = temp_path(name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("classify reports the periodic verdicts") {
  const Run r = run({"classify", fixture("periodic")});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["regular"] == true);
  CHECK(j["complete"] == "certified_complete");
  CHECK(j["normal"] == true);
}

TEST_CASE("spectrum csv of the dirichlet fixture") {
  const Run r = run({"spectrum", fixture("dirichlet"), "--region", "-0.5,6.5,-1,1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("re,im,multiplicity\n", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(rows[k][0] - kPi * k) < 1e-9);
    CHECK(std::abs(rows[k][1]) < 1e-9);
    CHECK(rows[k][2] == 1.0);
  }
}

TEST_CASE("spectrum json with blocks") {
  const Run r = run({"spectrum", fixture("periodic"), "--region", "-7,7,-1,1", "--group-eps", "0.5", "--angles", "0",
                    "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["total_count"] == 6);
  CHECK(j.contains("blocks"));
}

TEST_CASE("timoshenko conditions") {
  const Run r = run({"timoshenko", fixture("ln3_beam"), "--conditions"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["conditions"]["complete_minimal"] == true);
  CHECK(j["conditions"]["riesz_with_parentheses"] == true);
  CHECK(j["b1"] == 2.0);
}

TEST_CASE("emitted reduction classifies like the in-memory reduction") {
  const auto path = temp_path("ln3_dirac.json");
  REQUIRE(run({"timoshenko", fixture("ln3_beam"), "--emit-dirac", path}).code == 0);
  const Run r = run({"classify", path});
  REQUIRE(r.code == 0);
  const json file = json::parse(r.out);
  const json mem = classification_report(reduce_to_dirac(load_beam(fixture("ln3_beam"))).dirac);
  for (const char* key : {"regular", "complete", "normal", "dissipativity"}) CHECK(file[key] == mem[key]);
  CHECK(file["riesz"]["kind"] == mem["riesz"]["kind"]);
  std::remove(path.c_str());
}

TEST_CASE("output is deterministic") {
  const std::vector<std::vector<std::string>> cmds = {
      {"classify", fixture("levin_half_pi")},
      {"spectrum", fixture("mixed_weights"), "--region", "-5,5,-2,2", "--format", "csv"},
      {"svalues", fixture("scalar_periodic"), "--lambda", "0,1", "--N", "256", "--seed", "3"},
      {"detscan", fixture("dirichlet"), "--region", "-1,1,-1,1", "--samples", "5"},
  };
  for (const auto& c : cmds) {
    const Run a = run(c), b = run(c);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("out flag writes a file") {
  const auto path = temp_path("fan.json");
  const Run r = run({"fan", fixture("mixed_weights"), "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(json::parse(in).contains("sectors"));
  std::remove(path.c_str());
}

TEST_CASE("other subcommands run") {
  CHECK(run({"asymptotics", fixture("dirichlet"), "--scan", "10,20"}).code == 0);
  CHECK(run({"rootfns", fixture("dirichlet"), "--lambda", "3.141592653589793,0", "--grid", "64"}).code == 0);
  CHECK(run({"green", fixture("dirichlet"), "--lambda", "0.5,0.5", "--at", "0.3,0.6"}).code == 0);
  CHECK(run({"trace-diff", fixture("scalar_periodic"), fixture("volterra"), "--lambda", "0,1"}).code == 0);
  CHECK(run({"gauge", fixture("jordan")}).code == 0);
  CHECK(run({"timoshenko", fixture("ln3_beam"), "--spectrum", "6,9,0,1"}).code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"spectrum", fixture("dirichlet"), "--format", "xml"}).code == 1);
  CHECK(run({"classify", temp_path("missing.json")}).code == 2);

  const auto bad = write_temp("bad.json", "{\"n\": 2, \"B\": [1\n");
  const Run parse = run({"classify", bad});
  CHECK(parse.code == 2);
  CHECK(parse.err.find(":2:") != std::string::npos);

  const auto singular = write_temp("singular.json", R"({"n":1,"B":[1],"C":[[0]],"D":[[0]],"Q":{"kind":"zero"}})");
  const Run inv = run({"classify", singular});
  CHECK(inv.code == 2);
  CHECK(inv.err.find("rank") != std::string::npos);

  const auto field = write_temp("field.json", R"({"n":1,"B":[1],"C":[["x"]],"D":[[0]],"Q":{"kind":"zero"}})");
  const Run fe = run({"classify", field});
  CHECK(fe.code == 2);
  CHECK(fe.err.find("$.C[0][0]") != std::string::npos);

  CHECK(run({"green", fixture("dirichlet"), "--lambda", "3.141592653589793,0", "--at", "0.5,0.2"}).code == 3);
  std::remove(bad.c_str());
  std::remove(singular.c_str());
  std::remove(field.c_str());
}
