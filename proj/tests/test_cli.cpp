#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gnopt/cli.hpp"

using namespace gnopt::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gnopt_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting") {
  CHECK(format_number(0.5773502691896258) == "0.57735026919");
  CHECK(format_number(4.0) == "4");
  CHECK(format_number(NAN) == "NA");
  CHECK(round_number(1.0 / 3.0) == 0.333333333333);
  CHECK(format_exact(0.1) == "0.1");
  CHECK(parse_number_list("1, 10,100 ,") == std::vector<double>{1, 10, 100});
}

TEST_CASE("config text") {
  const auto cfg = parse_config_text("# comment\ncommand = sweep\n\nN=32\n# config: alphas=1,2\n");
  REQUIRE(cfg.size() == 3);
  CHECK(cfg[0] == std::pair<std::string, std::string>{"command", "sweep"});
  CHECK(cfg[2].second == "1,2");
  CHECK_THROWS_AS(parse_config_text("no equals sign"), IoError);
  const auto js = parse_config_text(R"({"config": {"command": "constants", "n": "3"}})");
  CHECK(js.size() == 2);
}

TEST_CASE("constants") {
  auto r = call({"constants", "--n", "3", "--p", "2", "--q", "3", "--format", "json"});
  REQUIRE(r.code == kSuccess);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["theta"] == 0.5);
  CHECK(j["r_dpd"] == 4.0);
  CHECK(j["A"].get<double>() == doctest::Approx(0.136913678615).epsilon(1e-12));
  CHECK(j["config"]["command"] == "constants");

  r = call({"constants", "--n", "3", "--p", "2", "--q", "3", "--r", "6"});
  CHECK(r.code == kSuccess);
  CHECK(r.out.find("theta   = 1\n") != std::string::npos);

  r = call({"constants", "--n", "3", "--p", "0.5", "--q", "1"});
  CHECK(r.code == kDomainError);
  CHECK(r.err.find("p must exceed 1") != std::string::npos);

  CHECK(call({"constants", "--n", "3"}).code == kDomainError);
  CHECK(call({"frobnicate"}).code == kDomainError);
}

TEST_CASE("extremal CSV") {
  auto r = call({"extremal", "--n", "3", "--p", "2", "--q", "4", "--rho", "0,1", "--out", "-"});
  REQUIRE(r.code == kSuccess);
  CHECK(r.out.find("rho,w,dw\n0,1,0\n1,0.57735026919,") != std::string::npos);
  CHECK(r.out.rfind("# config: command=extremal\n", 0) == 0);

  r = call({"extremal", "--n", "3", "--p", "2", "--q", "4", "--rho", "", "--out", "-"});
  CHECK(r.out.substr(r.out.size() - 9) == "rho,w,dw\n");
}

TEST_CASE("verify exit codes") {
  auto r = call({"verify", "--n", "3", "--p", "2", "--q", "3", "--perturbations", "3"});
  REQUIRE(r.code == kSuccess);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["passed"] == true);
  CHECK(j["gap"].get<double>() <= 1e-6);
  CHECK(call({"verify", "--n", "3", "--p", "2", "--q", "5"}).code == kDomainError);
  // dropping the tail beyond R = 10 biases Q(w) well past the gap tolerance
  r = call({"verify", "--n", "3", "--p", "2", "--q", "3", "--tail", "drop", "--radius", "10",
            "--perturbations", "1"});
  CHECK(r.code == kExtremalityViolated);
  CHECK(nlohmann::json::parse(r.out)["passed"] == false);
}

TEST_CASE("blowup rows") {
  const auto dir = scratch_dir("blowup");
  const auto csv = dir / "b.csv";
  auto r = call({"blowup", "--n", "5", "--p-min", "2.2", "--p-max", "2.2", "--steps", "1", "--q", "2.5",
                 "--out", csv.string()});
  REQUIRE(r.code == kSuccess);
  const std::string text = slurp(csv);
  CHECK(text.find("p,q,r,theta,I1,I2,I3,I4,I5,bracket,in_regime,reason\n2.2,2.5,2.75,") !=
        std::string::npos);
  CHECK(text.find(",true,\n") != std::string::npos);

  r = call({"blowup", "--n", "10", "--p-min", "1.5", "--p-max", "1.9", "--steps", "4", "--out", csv.string()});
  CHECK(r.code == kSuccess);
  CHECK(slurp(csv).find(",true,") == std::string::npos);
}

TEST_CASE("config file, flag precedence and the output directory") {
  const auto dir = scratch_dir("config");
  {
    std::ofstream cfg(dir / "run.conf");
    cfg << "command = extremal\nn = 3\np = 2\nq = 4\nrho = 1\nout = x.csv\n";
  }
  ::setenv("GNOPT_OUTPUT_DIR", dir.string().c_str(), 1);
  auto r = call({"--config", (dir / "run.conf").string(), "extremal", "--rho", "2"});
  ::unsetenv("GNOPT_OUTPUT_DIR");
  REQUIRE(r.code == kSuccess);
  const std::string text = slurp(dir / "x.csv");
  CHECK(text.find("# config: rho=2\n") != std::string::npos);
  CHECK(text.find("\n2,0.333333333333,") != std::string::npos);

  // the artifact replays itself
  ::setenv("GNOPT_OUTPUT_DIR", dir.string().c_str(), 1);
  fs::rename(dir / "x.csv", dir / "first.csv");
  r = call({"--config", (dir / "first.csv").string()});
  ::unsetenv("GNOPT_OUTPUT_DIR");
  REQUIRE(r.code == kSuccess);
  CHECK(slurp(dir / "x.csv") == slurp(dir / "first.csv"));

  CHECK(call({"--config", (dir / "missing.conf").string(), "constants"}).code == kIoError);
  CHECK(call({"--config", (dir / "run.conf").string(), "constants"}).code == kDomainError);
}

TEST_CASE("unwritable output is an I/O error") {
  auto r = call({"extremal", "--n", "3", "--p", "2", "--q", "4", "--out", "/nonexistent/dir/x.csv"});
  CHECK(r.code == kIoError);
}

TEST_CASE("simulate writes JSON and CSV") {
  const auto dir = scratch_dir("simulate");
  auto r = call({"simulate", "--N", "16", "--alpha", "5", "--out-json", (dir / "s.json").string(),
                 "--out-csv", (dir / "s.csv").string(), "--strict"});
  REQUIRE(r.code == kSuccess);
  const auto j = nlohmann::json::parse(slurp(dir / "s.json"));
  const auto& run0 = j["runs"][0];
  for (const char* key : {"alpha", "nu_alpha", "A_alpha", "B_alpha", "mu_alpha", "grad_energy",
                          "penalty", "q_mass", "max_index", "concentration", "iterations", "converged"})
    CHECK(run0.contains(key));
  CHECK(slurp(dir / "s.csv").find("alpha,nu_alpha,grad_energy,penalty,q_mass,conc_r02\n5,") !=
        std::string::npos);

  r = call({"simulate", "--N", "16", "--alpha", "50", "--max-iterations", "2", "--multistart", "false", "--strict",
            "--out-json", (dir / "t.json").string(), "--out-csv", (dir / "t.csv").string()});
  CHECK(r.code == kNotConverged);
  CHECK(fs::exists(dir / "t.json"));
}

}
