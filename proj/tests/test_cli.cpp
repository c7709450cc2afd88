#include "doctest.h"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("qlab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json report(const fs::path& p) { return json::parse(slurp(p)); }

int run(std::vector<std::string> args) {
  if (!args.empty()) args.push_back("--quiet");
  return qlab::cli::run_command(args);
}

}  // namespace

TEST_CASE("constants command") {
  auto dir = scratch("constants");
  CHECK(run({"constants", "--n", "5", "--k", "1", "--out", dir.string()}) == 0);
  auto j = report(dir / "constants.json");
  CHECK(j["schema_version"] == 1);
  CHECK(j["constants"]["c"].get<double>() == doctest::Approx(15.0));
  CHECK(j["constants"]["b"].get<double>() == doctest::Approx(0.0126651).epsilon(1e-5));
  CHECK(j["constants"]["two_star"].get<double>() == doctest::Approx(3.3333).epsilon(1e-4));
  CHECK(j["constants"]["Y"].get<double>() == doctest::Approx(14.81).epsilon(1e-3));
  CHECK(j["exit_code"] == 0);
  CHECK(run({"constants", "--n", "7", "--k", "2", "--out", dir.string()}) == 0);
}

TEST_CASE("invalid configurations exit with 2") {
  auto dir = scratch("invalid");
  CHECK(run({"constants", "--n", "4", "--k", "2", "--out", dir.string()}) == 2);
  CHECK(run({"constants", "--bogus"}) == 2);
  CHECK(run({}) == 2);
  CHECK(run({"residual", "--mu-grid", "a:b:c", "--out", dir.string()}) == 2);
  CHECK(run({"residual", "--mu-grid", "0.5", "--out", dir.string()}) == 2);
  CHECK(run({"residual", "--model", "torus", "--out", dir.string()}) == 2);
  CHECK(run({"energy-scan", "--d", "1..30", "--out", dir.string()}) == 2);
  CHECK(run({"homology", "--model", "circle", "--d", "3", "--out", dir.string()}) == 2);
  CHECK(run({"select", "--field", (dir / "missing.csv").string(), "--out", dir.string()}) == 2);
}

TEST_CASE("output directory from the environment") {
  auto dir = scratch("env");
  setenv("QLAB_OUT_DIR", dir.string().c_str(), 1);
  CHECK(run({"homology", "--model", "sphere2", "--d", "1"}) == 0);
  unsetenv("QLAB_OUT_DIR");
  auto j = report(dir / "homology.json");
  CHECK(j["betti"] == json::array({1, 0, 1}));
  CHECK(fs::exists(dir / "homology_ambient.txt"));
  CHECK(slurp(dir / "homology.csv").rfind("dim,chains,relative_chains,betti,relative_betti\n", 0) == 0);
}

TEST_CASE("homology of the second barycenter space of the circle") {
  auto dir = scratch("hom2");
  CHECK(run({"homology", "--model", "circle", "--d", "2", "--resolution", "3", "--out", dir.string()}) == 0);
  auto j = report(dir / "homology.json");
  CHECK(j["relative_betti"][3] == 1);
  CHECK(j["boundary_squares_to_zero"] == true);
}

TEST_CASE("residual table is reproducible") {
  auto a = scratch("res_a"), b = scratch("res_b");
  std::vector<std::string> args{"residual", "--mu-grid", "1e-3:1e-1:3", "--points", "20"};
  auto aa = args, bb = args;
  aa.insert(aa.end(), {"--out", a.string()});
  bb.insert(bb.end(), {"--out", b.string()});
  CHECK(run(aa) == 0);
  CHECK(run(bb) == 0);
  CHECK(slurp(a / "residual.csv") == slurp(b / "residual.csv"));
  auto ja = report(a / "residual.json"), jb = report(b / "residual.json");
  ja.erase("config");
  jb.erase("config");
  CHECK(ja == jb);
  CHECK(ja["bounded"] == true);
  CHECK(slurp(a / "residual.csv").find("error_estimate") != std::string::npos);
}

TEST_CASE("interactions from a configuration file") {
  auto dir = scratch("inter");
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"model": "sphere", "n": 5, "k": 1, "bubbles": [
      {"center": [0,0,0,0,0,1], "mu": 0.01},
      {"center": [0.8414709848078965,0,0,0,0,0.5403023058681398], "mu": 0.01}]})";
  }
  CHECK(run({"interactions", "--config", (dir / "cfg.json").string(), "--out", dir.string()}) == 0);
  auto j = report(dir / "interactions.json");
  CHECK(j["Q"][0][1].get<double>() == doctest::Approx(0.3017759589825).epsilon(1e-7));
  CHECK(j["Q_error"][0][1].get<double>() < 1e-7);
  std::string csv = slurp(dir / "interactions.csv");
  CHECK(csv.rfind("i,j,eps,Q,Q_error,L,L_error,Q_over_eps,L_deviation\n", 0) == 0);
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"bubbles": [{"center": [1,0,0], "mu": 0.01}]})";
  }
  CHECK(run({"interactions", "--config", (dir / "bad.json").string(), "--out", dir.string()}) == 2);
}

TEST_CASE("sweep with an expected slope") {
  auto dir = scratch("sweep");
  std::vector<std::string> base{"sweep", "--model", "quotient", "--quantity", "self_interaction",
                                "--mu-grid", "1e-5:1e-3:9", "--out", dir.string()};
  auto ok = base, bad = base;
  ok.insert(ok.end(), {"--expect-slope", "3"});
  bad.insert(bad.end(), {"--expect-slope", "5"});
  CHECK(run(ok) == 0);
  auto j = report(dir / "sweep.json");
  CHECK(j["fit"]["slope"].get<double>() == doctest::Approx(3.0).epsilon(0.05));
  CHECK(slurp(dir / "sweep.csv").rfind("parameter,value,error_estimate,quantity_id\n", 0) == 0);
  CHECK(run(bad) == 4);
  CHECK(report(dir / "sweep.json").contains("failures"));
  CHECK(run({"sweep", "--quantity", "nonsense", "--out", dir.string()}) == 2);
}

TEST_CASE("energy scan") {
  auto dir = scratch("scan");
  CHECK(run({"energy-scan", "--n", "5", "--k", "1", "--d", "2..2", "--mu-grid", "1e-2,3e-3", "--out", dir.string()}) ==
        0);
  auto j = report(dir / "energy-scan.json");
  CHECK(j["d_star"] == 2);
  CHECK(j["best_rows"][0]["margin_d"].get<double>() > 0.0);
  std::string csv = slurp(dir / "energy-scan.csv");
  CHECK(csv.find("error_estimate") != std::string::npos);
  CHECK(csv.find("\n2,") != std::string::npos);
}

TEST_CASE("select from serialized fields") {
  auto dir = scratch("select");
  {
    std::ofstream f(dir / "field.json");
    f << R"({"model": "sphere", "n": 5, "k": 1, "bubbles": [{"center": [0,0,0,0,0,1], "mu": 0.02, "weight": 1.5}]})";
  }
  CHECK(run({"select", "--field", (dir / "field.json").string(), "--d", "1", "--restarts", "2", "--out",
             dir.string()}) == 0);
  auto j = report(dir / "select.json");
  CHECK(j["bubbles"][0]["mu"].get<double>() == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(j["bubbles"][0]["weight"].get<double>() == doctest::Approx(1.5).epsilon(1e-6));
  {
    std::ofstream f(dir / "field.csv");
    f << "x0,x1,x2,x3,x4,x5,value\n";
    f << "1,0,0,0,0,0,1\n0,1,0,0,0,0\n";
  }
  CHECK(run({"select", "--field", (dir / "field.csv").string(), "--out", dir.string()}) == 2);
}
