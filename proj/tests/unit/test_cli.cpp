#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperifs/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using hyperifs::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hyperifs_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("verify-overlap exit codes") {
  const fs::path dir = scratch("overlap");
  const auto ok = invoke({"--seed", "1", "--out", dir.string(), "verify-overlap", "--manifold", "circle", "--theta",
                          "6", "--t", "0.1", "--ell", "0.8"});
  CHECK(ok.code == 0);
  const auto rep = nlohmann::json::parse(slurp(dir / "overlap.json"));
  CHECK(rep["command"] == "verify-overlap");
  CHECK(rep["seed"] == 1);
  CHECK(rep["report"]["aggregate"]["min_relative_margin"].get<double>() == doctest::Approx(1.0 / 15.0));
  CHECK(rep["config"].contains("theta"));

  const auto bad = invoke({"--seed", "1", "--out", dir.string(), "verify-overlap", "--t", "0.5", "--ell", "0.99"});
  CHECK(bad.code == 1);

  CHECK(invoke({"--out", dir.string(), "verify-overlap"}).code == 2);
  CHECK(invoke({"--seed", "1", "verify-overlap", "--t", "0.7"}).code == 2);
  CHECK(invoke({"--seed", "1", "verify-overlap", "--manifold", "klein"}).code == 2);
  CHECK(invoke({"--seed", "1"}).code == 2);
}

TEST_CASE("check-hyper-minimal on controls") {
  const fs::path dir = scratch("hm");
  const auto irr = invoke({"--seed", "7", "--out", dir.string(), "check-hyper-minimal", "--system", "rotation",
                           "--beta", "0.41421356237309515", "--pairs", "10", "--r", "0.02"});
  CHECK(irr.code == 0);

  const auto rat = invoke({"--seed", "7", "--out", dir.string(), "check-hyper-minimal", "--system", "rotation",
                           "--beta", "0.3333333333333333", "--pairs", "10", "--r", "0.02", "--max-nodes", "2000"});
  CHECK(rat.code == 1);
  CHECK(rat.out.find("failed pair") != std::string::npos);

  const auto circle = invoke({"--seed", "7", "--out", dir.string(), "check-hyper-minimal", "--example", "circle",
                              "--theta", "6", "--pairs", "20", "--r", "0.02"});
  CHECK(circle.code == 0);
  CHECK(invoke({"--seed", "7", "check-hyper-minimal", "--example", "circle", "--theta", "5"}).code == 2);
  CHECK(invoke({"--seed", "7", "check-hyper-minimal", "--example", "circle", "--system", "rotation"}).code == 2);
}

TEST_CASE("orbit of a single rotation") {
  const fs::path dir = scratch("orbit");
  const auto r = invoke({"--seed", "3", "--out", dir.string(), "orbit", "--system", "rotation", "--beta", "0.1",
                         "--x", "0.05", "--length", "10"});
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(dir / "orbit.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "step,letter,x");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const double x = std::stod(line.substr(line.rfind(',') + 1));
    const double expect = std::fmod(0.05 + rows * 0.1, 1.0);
    CHECK(std::abs(std::remainder(x - expect, 1.0)) < 1e-12);
  }
  CHECK(rows == 10);
}

TEST_CASE("coverage of the whole circle is immediate") {
  const fs::path dir = scratch("coverage");
  const auto r = invoke({"--seed", "3", "--out", dir.string(), "coverage", "--system", "rotation", "--beta", "0.3",
                         "--measure", "1"});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "coverage.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "depth,coverage");
  while (std::getline(csv, line)) CHECK(std::stod(line.substr(line.find(',') + 1)) == 1.0);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  const std::vector<std::string> tail{"check-hyper-minimal", "--example", "sphere", "--pairs", "3", "--r", "0.05"};
  std::vector<std::string> args_a{"--seed", "11", "--out", a.string()}, args_b{"--seed", "11", "--out", b.string()};
  args_a.insert(args_a.end(), tail.begin(), tail.end());
  args_b.insert(args_b.end(), tail.begin(), tail.end());
  CHECK(invoke(args_a).code == 0);
  CHECK(invoke(args_b).code == 0);
  CHECK(slurp(a / "hyper_minimal.json") == slurp(b / "hyper_minimal.json"));
  CHECK(slurp(a / "hyper_minimal.csv") == slurp(b / "hyper_minimal.csv"));
}

TEST_CASE("config file sections") {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  const fs::path ini = dir / "run.ini";
  std::ofstream(ini) << "seed=1\n[verify-overlap]\nmanifold=torus\nt=0.5\nell=0.99\n";
  const auto r = invoke({"--config", ini.string(), "--out", dir.string(), "verify-overlap"});
  CHECK(r.code == 1);
  const auto rep = nlohmann::json::parse(slurp(dir / "overlap.json"));
  CHECK(rep["report"]["parameters"]["manifold"] == "torus");
}

TEST_CASE("environment overrides the output directory") {
  const fs::path flag = scratch("env_flag"), env = scratch("env_dir");
  ::setenv(hyperifs::cli::kOutDirEnv, env.string().c_str(), 1);
  const auto r = invoke({"--seed", "1", "--out", flag.string(), "verify-overlap", "--samples", "5"});
  ::unsetenv(hyperifs::cli::kOutDirEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(env / "overlap.json"));
  CHECK_FALSE(fs::exists(flag / "overlap.json"));
}
