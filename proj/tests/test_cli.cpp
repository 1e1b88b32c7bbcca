#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "polarpark/cli.hpp"

namespace fs = std::filesystem;
using polarpark::run_cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("polarpark_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run a parking maneuver with and without checks") {
    TempDir dir("run");
    auto r = cli({"run", "--preset", "fig3-red", "--out", dir / "red.csv"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "red.csv"));
    CHECK(r.out.find("termination=Cutoff") != std::string::npos);

    r = cli({"run", "--preset", "fig3-red", "--out", dir / "red2.csv", "--check", "thm3", "--report",
             dir / "red.txt"});
    CHECK(r.code == 0);
    CHECK(slurp(dir / "red.txt").find("overall=pass") != std::string::npos);
    CHECK(slurp(dir / "red.csv") == slurp(dir / "red2.csv"));
  }

  TEST_CASE("usage errors exit with 1") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"run"}).code == 1);
    CHECK(cli({"run", "--scenario", "/nonexistent.json"}).code == 1);
    CHECK(cli({"run", "--preset", "no-such-preset"}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"sweep", "--controller", "pid"}).code == 1);
    CHECK(cli({"check", "--csv", "/nonexistent.csv", "--preset", "fig3-red"}).code == 1);
  }

  TEST_CASE("list-presets is deterministic") {
    const auto a = cli({"list-presets"});
    const auto b = cli({"list-presets"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("fig3-red\t") != std::string::npos);
    CHECK(a.out.find("fig4\t") != std::string::npos);
  }

  TEST_CASE("check a stored trajectory") {
    TempDir dir("check");
    REQUIRE(cli({"run", "--preset", "fig3-red", "--out", dir / "red.csv"}).code == 0);
    auto r = cli({"check", "--csv", dir / "red.csv", "--preset", "fig3-red", "--suite", "thm3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("overall=pass") != std::string::npos);

    // Stretch every radius after the first row.
    std::istringstream in(slurp(dir / "red.csv"));
    std::ofstream bad(dir / "bad.csv");
    std::string line;
    std::getline(in, line);
    bad << line << '\n';
    std::getline(in, line);
    bad << line << '\n';
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
      f[4] = std::to_string(std::stod(f[4]) * 1.5);
      for (std::size_t i = 0; i < f.size(); ++i) bad << (i ? "," : "") << f[i];
      bad << '\n';
    }
    bad.close();
    r = cli({"check", "--csv", dir / "bad.csv", "--preset", "fig3-red"});
    CHECK(r.code == 2);
    CHECK(r.out.find("overall=fail") != std::string::npos);

    std::ofstream(dir / "empty.csv").close();
    CHECK(cli({"check", "--csv", dir / "empty.csv", "--preset", "fig3-red"}).code == 1);
  }

  TEST_CASE("scenario files and batch runs") {
    TempDir dir("batch");
    std::ofstream(dir / "exp.json") << R"({"schema_version": 1, "name": "exp", "rho0": 1,
        "delta0": 0.3, "gamma0": -0.4, "t_max": 20,
        "controller": {"name": "DeadbeatExp", "gains": {"c1": 0.7, "c2": 1.3, "v": 0.5}}})";
    auto r = cli({"run", "--scenario", dir / "exp.json", "--out", dir / "exp.csv", "--check", "auto"});
    CHECK(r.code == 0);
    CHECK(r.out.find("suite=thm4") != std::string::npos);

    r = cli({"batch", "--preset", "fig3-red", "--preset", "fig3-blue", "--out-dir", dir.path.string(),
             "--check", "auto"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "fig3-red.csv"));
    CHECK(fs::exists(dir / "fig3-blue.csv"));
  }

  TEST_CASE("output directory from the environment") {
    TempDir dir("env");
    ::setenv("POLARPARK_OUT_DIR", dir.path.c_str(), 1);
    const auto r = cli({"run", "--preset", "fig4", "--out", "elsewhere/fig4.csv"});
    ::unsetenv("POLARPARK_OUT_DIR");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "fig4.csv"));
  }

  TEST_CASE("random-state sweep") {
    const auto r = cli({"sweep", "--controller", "bofo", "--samples", "500", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("samples=500") != std::string::npos);
    CHECK(r.out.find("nonnegative_rates=0") != std::string::npos);
  }
}
