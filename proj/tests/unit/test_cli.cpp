#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "rapa/instance_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rapa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = rapa::cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t data_lines(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) n += !line.empty() && line[0] != '#';
  return n - 1;  // header
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("rapa_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help lists every subcommand and flag") {
  const auto r = run({"--help-all"});
  CHECK(r.status == 0);
  for (const char* word : {"generate", "run", "compare", "sweep-alpha", "sweep-attack", "sweep-resource",
                           "learning-curve", "--config", "--n", "--t", "--alpha", "--seed", "--seeds",
                           "--policy", "--out", "--per-slot", "--format", "--jobs", "--instance"}) {
    CHECK_MESSAGE(r.out.find(word) != std::string::npos, word);
  }
}

TEST_CASE("malformed invocations fail cleanly") {
  CHECK(run({}).status != 0);
  CHECK(run({"compare", "--bogus"}).status != 0);
  CHECK(run({"compare", "--n", "abc"}).status != 0);
  CHECK(run({"frobnicate"}).status != 0);
  const auto missing = run({"compare", "--config", "/nonexistent/cfg.json"});
  CHECK(missing.status != 0);
  CHECK(!missing.err.empty());
  const auto bad_alpha = run({"run", "--alpha", "1.5"});
  CHECK(bad_alpha.status != 0);
  CHECK(bad_alpha.err.find('\n') == bad_alpha.err.size() - 1);
  CHECK(run({"run", "--policy", "best"}).status != 0);
}

TEST_CASE("compare writes one row per policy and seed") {
  TempDir dir;
  const auto out = dir.path / "cmp.csv";
  const auto r = run({"compare", "--n", "8", "--t", "5", "--seeds", "3", "--out", out.string(), "--jobs", "2"});
  REQUIRE(r.status == 0);
  CHECK(data_lines(slurp(out)) == 12);
  CHECK(r.out.find("mean_damage") != std::string::npos);
  CHECK(slurp(out).find("\"n\":8") != std::string::npos);
}

TEST_CASE("generate is deterministic") {
  TempDir dir;
  const auto a = dir.path / "a.json", b = dir.path / "b.json";
  REQUIRE(run({"generate", "--n", "3", "--seed", "7", "--out", a.string()}).status == 0);
  REQUIRE(run({"generate", "--n", "3", "--seed", "7", "--out", b.string()}).status == 0);
  CHECK(slurp(a) == slurp(b));
  const auto inst = rapa::load_instance(a);
  CHECK(inst.n == 3);
  CHECK(inst.seed == 7);
}

TEST_CASE("run on a saved instance") {
  TempDir dir;
  const auto inst = dir.path / "i.json";
  REQUIRE(run({"generate", "--n", "5", "--t", "4", "--seed", "2", "--out", inst.string()}).status == 0);
  const auto slots = dir.path / "slots.csv", moves = dir.path / "moves.csv";
  const auto r = run({"run", "--policy", "oracle", "--instance", inst.string(), "--per-slot", slots.string(),
                      "--transfers", moves.string(), "--no-wall-time"});
  REQUIRE(r.status == 0);
  CHECK(data_lines(r.out) == 1);
  CHECK(r.out.find("oracle") != std::string::npos);
  CHECK(data_lines(slurp(slots)) == 4);
  CHECK(slurp(moves).rfind("t,i,j,amount,cost", 0) == 0);

  // Same as generating in place with the same seed.
  const auto direct = run({"run", "--policy", "oracle", "--n", "5", "--t", "4", "--seed", "2", "--no-wall-time"});
  REQUIRE(direct.status == 0);
  const auto last_line = [](const std::string& s) {
    const auto end = s.find_last_not_of('\n');
    return s.substr(s.rfind('\n', end) + 1, end - s.rfind('\n', end));
  };
  CHECK(last_line(direct.out) == last_line(r.out));
}

TEST_CASE("config file with overrides") {
  TempDir dir;
  const auto cfg = dir.path / "cfg.json";
  std::ofstream(cfg) << R"({"experiment_id": "fromfile", "n": 4, "T": 3, "seeds": [4, 5], "alphas": [0.1, 0.2]})";
  const auto out = dir.path / "alpha.csv";
  const auto r = run({"sweep-alpha", "--config", cfg.string(), "--t", "2", "--out", out.string(), "--format", "json"});
  REQUIRE(r.status == 0);
  const auto csv = slurp(out);
  CHECK(data_lines(csv) == 4);
  CHECK(csv.find("fromfile") != std::string::npos);
  CHECK(csv.find("\"T\":2") != std::string::npos);
  CHECK(r.out.find("\"aggregates\"") != std::string::npos);

  std::ofstream(cfg) << R"({"n": 4, "colour": "red"})";
  const auto bad = run({"compare", "--config", cfg.string()});
  CHECK(bad.status != 0);
  CHECK(bad.err.find("colour") != std::string::npos);
}

TEST_CASE("infeasible saved instance is reported") {
  TempDir dir;
  const auto inst = dir.path / "i.json";
  REQUIRE(run({"generate", "--n", "3", "--seed", "1", "--out", inst.string()}).status == 0);
  auto j = nlohmann::json::parse(slurp(inst));
  j["R"] = 0.5;
  std::ofstream(inst) << j.dump();
  const auto r = run({"run", "--instance", inst.string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("infeasible") != std::string::npos);
}

TEST_CASE("sweeps and learning curve") {
  TempDir dir;
  const auto base = std::vector<std::string>{"--n", "5", "--t", "4", "--seeds", "2"};
  auto with = [&](std::vector<std::string> head, const std::string& out) {
    head.insert(head.end(), base.begin(), base.end());
    head.push_back("--out");
    head.push_back((dir.path / out).string());
    return run(head);
  };
  CHECK(with({"sweep-attack", "--p-max-levels", "0,0.5,1"}, "att.csv").status == 0);
  CHECK(data_lines(slurp(dir.path / "att.csv")) == 2 * 3 * 2);
  CHECK(with({"sweep-resource", "--r-fractions", "0,1"}, "res.csv").status == 0);
  CHECK(data_lines(slurp(dir.path / "res.csv")) == 2 * 2 * 2);
  CHECK(with({"learning-curve"}, "lc.csv").status == 0);
  CHECK(data_lines(slurp(dir.path / "lc.csv")) == 4);
}
