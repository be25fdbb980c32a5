#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// Each test drives the installed binary through a shell, captures both
// streams, and checks the exit code contract: 0 ok, 1 bad input, 2 guard,
// 3 internal.

namespace {

using nlohmann::json;

const std::string& tmp_root() {
  static const std::string root = [] {
    char tmpl[] = "/tmp/taulab_cli_XXXXXX";
    const char* dir = mkdtemp(tmpl);
    if (dir == nullptr) std::abort();
    return std::string(dir);
  }();
  return root;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string out_path = tmp_root() + "/stdout.txt";
  const std::string err_path = tmp_root() + "/stderr.txt";
  const std::string cmd = env_prefix + TAULAB_CLI " " + args + " > " + out_path +
                          " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("construct is deterministic and seed sensitive") {
  RunResult a = run_cli("construct --n 8 --seed 42");
  RunResult b = run_cli("construct --n 8 --seed 42");
  RunResult c = run_cli("construct --n 8 --seed 43");
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  const std::string path = tmp_root() + "/inst8.json";
  RunResult f = run_cli("construct --n 8 --seed 42 --out " + path);
  REQUIRE(f.status == 0);
  CHECK(slurp(path) == a.out);
  CHECK(json::parse(a.out)["version"] == "taulab-1");
}

TEST_CASE("construct rejects a non power of two length") {
  RunResult r = run_cli("construct --n 5 --seed 1");
  CHECK(r.status == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("eval from a file and from a seed agree") {
  const std::string path = tmp_root() + "/inst4.json";
  REQUIRE(run_cli("construct --n 4 --seed 1 --out " + path).status == 0);

  RunResult from_file = run_cli("eval --instance " + path + " --x 5");
  REQUIRE(from_file.status == 0);
  CHECK(from_file.out == "4\n");
  CHECK(run_cli("eval --n 4 --seed 1 --x 5").out == "4\n");
  CHECK(run_cli("eval --n 4 --seed 1 --x 0x5").out == "4\n");

  CHECK(run_cli("eval --n 4 --seed 1 --x 16").status == 1);
  CHECK(run_cli("eval --n 4 --seed 1").status == 1);
}

TEST_CASE("eval trace lists one walk per output bit") {
  RunResult r = run_cli("eval --n 2 --seed 7 --x 2 --trace");
  REQUIRE(r.status == 0);
  std::vector<std::string> lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].find("bit 1: start (") == 0);
  CHECK(lines[1].find("bit 2: start (") == 0);
  CHECK(lines[0].find(" dirs ") != std::string::npos);
  CHECK(lines[0].find(" visited ") != std::string::npos);
  CHECK(lines[2] == "3");
}

TEST_CASE("random inversion report") {
  RunResult plain =
      run_cli("invert --n 8 --seed 42 --y 175 --budget 512 --trial-seed 9");
  REQUIRE(plain.status == 0);
  json j = json::parse(plain.out);
  CHECK(j["n"] == 8);
  CHECK(j["budget"] == 512);
  CHECK(j["census_rate"].is_null());
  CHECK(j["single_trial_claim"].get<double>() ==
        doctest::Approx(1.0 / 16777216.0));
  CHECK(j["success_rate"].get<double>() ==
        doctest::Approx(j["hits"].get<double>() / 512.0));
  REQUIRE(j["envelopes"].size() == 3);
  CHECK(j["envelopes"][0]["c"] == 1);
  CHECK(j["envelopes"][0]["value"].get<double>() == doctest::Approx(0.125));

  RunResult with_census = run_cli(
      "invert --n 8 --seed 42 --y 175 --budget 512 --trial-seed 9 --census");
  REQUIRE(with_census.status == 0);
  json jc = json::parse(with_census.out);
  CHECK(jc["census_rate"].get<double>() > 0.0);
  CHECK(jc["hits"] == j["hits"]);
}

TEST_CASE("brute inversion prints preimages in order") {
  RunResult r = run_cli("invert --n 4 --seed 1 --y 8 --mode brute");
  REQUIRE(r.status == 0);
  CHECK(r.out == "0\n4\n6\n7\n10\n15\n");
  CHECK(run_cli("invert --n 4 --seed 1 --y 3 --mode brute").out.empty());
  CHECK(run_cli("invert --n 4 --seed 1 --y 16 --mode brute").status == 1);
}

TEST_CASE("census experiment writes CSV plus sidecar") {
  const std::string csv = tmp_root() + "/census.csv";
  RunResult r = run_cli("experiment --out " + csv + " census --n 4 --seed 1");
  REQUIRE(r.status == 0);

  std::vector<std::string> rows = lines_of(slurp(csv));
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == "y_hex,count");
  std::uint64_t total = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t comma = rows[i].find(',');
    REQUIRE(comma != std::string::npos);
    total += std::stoull(rows[i].substr(comma + 1));
  }
  CHECK(total == 16);
  CHECK(slurp(csv).find("8,6\n") != std::string::npos);

  json meta = json::parse(slurp(csv + ".meta.json"));
  CHECK(meta["command"] == "experiment census");
  CHECK(meta["format"] == "taulab-1");
  CHECK(meta["n"] == 4);
  CHECK(meta["seed"] == "1");
  CHECK(meta["prime_width"] == 12);
  CHECK(meta.contains("artifact_version"));
  CHECK_FALSE(meta.contains("timestamp"));
}

TEST_CASE("guard exits use code 2 and respect the environment override") {
  CHECK(run_cli("experiment census --n 32 --seed 1").status == 2);

  const std::string hinv = " experiment hinv --a 1 --b 1 --p 5 --t 2 --bits 25";
  CHECK(run_cli(hinv).status == 2);
  CHECK(run_cli(hinv, "TAULAB_MAX_N=26 ").status == 0);
  CHECK(run_cli("--force" + hinv).status == 0);
  CHECK(run_cli("experiment census --n 32 --seed 1", "TAULAB_MAX_N=26 ").status == 2);
}

TEST_CASE("instance file failures map to exit codes") {
  const std::string garbage = tmp_root() + "/garbage.json";
  spit(garbage, "not json at all\n");
  CHECK(run_cli("eval --instance " + garbage + " --x 0").status == 1);

  const std::string path = tmp_root() + "/tampered.json";
  REQUIRE(run_cli("construct --n 4 --seed 1 --out " + path).status == 0);
  json j = json::parse(slurp(path));
  j["h_row"][0]["a"] = j["h_row"][0]["p"];
  spit(path, j.dump(2) + "\n");
  CHECK(run_cli("eval --instance " + path + " --x 0").status == 3);
}

TEST_CASE("cnf emission pins outputs on request") {
  RunResult pinned = run_cli("cnf --n 4 --seed 1 --y 8");
  REQUIRE(pinned.status == 0);
  CHECK(pinned.out.find("c taulab n=4 seed=1\n") == 0);
  CHECK(pinned.out.find(" pin=4\n") != std::string::npos);
  CHECK(pinned.out.find("\np cnf ") != std::string::npos);

  RunResult open = run_cli("cnf --n 4 --seed 1");
  REQUIRE(open.status == 0);
  CHECK(open.out.find(" pin=0\n") != std::string::npos);

  const std::string out = tmp_root() + "/f.cnf";
  REQUIRE(run_cli("cnf --n 4 --seed 1 --y 8 --out " + out).status == 0);
  CHECK(slurp(out) == pinned.out);
}

TEST_CASE("growth experiment emits one row per length") {
  const std::string csv = tmp_root() + "/growth.csv";
  RunResult r =
      run_cli("experiment --out " + csv + " cnf-growth --ns 2,4 --seed 1");
  REQUIRE(r.status == 0);
  std::vector<std::string> rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "n,vars,clauses");
  CHECK(rows[1].find("2,") == 0);
  CHECK(rows[2].find("4,") == 0);
  CHECK(run_cli("experiment cnf-growth --ns 2,4").status == 1);
  CHECK(run_cli("experiment cnf-growth --ns 2,x --seed 1").status == 1);
}

TEST_CASE("hash preimage experiment tabulates residue class sizes") {
  const std::string csv = tmp_root() + "/hinv.csv";
  RunResult r = run_cli("experiment --out " + csv +
                        " hinv --a 1 --b 1 --p 5 --t 2 --bits 3");
  REQUIRE(r.status == 0);
  CHECK(slurp(csv) == "m,size\n0,4\n1,4\n");
  json meta = json::parse(slurp(csv + ".meta.json"));
  CHECK(meta["command"] == "experiment hinv");
  CHECK(meta["parameters"]["p"] == "5");
}

TEST_CASE("irreducible experiment cross checks both kernels") {
  const std::string csv = tmp_root() + "/irr.csv";
  RunResult r = run_cli("experiment --out " + csv +
                        " irreducible --n 8 --seed 42 --k 3 --verify-all-pairs");
  REQUIRE(r.status == 0);
  std::vector<std::string> rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "n,k,size,bound,holds");
  CHECK(rows[1].find("8,3,") == 0);
}

TEST_CASE("worker count does not change results") {
  const std::string a = tmp_root() + "/w1.csv";
  const std::string b = tmp_root() + "/w7.csv";
  REQUIRE(run_cli("--workers 1 experiment --out " + a + " census --n 8 --seed 42")
              .status == 0);
  REQUIRE(run_cli("--workers 7 experiment --out " + b + " census --n 8 --seed 42")
              .status == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("unknown arguments fail cleanly") {
  CHECK(run_cli("bogus").status == 1);
  CHECK(run_cli("eval --n 4 --seed 1 --x 5 --bogus").status == 1);
}
