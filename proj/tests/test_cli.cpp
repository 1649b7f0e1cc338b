#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "repgame/io.hpp"

using namespace repgame;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(REPGAME_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(REPGAME_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("repgame_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);)
    if (l == line) return true;
  return false;
}

}  // namespace

TEST_CASE("cutoff on the product choice game") {
  const auto r = run("cutoff --game " + data("product_choice.json"));
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "K_bar=2"));
  CHECK(has_line(r.out, "eta_star=0.5"));
  const auto r2 = run("cutoff --game pc:0.5,1,0.8");
  CHECK(has_line(r2.out, "K_bar=5"));
}

TEST_CASE("construct then verify, and a tampered weight fails") {
  const auto dir = scratch("verify");
  const auto c = run("construct --family cycle --scenario " + data("cycle_k2.json") + " --out " + dir.string());
  REQUIRE(c.code == 0);
  const auto profile = (dir / "profile.json").string();
  const auto v = run("verify --profile " + profile);
  CHECK(v.code == 0);
  CHECK(has_line(v.out, "is_pbe=yes"));

  Json j = read_json_file(profile);
  const double beta = j["constants"]["beta"].get<double>();
  std::string tampered_obs;
  for (auto& [key, w] : j["sigma2"].items())
    if (std::abs(w[1].get<double>() - beta) < 1e-12) {
      w[1] = beta - 0.05;
      w[0] = 1 - (beta - 0.05);
      tampered_obs = key;
    }
  REQUIRE_FALSE(tampered_obs.empty());
  const auto bad = (dir / "tampered.json").string();
  write_text_file(bad, dump(j));
  const auto t = run("verify --profile " + bad + " --out " + dir.string());
  CHECK(t.code == 2);
  CHECK(t.out.find("observation=" + tampered_obs + " ") != std::string::npos);
  const Json report = read_json_file((dir / "report.json").string());
  CHECK_FALSE(report["is_pbe"].get<bool>());
  bool named = false;
  for (const auto& f : report["failing_sites"]) named = named || f["observation"] == tampered_obs;
  CHECK(named);
}

TEST_CASE("exact construction verifies with zero gains") {
  const auto dir = scratch("exact");
  REQUIRE(run("construct --exact --family cycle --scenario " + data("cycle_k2.json") + " --out " + dir.string()).code ==
          0);
  const auto v = run("verify --exact --profile " + (dir / "profile.json").string());
  CHECK(v.code == 0);
  CHECK(has_line(v.out, "worst_p1_deviation_gain=0"));
  CHECK(has_line(v.out, "worst_p2_regret=0"));
}

TEST_CASE("precondition failures exit with code 3") {
  CHECK(run("construct --family non-commitment --scenario " + data("cycle_k2.json")).code == 3);
  CHECK(run("construct --family sequence-cycle --scenario " + data("cycle_k2.json")).code == 3);
}

TEST_CASE("usage errors") {
  CHECK(run("construct --family nonsense --scenario " + data("cycle_k2.json")).code == 1);
  CHECK(run("verify").code == 1);
  CHECK(run("cutoff --game " + data("missing.json")).code == 1);
  CHECK(run("teleport").code != 0);
}

TEST_CASE("best reply scan finds the submodular back loop") {
  const auto dir = scratch("loop");
  REQUIRE(run("construct --family submodular-cycle --scenario " + data("submodular_k1.json") + " --out " +
              dir.string())
              .code == 0);
  const auto r = run("best-reply --profile " + (dir / "profile.json").string() + " --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "on_path_back_loop=yes"));
  const auto witness = slurp(dir / "back_loop.csv");
  CHECK(witness.rfind("step,state,action\n0,(H),L\n", 0) == 0);
}

TEST_CASE("repeated runs write identical artifacts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run("construct --family cycle --scenario " + data("cycle_k2.json") + " --out " + a.string()).code == 0);
  // same strategies, played under noisy records
  Json j = read_json_file((a / "profile.json").string());
  j["scenario"]["epsilon"] = 0.1;
  const auto profile = (a / "noisy.json").string();
  write_text_file(profile, dump(j));
  for (const auto& dir : {a, b}) {
    REQUIRE(run("simulate --episodes 5000 --seed 9 --workers 3 --profile " + profile + " --out " + dir.string()).code ==
            0);
    REQUIRE(run("flows --profile " + profile + " --out " + dir.string()).code == 0);
    REQUIRE(run("sweep --K 1,2 --delta-bar 0.99 --workers 2 --out " + dir.string()).code == 0);
  }
  for (const char* f : {"sample.csv", "frequency.csv", "welfare.csv", "corollary.csv", "signals.csv",
                        "transcripts.jsonl", "occupation.csv", "kernel.csv", "posteriors.csv", "blocks.csv",
                        "flows.csv", "sweep.csv"}) {
    CAPTURE(f);
    const auto x = slurp(a / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b / f));
  }
  const auto single = scratch("det_c");
  REQUIRE(run("simulate --episodes 5000 --seed 9 --workers 1 --profile " + profile + " --out " + single.string()).code ==
          0);
  CHECK(slurp(single / "sample.csv") == slurp(a / "sample.csv"));
  fs::remove_all(a.parent_path());
}
