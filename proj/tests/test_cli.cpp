#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "avc/channel.hpp"
#include "avc/codegen.hpp"

using namespace avc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(AVCTOOL_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf;
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), k);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch() {
  auto d = fs::temp_directory_path() / "avctool_test";
  fs::create_directories(d);
  return d;
}

std::string data(const std::string& name) { return std::string(AVC_SOURCE_DIR) + "/data/" + name; }

std::string write_code(int n, int M, double w, std::uint64_t seed, const std::string& name) {
  auto p = (scratch() / name).string();
  save_codebook(sample_codebook(n, M, {}, CondDist({1}, {Dist({1 - w, w})}), seed), p);
  return p;
}

}  // namespace

TEST_CASE("canonical channel round trip through check-sym") {
  const auto spec = (scratch() / "canon2.json").string();
  auto c = run("canonical --Pset demo --L 2 --out " + spec);
  REQUIRE(c.code == 0);
  auto r = run("check-sym " + spec + " --mode cp --L 2");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"]["answer"] == "yes");
  CHECK(j["verdict"]["witness"]["nu"] == 1);
  // Identity rows: context x1 x2 sends all mass to state index 2 x1 + x2.
  const auto rows = j["verdict"]["witness"]["U"]["rows"];
  REQUIRE(rows.size() == 4);
  for (int c2 = 0; c2 < 4; ++c2)
    for (int s = 0; s < 4; ++s) CHECK(rows[c2][s].get<double>() == (s == c2 ? 1.0 : 0.0));
}

TEST_CASE("capacity of the constrained bitflip") {
  auto r = run("capacity " + data("bitflip.json") + " --L 1");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["value_4dp"] == "0.5310");
  CHECK(std::abs(j["estimate"]["value"].get<double>() - 0.5310) < 5e-5);
  auto free = nlohmann::json::parse(run("capacity " + data("bitflip_free.json") + " --L 1").out);
  CHECK(free["estimate"]["all_symmetrizable"] == true);
  CHECK(free["estimate"]["value"] == 0.0);
}

TEST_CASE("simulate needs a seed and is reproducible") {
  const auto code = write_code(40, 8, 0.5, 3, "sim_code.json");
  const std::string base = "simulate " + data("bitflip.json") + " " + code + " --attack iid --state-pmf 0.95,0.05 --decoder ml --trials 200";
  CHECK(run(base).code == 2);
  auto a = run(base + " --seed 17");
  auto b = run(base + " --seed 17");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["seed"] == 17);
  CHECK(j["error"]["trials"] == 200);
  CHECK(run(base + " --seed 18").out != a.out);
}

TEST_CASE("cp attack simulation reports compliance") {
  auto spec = (scratch() / "bf07.json").string();
  save_spec(bitflip_avc(0.7), spec);
  const auto code = write_code(60, 10, 0.2, 4, "cp_code.json");
  auto r = run("simulate " + spec + " " + code + " --attack cp --decoder ml --L 2 --trials 50 --seed 5");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["compliance"]["fraction"].get<double>() >= 0);
  CHECK(j["plan"]["L"] == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("check-sym " + data("bitflip.json") + " --bogus").code == 2);
  CHECK(run("frobnicate").code == 2);
  const auto bad = (scratch() / "bad.json").string();
  std::ofstream(bad) << R"({"alphabets": {"X": ["0","1"], "S": ["a"], "Y": ["0","1"]}, "W": [[[1,0]],[[0.5,0.6]]]})";
  CHECK(run("check-sym " + bad).code == 2);
  CHECK(run("check-sym " + data("bitflip.json") + " --Px 0.5,0.6").code == 2);
  // Codeword jamming law with M^L tuples beyond the budget.
  const auto spec = (scratch() / "canon2b.json").string();
  REQUIRE(run("canonical --Pset demo --L 2 --out " + spec).code == 0);
  const auto big = write_code(6, 1200, 0.3, 9, "big_code.json");
  CHECK(run("simulate " + spec + " " + big + " --attack codeword --decoder ml --L 2 --trials 1 --seed 1").code == 3);
}

TEST_CASE("report re-emission and csv projection") {
  const auto rep = (scratch() / "rep.json").string();
  REQUIRE(run("--report " + rep + " capacity " + data("bitflip.json") + " --L 1").code == 0);
  auto again = run("report " + rep);
  REQUIRE(again.code == 0);
  std::ifstream in(rep);
  std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(again.out == saved);
  auto csv = run("--format csv report " + rep);
  CHECK(csv.out.rfind("path,value\n", 0) == 0);
  CHECK(csv.out.find("estimate.value,0.531") != std::string::npos);
  CHECK(run("--format xml report " + rep).code == 2);
}

TEST_CASE("extract-subcode") {
  const auto code = write_code(40, 200, 0.3, 6, "ts_code.json");
  const auto out = (scratch() / "ts_sub.json").string();
  auto r = run("extract-subcode " + code + " --zeta 0.1 --lambda 0.1 --out " + out);
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  auto sub = load_codebook(out);
  CHECK(sub.size() == j["subcode"]["size"].get<int>());
  CHECK(j["subcode"]["theta"].get<double>() >= j["subcode"]["theta_bound"].get<double>());
  CHECK(sub.u_seq.size() == 40);
}
