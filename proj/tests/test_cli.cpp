#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = BELLBOUND_CLI;
const std::string kData = BELLBOUND_DATA_DIR;

struct Result {
  int code;
  std::string out;
};

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "bellbound_cli_test";
  fs::create_directories(dir);
  return dir;
}

Result run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string last_stderr() {
  std::ifstream in(scratch() / "stderr.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("affdim prints the affine dimension and a run report") {
  const auto r = run("affdim " + write("s.json", "[[2,2],[2,2]]"));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["affine_dimension"] == 8);
  const auto report = json::parse(last_stderr());
  CHECK(report["command"] == "affdim");
  CHECK(report["inputs"].size() == 1);
  CHECK(report.contains("wall_time_s"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("no-such-command").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("seesaw " + kData + "/functionals/chsh.json").code == 2);  // --seed missing
}

TEST_CASE("validation errors produce structured JSON") {
  const auto r = run("affdim " + write("bad.json", "[[2,0]]"));
  CHECK(r.code == 2);
  CHECK(json::parse(r.out)["error"] == "InvalidArgument");
  const auto m = run("member " + write("short.json", R"({"scenario":[[2,2],[2,2]],"values":[1,0]})"));
  CHECK(m.code == 2);
  CHECK(json::parse(m.out)["error"] == "ShapeMismatch");
}

TEST_CASE("seesaw output is byte-identical for a fixed seed") {
  const std::string args = "seesaw " + kData + "/functionals/chsh.json --seed 7 --restarts 4 --trace";
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out)["value"].get<double>() >= 2 * std::sqrt(2.0) - 1e-6);
}

TEST_CASE("pipeline: seesaw, compress, born") {
  const fs::path seesaw = scratch() / "seesaw.json";
  REQUIRE(run("seesaw " + kData + "/functionals/chsh.json --seed 3 --restarts 4 --dims 3,3 -o " + seesaw.string()).code == 0);
  json s;
  std::ifstream(seesaw) >> s;
  const auto real = write("real.json", s["realization"].dump());
  const auto c = run("compress " + real);
  REQUIRE(c.code == 0);
  const auto cj = json::parse(c.out);
  CHECK(cj["max_behavior_deviation"].get<double>() < 1e-9);
  CHECK(cj["new_dims"][0].get<int>() <= 3);
  const auto born = run("born " + real);
  REQUIRE(born.code == 0);
  CHECK(json::parse(born.out)["values"].size() == 16);
}

TEST_CASE("Bell+ commands") {
  const auto causal = write("instr.json", R"({"parties":[{"slots":[2],"outcomes":2},{"slots":[2],"outcomes":2}],
    "edges":[{"from_party":0,"to_party":1,"to_setting_slot":0}]})");
  const auto b = run("bounds " + causal);
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["general_caps"] == json::array({16, 16}));
  const auto i = run("interrupt " + causal);
  REQUIRE(i.code == 0);
  const auto cyc = write("cyc.json", R"({"parties":[{"slots":[2],"outcomes":2},{"slots":[2],"outcomes":2}],
    "edges":[{"from_party":0,"to_party":1,"to_setting_slot":0},{"from_party":1,"to_party":0,"to_setting_slot":0}]})");
  const auto e = run("interrupt " + cyc);
  CHECK(e.code == 2);
  CHECK(json::parse(e.out)["error"] == "CyclicDependency");
}

TEST_CASE("dstar") {
  const auto r = run("dstar --scenario " + write("s3.json", "[[2,2],[2,2],[2,2]]"));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["dstar"] == json::array({52, 52, 104}));
}
