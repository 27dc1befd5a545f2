#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "g2flow/commands.hpp"
#include "g2flow/errors.hpp"
#include "g2flow/report.hpp"

using namespace g2flow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("g2flow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles") {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23, std::sqrt(2.0)}) CHECK(std::stod(fmt17(v)) == v);
  CHECK(fmt17(2.0) == "2");
}

TEST_CASE("fnv1a_hex reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("RunConfig: json parsing, dash keys and unknown keys") {
  const RunConfig c = RunConfig::from_json(json{{"family", "b7"}, {"r0", 2.0}, {"t-switch", 0.05}, {"alpha3", 0.001}});
  CHECK(c.family == "b7");
  CHECK(c.r0 == 2.0);
  CHECK(c.t_switch == 0.05);
  CHECK(c.alpha3 == 0.001);
  CHECK(std::isnan(c.alpha1));
  CHECK_THROWS_AS(RunConfig::from_json(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"r0", "x"}}), ConfigError);
  const RunConfig back = RunConfig::from_json(c.to_json());
  CHECK(back.hash() == c.hash());
  RunConfig d = c;
  d.beta = 7;
  CHECK(d.hash() != c.hash());
}

TEST_CASE("RunConfig: merge order and validation") {
  const json file{{"family", "kmn"}, {"beta", 2.0}, {"m", 1}, {"n", 2}};
  const RunConfig c = merge_config(file, json{{"beta", 3.0}});
  CHECK(c.beta == 3.0);
  CHECK(c.n == 2);
  RunConfig bad;
  bad.family = "kmn";
  bad.m = 2;
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = RunConfig{};
  bad.family = "nope";
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"family": "cs", "c": -1})";
  const RunConfig f = merge_config(load_config_file((dir / "c.json").string()), json::object());
  CHECK(f.family == "cs");
  CHECK(f.c == -1);
  CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("build_seed: b7 alpha1 auto fills the constraint") {
  RunConfig c;
  c.family = "b7";
  c.alpha3 = 0.002;
  const SeedBuild sb = build_seed(c);
  CHECK(sb.u1);
  CHECK(sb.state.a > sb.state.b);
  c.alpha1 = 0.005;
  c.alpha2 = 1 / 64.0 - 0.007;
  CHECK_FALSE(build_seed(c).u1);
}

TEST_CASE("sweep_values: explicit lists and geometric ranges") {
  RunConfig c;
  c.values = {3, 1, 2};
  CHECK(sweep_values(c) == std::vector<double>{3, 1, 2});
  c.values.clear();
  c.from = 1;
  c.to = 2;
  c.count = 3;
  const auto v = sweep_values(c);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == doctest::Approx(std::sqrt(2.0)));
  c.from = -1;
  c.to = 1;
  CHECK(sweep_values(c) == std::vector<double>{-1, 0, 1});
  CHECK(with_sweep_value(c, 4.0).beta == 4.0);
  c.sweep_param = "gamma";
  CHECK_THROWS_AS(with_sweep_value(c, 1.0), ConfigError);
}

TEST_CASE("run_command: solve on the cone") {
  const fs::path dir = scratch("solve");
  RunConfig c;
  c.family = "cone";
  c.t1 = 10;
  c.out = dir.string();
  std::ostringstream out, err;
  CHECK(run_command("solve", c, out, err) == kOk);
  const auto rows = lines(slurp(dir / "trajectory.csv"));
  REQUIRE(rows.size() > 3);
  CHECK(rows[0].rfind("param,t,s,a,b,", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream is(rows[i]);
    std::string f;
    std::vector<double> v;
    for (int k = 0; k < 5 && std::getline(is, f, ','); ++k) v.push_back(std::stod(f));
    CHECK(v[3] == doctest::Approx(v[4]).epsilon(1e-12));
  }
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("config_hash") == c.hash());
  fs::remove_all(dir);
}

TEST_CASE("run_command: configuration errors map to exit code 2") {
  std::ostringstream out, err;
  RunConfig c;
  c.family = "b7";
  c.alpha1 = c.alpha2 = c.alpha3 = 0.01;
  c.out = scratch("bad").string();
  CHECK(run_command("solve", c, out, err) == kConfigError);
  RunConfig d;
  d.m = 2;
  d.n = 4;
  CHECK_THROWS_AS(d.validate(), Error);
  CHECK(run_command("classify", d, out, err) == kConfigError);
  CHECK(run_command("nonsense", RunConfig{}, out, err) == kConfigError);
}

TEST_CASE("run_command: classify and sweep") {
  const fs::path dir = scratch("sweep");
  RunConfig c;
  c.family = "kmn";
  c.out = dir.string();
  c.values = {1.0, 4.0};
  c.threads = 2;
  std::ostringstream out, err;
  REQUIRE(run_command("sweep", c, out, err) == kOk);
  const auto rows = lines(slurp(dir / "sweep.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("beta,verdict,", 0) == 0);
  CHECK(rows[1].find(",Incomplete,") != std::string::npos);
  CHECK(rows[2].find(",ALC,") != std::string::npos);

  c.beta = 4;
  REQUIRE(run_command("classify", c, out, err) == kOk);
  const json v = json::parse(slurp(dir / "verdict.json"));
  CHECK(v.at("verdict").at("kind") == "ALC");
  fs::remove_all(dir);
}

TEST_CASE("run_command: verify --quick") {
  RunConfig c;
  c.quick = true;
  std::ostringstream out, err;
  CHECK(run_command("verify", c, out, err) == kOk);
  CHECK(out.str().find("[PASS]") != std::string::npos);
  CHECK(out.str().find("[FAIL]") == std::string::npos);
}
