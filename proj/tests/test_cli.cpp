#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "hartree/cli/commands.hpp"
#include "hartree/cli/config.hpp"
#include "hartree/io.hpp"

using namespace hartree;
using namespace hartree::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hartree_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

Json with_output(const fs::path& dir) { return Json{{"output_dir", dir.string()}}; }

int run_args(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "hartree");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("default config lists every section") {
  const Json d = default_config();
  for (const char* k : {"params", "seed", "output_dir", "tol", "bubble_check", "kernel", "delaunay", "moving_spheres",
                        "asymptotics", "hls_check"})
    CHECK(d.contains(k));
  CHECK(command_names().size() == 7);
}

TEST_CASE("merge rejects unknown keys and wrong types with a path") {
  const Json d = default_config();
  try {
    merge_config(d, Json::parse(R"({"kernel": {"bogus": 1}})"));
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "kernel.bogus");
  }
  try {
    merge_config(d, Json::parse(R"({"delaunay": {"periods": [1.05, "x"]}})"));
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "delaunay.periods[1]");
  }
  const Json m = merge_config(d, Json::parse(R"({"params": {"alpha": 1}})"));
  CHECK(m["params"]["alpha"].is_number_float());
  CHECK(m["params"]["alpha"].get<double>() == 1.0);
  CHECK(m["params"]["n"] == 3);
}

TEST_CASE("set patches") {
  CHECK(set_patch("a.b=3") == Json::parse(R"({"a": {"b": 3}})"));
  CHECK(set_patch("x=[1, 2]") == Json::parse(R"({"x": [1, 2]})"));
  CHECK(set_patch("f=singular") == Json::parse(R"({"f": "singular"})"));
  CHECK_THROWS_AS(set_patch("novalue"), ConfigError);
}

TEST_CASE("validation") {
  Json c = default_config();
  c["params"]["n"] = 7;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = default_config();
  c["tol"] = -1.0;
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("config hash ignores the output directory") {
  Json a = default_config(), b = default_config();
  b["output_dir"] = "elsewhere";
  CHECK(config_hash("kernel", a) == config_hash("kernel", b));
  CHECK(config_hash("kernel", a) != config_hash("constants", a));
  b["seed"] = 2;
  CHECK(config_hash("kernel", a) != config_hash("kernel", b));
}

TEST_CASE("constants command writes its artifacts") {
  const fs::path dir = scratch("constants");
  std::ostringstream out, err;
  Json cfg = with_output(dir);
  cfg["params"] = Json{{"n", 3}, {"alpha", 2.0}};
  REQUIRE(dispatch("constants", cfg, out, err) == Ok);
  const Json j = Json::parse(io::read_file(dir / "constants.json"));
  CHECK(j["p"].get<double>() == 5.0);
  CHECK(j["config_hash"] == Json::parse(out.str())["config_hash"]);
  CHECK(fs::exists(dir / "constants.config.json"));
}

TEST_CASE("failures map to exit codes") {
  const fs::path dir = scratch("failures");
  std::ostringstream out, err;
  CHECK(dispatch("frobnicate", with_output(dir), out, err) == ConfigFailure);
  Json bad = with_output(dir);
  bad["params"] = Json{{"n", 3}, {"alpha", 5.0}};
  CHECK(dispatch("constants", bad, out, err) == ConfigFailure);

  std::string o, e;
  CHECK(run_args({"frobnicate"}, &o, &e) == ConfigFailure);
  CHECK(e.find("usage") != std::string::npos);
  CHECK(run_args({"constants", "--set", "kernel.bogus=1", "--out", dir.string()}, &o, &e) == ConfigFailure);
  CHECK(e.find("kernel.bogus") != std::string::npos);
  CHECK(run_args({"constants", "--n", "4", "--out", dir.string()}, &o, &e) == Ok);
  CHECK(Json::parse(o)["p"].get<double>() == 3.0);
}

TEST_CASE("re-running from the recorded config reproduces every artifact") {
  const fs::path first = scratch("first"), second = scratch("second");
  for (const std::string cmd : {"constants", "kernel", "asymptotics"}) {
    std::string o, e;
    REQUIRE(run_args({cmd, "--out", first.string()}, &o, &e) == Ok);
    std::string stem = cmd;
    for (char& c : stem)
      if (c == '-') c = '_';
    REQUIRE(run_args({cmd, "--config", (first / (stem + ".config.json")).string(), "--out", second.string()}, &o, &e) == Ok);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".config.json")) continue;
    CAPTURE(name);
    CHECK(io::read_file(entry.path()) == io::read_file(second / name));
    ++compared;
  }
  CHECK(compared >= 6);
}
