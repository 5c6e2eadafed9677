#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hlmax/io.hpp"

namespace fs = std::filesystem;
using namespace hlmax;
using namespace hlmax::cli;

namespace {

const fs::path kExamples = HLMAX_EXAMPLES_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hlmax_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code;
  std::string log;
};

Run run_cli(const std::string& sub, const fs::path& config, const fs::path& out, const std::string& body = "") {
  Invocation inv;
  inv.subcommand = sub;
  inv.config_path = config.string();
  inv.out_dir = out.string();
  inv.body_path = body;
  std::ostringstream log;
  const int code = run(inv, log);
  return {code, log.str()};
}

std::string csv_value(const fs::path& csv, const std::string& parameter) {
  std::istringstream in(read_file(csv.string()));
  std::string line;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a != std::string::npos && b != std::string::npos && line.substr(a + 1, b - a - 1) == parameter)
      return line.substr(b + 1);
  }
  FAIL("no row " << parameter << " in " << csv);
  return "";
}

}  // namespace

TEST_CASE("certify the cube and the ball") {
  const fs::path dir = scratch("certify");
  const fs::path cfg = write_text(dir / "c.toml", "[certify]\norder = 4\npoint = [3.0, 0.0, 0.0]\n");

  Run r = run_cli("certify", cfg, dir / "cube", (kExamples / "cube.json").string());
  REQUIRE(r.code == kExitOk);
  const Json cube = Json::parse(read_file((dir / "cube" / "certificate.json").string()));
  CHECK(cube["Q"].get<double>() == doctest::Approx(-0.0467).epsilon(1e-3));
  CHECK(cube["is_obstructed"].get<bool>());
  CHECK(csv_value(dir / "cube" / "certify.csv", "is_obstructed") == "true");
  CHECK(fs::exists(dir / "cube" / "manifest.json"));

  r = run_cli("certify", cfg, dir / "ball", (kExamples / "ball.json").string());
  REQUIRE(r.code == kExitOk);
  const Json ball = Json::parse(read_file((dir / "ball" / "certificate.json").string()));
  CHECK(ball["Q"].get<double>() == 0.0);
  CHECK_FALSE(ball["is_obstructed"].get<bool>());
}

TEST_CASE("growth of the interval indicator") {
  const fs::path dir = scratch("growth");
  const Run r = run_cli("growth", kExamples / "growth_interval.toml", dir);
  REQUIRE(r.code == kExitOk);
  const double ratio = std::stod(csv_value(dir / "growth.csv", "p=2;ratio"));
  MESSAGE("ratio " << ratio);
  CHECK(ratio == doctest::Approx(std::sqrt(1.5)).epsilon(0.01));
}

TEST_CASE("reruns are byte identical") {
  const fs::path dir = scratch("rerun");
  const fs::path cfg = kExamples / "cover_square.toml";
  REQUIRE(run_cli("cover", cfg, dir / "a").code == kExitOk);
  REQUIRE(run_cli("cover", cfg, dir / "b").code == kExitOk);
  for (const char* f : {"cover.csv", "cover_report.json", "cover_input.json"})
    CHECK(read_file((dir / "a" / f).string()) == read_file((dir / "b" / f).string()));

  const Json ma = Json::parse(read_file((dir / "a" / "manifest.json").string()));
  const Json mb = Json::parse(read_file((dir / "b" / "manifest.json").string()));
  CHECK(ma["config_hash"] == mb["config_hash"]);
  CHECK(ma["outputs"] == mb["outputs"]);

  const fs::path rot = write_text(dir / "rot.toml", "body = \"" + (kExamples / "cube.json").string() +
                                                        "\"\nseed = 5\n[rotate]\ncount = 16\n");
  REQUIRE(run_cli("rotate-scan", rot, dir / "r1").code == kExitOk);
  REQUIRE(run_cli("rotate-scan", rot, dir / "r2").code == kExitOk);
  CHECK(read_file((dir / "r1" / "rotate-scan.csv").string()) == read_file((dir / "r2" / "rotate-scan.csv").string()));
}

TEST_CASE("invalid configs exit 2 and write nothing") {
  const fs::path dir = scratch("invalid");
  const std::string body = "body = \"" + (kExamples / "disk.json").string() + "\"\n";
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"unknown key", body + "[grid]\nlo = -2.0\nhi = 2.0\nn = 32\nbogus = 1\n"},
      {"bad ratio", body + "[ladder]\nratio = 2.0\n"},
      {"bad grid", body + "[grid]\nlo = 2.0\nhi = -2.0\nn = 32\n"},
      {"wrong type", body + "[grid]\nn = \"many\"\n"},
      {"missing body", "[grid]\nn = 32\n"},
      {"syntax", body + "[grid\n"},
  };
  int k = 0;
  for (const auto& [what, text] : cases) {
    CAPTURE(what);
    const fs::path cfg = write_text(dir / ("c" + std::to_string(k) + ".toml"), text);
    const fs::path out = dir / ("out" + std::to_string(k++));
    const Run r = run_cli("transform", cfg, out);
    CHECK(r.code == kExitConfig);
    CHECK(r.log.find("config") != std::string::npos);
    CHECK((!fs::exists(out) || fs::is_empty(out)));
  }
  const Run r = run_cli("transform", write_text(dir / "u.toml", body + "[grid]\nn = 32\nbogus = 1\n"), dir / "u");
  CHECK(r.log.find("bogus") != std::string::npos);
}

TEST_CASE("numerical failures exit 3; non-convergence is a status") {
  const fs::path dir = scratch("numerical");
  const fs::path cfg = write_text(dir / "c.toml", "isotropize = false\n[certify]\norder = 4\npoint = [3.0, 0.0, 0.0]\n");
  const Run r = run_cli("certify", cfg, dir / "o", (kExamples / "cube.json").string());
  CHECK(r.code == kExitNumerical);
  CHECK((!fs::exists(dir / "o") || fs::is_empty(dir / "o")));

  const fs::path it = write_text(dir / "it.toml", "body = \"" + (kExamples / "disk.json").string() +
                                                       "\"\n[grid]\nlo = -2.0\nhi = 2.0\nn = 33\n"
                                                       "[ladder]\nratio = 1.2\n[iterate]\nn_max = 2\nstop_tol = 1e-12\n"
                                                       "[field]\nkind = \"indicator\"\nscale = 0.3\n");
  const Run ri = run_cli("iterate", it, dir / "it");
  REQUIRE(ri.code == kExitOk);
  CHECK(csv_value(dir / "it" / "iterate.csv", "status") == "max_iterations");
  const Json m = Json::parse(read_file((dir / "it" / "manifest.json").string()));
  CHECK(m["status"] == "max_iterations");
}

TEST_CASE("every example config runs") {
  const fs::path dir = scratch("examples");
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"levelset", "levelset_disk.toml"}, {"cover", "cover_square.toml"}, {"quartic-probe", "quartic_cube.toml"}};
  for (const auto& [sub, file] : runs) {
    CAPTURE(file);
    const Run r = run_cli(sub, kExamples / file, dir / sub);
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / sub / (sub + ".csv")));
  }
  const fs::path norm = write_text(dir / "n.toml", "");
  CHECK(run_cli("normalize", norm, dir / "norm", (kExamples / "hexagon.json").string()).code == kExitOk);
  CHECK(run_cli("moments", norm, dir / "mom", (kExamples / "cross.json").string()).code == kExitOk);
  CHECK(fs::exists(dir / "norm" / "body_isotropic.json"));
  CHECK(fs::exists(dir / "mom" / "moments.json"));
}
