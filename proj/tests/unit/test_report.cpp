#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyposym/cli.hpp"

using namespace hyposym;

namespace {

ParseResult parse(std::vector<std::string> args) { return parse_config(args); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hyposym_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

json strip_timings(json d) {
  d.erase("timings");
  d["config"].erase("out");
  return d;
}

} // namespace

TEST_CASE("parse_config defaults and flags") {
  auto r = parse({"check", "--surface", "torus", "--R0", "3", "--rho", "0.5", "--r", "1", "--h", "0.02"});
  REQUIRE(r.ok);
  CHECK(r.exit_code == exit_pass);
  CHECK(r.config.command == "check");
  CHECK(r.config.params.R0 == 3.0);
  CHECK(r.config.h == 0.02);
  CHECK(r.config.r.value() == 1.0);
  CHECK(r.config.deltas == std::vector<double>{0.3, 0.15});
  CHECK(r.config.tol == 1e-6);

  r = parse({"variation", "--surface", "sphere", "--delta", "0.3", "--delta", "0.2"});
  REQUIRE(r.ok);
  CHECK(r.config.deltas == std::vector<double>{0.3, 0.2});
  CHECK_FALSE(r.config.r.has_value());
}

TEST_CASE("usage errors exit with 2") {
  auto r = parse({});
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == exit_usage);
  CHECK(r.message.find("Usage") != std::string::npos);

  for (const std::vector<std::string>& bad : std::vector<std::vector<std::string>>{
           {"frobnicate"},
           {"check"},
           {"check", "--surface", "klein_bottle"},
           {"check", "--surface", "sphere", "--h", "-1"},
           {"check", "--surface", "sphere", "--unknown-flag", "1"},
           {"variation", "--surface", "circle"},
           {"check", "--surface", "torus", "--rho", "3", "--R0", "2"}}) {
    r = parse(bad);
    CHECK_FALSE(r.ok);
    CHECK(r.exit_code == exit_usage);
  }

  r = parse({"variation", "--surface", "sphere", "--delta", "0.05", "--h", "0.01"});
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == exit_usage);
  CHECK(r.message.find("delta must be >= 9h") != std::string::npos);

  r = parse({"--help"});
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == exit_pass);
}

TEST_CASE("config file values yield to flags") {
  const auto dir = temp_dir("config");
  const auto file = dir / "run.toml";
  {
    std::ofstream os(file);
    os << "surface = \"torus\"\nR0 = 2.5\nrho = 0.4\nh = 0.02\n";
  }
  auto r = parse({"check", "--config", file.string(), "--rho", "0.3"});
  REQUIRE(r.ok);
  CHECK(r.config.surface == "torus");
  CHECK(r.config.params.R0 == 2.5);
  CHECK(r.config.params.rho == 0.3);
  CHECK(r.config.h == 0.02);

  {
    std::ofstream os(file);
    os << "surface = \"torus\"\nnot_an_option = 1\n";
  }
  r = parse({"check", "--config", file.string()});
  CHECK_FALSE(r.ok);
  CHECK(r.exit_code == exit_usage);
}

TEST_CASE("corpus-list report") {
  auto r = parse({"corpus-list"});
  REQUIRE(r.ok);
  const auto rep = run(r.config);
  CHECK(rep.exit_code == exit_pass);
  CHECK(rep.doc["schema"] == report_schema);
  CHECK(rep.doc["corpus"].size() == corpus_list().size());
}

TEST_CASE("check reports follow the expected profile") {
  auto r = parse({"check", "--surface", "torus", "--r", "1.0", "--h", "0.02"});
  REQUIRE(r.ok);
  auto rep = run(r.config);
  CHECK(rep.pass);
  CHECK(rep.exit_code == exit_pass);
  bool saw_S = false;
  for (const auto& c : rep.doc["components"]) {
    if (c["name"] == "condition_S") {
      saw_S = true;
      CHECK(c["observed"] == false);
      CHECK(c["ok"] == true);
    }
  }
  CHECK(saw_S);
  CHECK(rep.doc["results"]["condition_S"]["witnesses"].size() > 0);

  // Without the profile the expected failure becomes a real one.
  r = parse({"check", "--surface", "torus", "--r", "1.0", "--h", "0.02", "--no-profile"});
  REQUIRE(r.ok);
  rep = run(r.config);
  CHECK_FALSE(rep.pass);
  CHECK(rep.exit_code == exit_fail);

  // A radius beyond the S' limit of the torus is an unexpected failure.
  r = parse({"check", "--surface", "torus", "--r", "2.0", "--h", "0.02"});
  REQUIRE(r.ok);
  rep = run(r.config);
  CHECK(rep.exit_code == exit_fail);
}

TEST_CASE("curve entries use the curve checks") {
  auto r = parse({"check", "--surface", "slanted_tube", "--h", "0.02"});
  REQUIRE(r.ok);
  const auto rep = run(r.config);
  CHECK(rep.pass);
  CHECK(rep.doc["results"].contains("pairwise_main_assumption"));
  CHECK(rep.doc["results"]["symmetry"]["symmetric"] == false);
}

TEST_CASE("reports are deterministic and round-trip") {
  const auto dir = temp_dir("report");
  auto args = std::vector<std::string>{"all", "--surface", "perturbed_sphere", "--h", "0.01", "--delta", "0.3",
                                       "--audit", "2", "--out", (dir / "a.json").string(), "--csv-dir",
                                       (dir / "csv").string()};
  auto r1 = parse(args);
  REQUIRE(r1.ok);
  const auto a = run(r1.config);
  args[args.size() - 3] = (dir / "b.json").string();
  auto r2 = parse(args);
  const auto b = run(r2.config);
  CHECK(a.pass);
  CHECK(strip_timings(a.doc) == strip_timings(b.doc));

  std::ifstream is(dir / "a.json");
  const json back = json::parse(is);
  CHECK(back == a.doc);
  CHECK_FALSE(std::filesystem::exists(dir / "a.json.tmp"));

  CHECK(std::filesystem::exists(dir / "csv" / "surface.csv"));
  CHECK(std::filesystem::exists(dir / "csv" / "F.csv"));
  std::ifstream phi(dir / "csv" / "phi_delta_0.3.csv");
  std::string header;
  std::getline(phi, header);
  CHECK(header == "x1,x2,value");
}
