#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pspin/cli.hpp"

namespace fs = std::filesystem;
using namespace pspin;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("pspin_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "pspin");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string out(const std::string& name) { return (scratch() / name).string(); }

// Value of "# key=value" in a CSV header.
std::string header_value(const std::string& csv, const std::string& key) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line) && line.rfind("#", 0) == 0) {
    if (line.rfind("# " + key + "=", 0) == 0) return line.substr(key.size() + 3);
  }
  return "<missing>";
}

}  // namespace

TEST_CASE("size lists") {
  CHECK(cli::parse_size_list("40:160:20") == std::vector<int>{40, 60, 80, 100, 120, 140, 160});
  CHECK(cli::parse_size_list("4:6") == std::vector<int>{4, 5, 6});
  CHECK(cli::parse_size_list("10, 30") == std::vector<int>{10, 30});
  CHECK(cli::parse_size_list("7") == std::vector<int>{7});
  CHECK_THROWS_AS(cli::parse_size_list("40:20"), DomainError);
  CHECK_THROWS_AS(cli::parse_size_list("40:60:0"), DomainError);
  CHECK_THROWS_AS(cli::parse_size_list("forty"), DomainError);
  CHECK_THROWS_AS(cli::parse_size_list("0,10"), DomainError);
}

TEST_CASE("orders, temperatures and points") {
  CHECK(cli::parse_order("inf").infinite);
  CHECK(cli::parse_order("11").p == 11);
  CHECK(cli::parse_beta("inf").is_infinite());
  CHECK(cli::parse_beta("2.5").value() == 2.5);
  CHECK_THROWS_AS(cli::parse_beta("-1"), DomainError);
  const auto pts = cli::parse_points("0:0.1, 0.99:0.1,1:1");
  REQUIRE(pts.size() == 3);
  CHECK(pts[1] == SchedulePoint{0.99, 0.1});
  CHECK_THROWS_AS(cli::parse_points("0.5"), DomainError);
}

TEST_CASE("exit codes") {
  CHECK(run({"--help"}) == cli::kExitOk);
  CHECK(run({}) == cli::kExitConfig);
  CHECK(run({"bogus"}) == cli::kExitConfig);
  CHECK(run({"slice", "--lambda", "0.1"}) == cli::kExitConfig);
  CHECK(run({"slice", "--p", "3", "--lambda", "1.5", "--output", out("bad")}) == cli::kExitConfig);
  CHECK(run({"slice", "--p", "2", "--lambda", "0.5", "--output", out("bad")}) == cli::kExitConfig);
  CHECK(run({"gap", "--p", "5", "--N", "0", "--lambda", "0.1", "--output", out("bad")}) == cli::kExitConfig);
  CHECK(run({"slice", "--p", "3", "--lambda", "0.1", "--config", out("missing.cfg")}) == cli::kExitConfig);
  CHECK(run({"matrix-dump", "--p", "3", "--N", "2", "--operator", "X"}) == cli::kExitConfig);
}

TEST_CASE("matrix dump of the target operator") {
  REQUIRE(run({"matrix-dump", "--p", "3", "--N", "2", "--s", "1", "--lambda", "1", "--output", out("m")}) == 0);
  const std::string csv = slurp(out("m.csv"));
  CHECK(csv.find("0,0,2\n") != std::string::npos);
  CHECK(csv.find("1,1,0\n") != std::string::npos);
  CHECK(csv.find("2,2,-2\n") != std::string::npos);
  CHECK(header_value(csv, "operator") == "H");
}

TEST_CASE("slice output") {
  REQUIRE(run({"slice", "--p", "3", "--lambda", "0.1", "--output", out("s3")}) == 0);
  const std::string t = slurp(out("s3_transitions.csv"));
  CHECK(t.find(",first,") != std::string::npos);
  CHECK(t.find("0.354") != std::string::npos);

  REQUIRE(run({"slice", "--p", "7", "--lambda", "0", "--format", "json", "--output", out("s7")}) == 0);
  const auto j = nlohmann::json::parse(slurp(out("s7.json")));
  REQUIRE(j["transitions"].size() == 1);
  CHECK(j["transitions"][0]["order"] == "second");
  CHECK(std::abs(j["transitions"][0]["s"].get<double>() - 1.0 / 3.0) < 1e-4);
  CHECK(j["degenerate_line"] == true);
}

TEST_CASE("identical configuration gives byte-identical files") {
  const std::vector<std::string> args = {"gap", "--p", "5", "--N", "30", "--lambda", "0.1", "--s-points", "201"};
  auto a = args;
  a.insert(a.end(), {"--output", out("g1")});
  auto b = args;
  b.insert(b.end(), {"--output", out("g2")});
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  std::string x = slurp(out("g1_curve.csv"));
  std::string y = slurp(out("g2_curve.csv"));
  // Only the recorded output prefix differs.
  x.replace(x.find(out("g1")), out("g1").size(), "X");
  y.replace(y.find(out("g2")), out("g2").size(), "X");
  CHECK(x == y);
  CHECK(slurp(out("g1_minima.csv")).size() > 0);
}

TEST_CASE("flags beat the config file, which beats the environment") {
  {
    std::ofstream cfg(out("run.cfg"));
    cfg << "# comment\np = 5\nlambda = 0.6\ns-points = 11\nthreads = 1\n";
  }
  ::setenv("PSPIN_THREADS", "2", 1);
  REQUIRE(run({"slice", "--config", out("run.cfg"), "--lambda", "0.2", "--output", out("c1")}) == 0);
  std::string csv = slurp(out("c1.csv"));
  CHECK(header_value(csv, "lambda") == "0.2");
  CHECK(header_value(csv, "s-points") == "11");
  CHECK(header_value(csv, "threads") == "1");

  REQUIRE(run({"slice", "--p", "5", "--lambda", "0.2", "--s-points", "11", "--output", out("c2")}) == 0);
  CHECK(header_value(slurp(out("c2.csv")), "threads") == "2");

  REQUIRE(run({"slice", "--p", "5", "--lambda", "0.2", "--s-points", "11", "--threads", "3", "--output", out("c3")}) == 0);
  CHECK(header_value(slurp(out("c3.csv")), "threads") == "3");
  ::unsetenv("PSPIN_THREADS");
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch() / "envdir";
  ::setenv("PSPIN_OUTPUT_DIR", dir.c_str(), 1);
  REQUIRE(run({"matrix-dump", "--p", "3", "--N", "3", "--output", "dump"}) == 0);
  ::unsetenv("PSPIN_OUTPUT_DIR");
  CHECK(fs::exists(dir / "dump.csv"));
}

TEST_CASE("phase diagram, scaling and anneal commands") {
  REQUIRE(run({"phase-diagram", "--p", "inf", "--s-points", "41", "--lambda-points", "41", "--output", out("pd")}) == 0);
  const auto pd = nlohmann::json::parse(slurp(out("pd_boundaries.json")));
  CHECK(pd["polylines"].size() >= 3);
  CHECK(pd["header"]["command"] == "phase-diagram");

  REQUIRE(run({"scaling", "--p", "5", "--lambda", "0.1", "--N", "10:40:10", "--s-points", "401", "--format", "json",
               "--output", out("sc")}) == 0);
  const auto sc = nlohmann::json::parse(slurp(out("sc.json")));
  REQUIRE(sc["fits"].size() == 2);
  CHECK(sc["fits"][0]["model"] == "power");
  CHECK(sc["minima"].size() == 4);

  REQUIRE(run({"anneal", "--p", "5", "--N", "4", "--tau", "2", "--lambda", "0.1", "--compare-lambda", "0.7",
               "--series-stride", "100", "--output", out("an")}) == 0);
  const auto an = nlohmann::json::parse(slurp(out("an.json")));
  REQUIRE(an["runs"].size() == 2);
  CHECK(an["runs"][0]["fidelity"].get<double>() > 0.0);
  CHECK(fs::exists(out("an_series0.csv")));
  CHECK(fs::exists(out("an_series1.csv")));

  CHECK(run({"anneal", "--p", "5", "--N", "4", "--tau", "2", "--output", out("an2")}) == cli::kExitConfig);
}
