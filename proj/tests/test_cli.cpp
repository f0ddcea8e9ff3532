#include <charconv>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "henon/io.hpp"
#include "henon/spectral.hpp"
#include "henon/verify.hpp"
#include "json.hpp"

using namespace henon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const auto d = [] {
    auto p = fs::temp_directory_path() / ("henon-cli-" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t a = 0;
    while (true) {
      const auto b = line.find(',', a);
      cells.push_back(line.substr(a, b == std::string::npos ? std::string::npos : b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) {
  double x = 0;
  std::from_chars(s.data(), s.data() + s.size(), x);
  return x;
}

}  // namespace

TEST_CASE("solve writes a profile document") {
  const auto path = (scratch() / "p.json").string();
  const auto r = run({"solve", "--N", "3", "--alpha", "2", "--eps", "0.05", "--out", path});
  REQUIRE(r.code == 0);
  const auto j = json::parse(io::read_file(path));
  CHECK(j["schema_version"] == io::schema_version);
  CHECK(j["u0"].get<double>() > 0);
  CHECK(std::abs(j["u"].back().get<double>()) < 1e-9);
  CHECK(j["grid"].back().get<double>() == 1.0);
  CHECK(j["params"]["N"] == 3);
  CHECK(j.contains("residuals"));
  CHECK(j.contains("mu"));
  CHECK(j.contains("du"));
}

TEST_CASE("validation errors exit with 2") {
  CHECK(run({"solve", "--eps", "0"}).code == 2);
  CHECK(run({"solve", "--N", "2"}).code == 2);
  CHECK(run({"solve", "--alpha", "-1"}).code == 2);
  CHECK(run({"solve", "--format", "xml"}).code == 2);
  CHECK(run({"solve", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"bifurcate", "--k", "1", "--eps", "0.01"}).code == 2);
  const auto r = run({"solve", "--eps", "0"});
  CHECK(r.err.find("eps") != std::string::npos);
  CHECK(run({"solve", "--help"}).code == 0);
}

TEST_CASE("a sweep without any successful row exits with 3") {
  const auto r = run({"sweep", "--N", "3", "--alpha", "-1,-2", "--eps", "0.05", "--no-cache"});
  CHECK(r.code == 3);
}

TEST_CASE("output is deterministic with and without the cache") {
  const auto a = run({"solve", "--alpha", "1", "--eps", "0.02", "--no-cache"});
  const auto b = run({"solve", "--alpha", "1", "--eps", "0.02", "--no-cache"});
  const auto c = run({"solve", "--alpha", "1", "--eps", "0.02"});
  const auto d = run({"solve", "--alpha", "1", "--eps", "0.02"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(a.out == d.out);
}

TEST_CASE("spectrum CSV") {
  const auto r = run({"spectrum", "--N", "3", "--alpha", "1,2", "--eps", "0.05", "--count", "3", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(r.out.substr(0, r.out.find('\n')) == "alpha,eps,j,lambda,node_count,error_estimate");
  for (std::size_t i = 2; i < rows.size(); ++i)
    if (rows[i][0] == rows[i - 1][0] && rows[i][1] == rows[i - 1][1]) CHECK(num(rows[i][2]) > num(rows[i - 1][2]));
  const auto lib = unit_ball_spectrum(solve_dirichlet_ball(ProblemParams(3, 2.0, 0.05)), 3);
  for (int j = 0; j < 3; ++j) {
    const auto& row = rows[4 + j];
    CHECK(num(row[0]) == 2.0);
    CHECK(num(row[3]) == lib[j].lambda);
    CHECK(num(row[5]) == lib[j].error_estimate);
    CHECK(std::stoi(row[4]) == lib[j].node_count);
  }
}

TEST_CASE("limit spectrum") {
  const auto r = run({"spectrum", "--limit", "--N", "3", "--alpha", "2", "--r-trunc", "1000"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(std::abs(j["lambda1"].get<double>() + 6) < 1e-4);
}

TEST_CASE("bifurcate reports alpha_k_eps near alpha_k") {
  const auto r = run({"bifurcate", "--N", "3", "--k", "2", "--eps", "0.01", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0][3] == "alpha_k_eps");
  CHECK(std::abs(num(rows[1][3]) - 2.0) < 1e-6);
  CHECK(num(rows[1][5]) < 1e-6);
}

TEST_CASE("sweep rows are sorted and failures recorded per row") {
  const auto r = run({"sweep", "--N", "3", "--alpha", "2,-1,0.5", "--eps", "0.05,0.1", "--jobs", "2", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].back() == "error");
  const std::vector<std::pair<double, double>> order{{0.1, -1}, {0.1, 0.5}, {0.1, 2}, {0.05, -1}, {0.05, 0.5}, {0.05, 2}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(num(rows[i + 1][2]) == order[i].first);
    CHECK(num(rows[i + 1][1]) == order[i].second);
    CHECK(rows[i + 1].back().empty() == (order[i].second >= 0));
  }
}

TEST_CASE("verify runs only the selected criterion") {
  const auto path = (scratch() / "report.json").string();
  const auto r = run({"verify", "--only", "3", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("[PASS]  3") != std::string::npos);
  const auto text = io::read_file(path);
  const auto j = json::parse(text);
  CHECK(j["criteria"].size() == 1);
  CHECK(j["criteria"][0]["id"] == 3);
  CHECK(j["overall_pass"] == true);
  CHECK(report_to_json(report_from_json(text)) == text);
  CHECK(run({"verify", "--only", "11"}).code == 2);
}

TEST_CASE("config file with flag precedence") {
  const auto cfg = scratch() / "run.cfg";
  io::write_atomic(cfg, "# solve setup\nN = 4\nalpha = 1\neps = 0.1\nno-cache = true\n");
  const auto r = run({"solve", "--config", cfg.string(), "--eps", "0.2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["params"]["N"] == 4);
  CHECK(j["params"]["alpha"] == 1.0);
  CHECK(j["params"]["eps"] == 0.2);
  io::write_atomic(cfg, "colour = blue\n");
  CHECK(run({"solve", "--config", cfg.string()}).code == 2);
  CHECK(run({"solve", "--config", (scratch() / "missing.cfg").string()}).code == 2);
}

TEST_CASE("unwritable output is an error") {
  const auto r = run({"solve", "--out", (scratch() / "no" / "such" / "dir.json").string()});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());
}
