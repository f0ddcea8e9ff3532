#include <charconv>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "henon/verify.hpp"

using namespace henon;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("henon-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

double parse(const std::string& s) {
  double x = 0;
  std::from_chars(s.data(), s.data() + s.size(), x);
  return x;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t a = 0;
  while (a < text.size()) {
    const auto b = text.find('\n', a);
    out.push_back(text.substr(a, b - a));
    a = b + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("doubles round-trip through 17 significant digits") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 5000; ++i) {
    const double x = std::ldexp(mant(rng), ex(rng));
    REQUIRE(parse(io::format_double(x)) == x);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(96.0) == "96");
  CHECK(io::format_double(-2.5e-300).find(',') == std::string::npos);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("profile JSON round-trips exactly") {
  const auto prof = solve_dirichlet_ball(ProblemParams(3, 2.0, 0.05));
  const auto text = io::profile_to_json(prof);
  CHECK(text.find("\"schema_version\"") != std::string::npos);
  const auto back = io::profile_from_json(text);
  CHECK(back.u0() == prof.u0());
  CHECK(back.u() == prof.u());
  CHECK(back.table().d2u == prof.table().d2u);
  CHECK(back.value(0.37) == prof.value(0.37));
  CHECK(io::profile_to_json(back) == text);
  CHECK_THROWS_AS(io::profile_from_json("{"), DomainError);
  CHECK_THROWS_AS(io::profile_from_json(R"({"schema_version": 99, "kind": "profile"})"), DomainError);
}

TEST_CASE("atomic writes leave no temporaries") {
  const auto dir = scratch_dir("atomic");
  const auto path = dir / "out.json";
  io::write_atomic(path, "first");
  io::write_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
  CHECK_THROWS(io::write_atomic(dir / "missing" / "x.json", "data"));
  fs::remove_all(dir);
}

TEST_CASE("disk profile store") {
  const auto dir = scratch_dir("store");
  io::DiskProfileStore store(dir / "cache");
  const ProblemParams prm(4, 1.0, 0.2);
  const auto key = ProfileCache::key(prm, SolverOptions{});
  CHECK(store.load(key) == nullptr);
  const auto prof = solve_dirichlet_ball(prm);
  store.save(key, prof);
  CHECK(fs::exists(store.path_for(key)));
  const auto back = store.load(key);
  REQUIRE(back != nullptr);
  CHECK(back->u() == prof.u());
  CHECK(store.load(key + "x") == nullptr);
  // a corrupt entry is a miss
  io::write_atomic(store.path_for(key), "not json");
  CHECK(store.load(key) == nullptr);
  fs::remove_all(dir);
}

TEST_CASE("cache directory from the environment") {
  ::setenv("HENON_CACHE_DIR", "/tmp/henon-x", 1);
  CHECK(io::default_cache_dir() == fs::path("/tmp/henon-x"));
  ::unsetenv("HENON_CACHE_DIR");
  ::setenv("XDG_CACHE_HOME", "/tmp/xdg", 1);
  CHECK(io::default_cache_dir() == fs::path("/tmp/xdg/henon"));
}

TEST_CASE("flat config parser") {
  const auto c = io::parse_config("# sweep\nN = 3\n alpha=0.5,1 # inline\n\neps = 0.01\n");
  CHECK(c.size() == 3);
  CHECK(c.at("N") == "3");
  CHECK(c.at("alpha") == "0.5,1");
  CHECK(c.at("eps") == "0.01");
  CHECK_THROWS_AS(io::parse_config("N 3\n"), DomainError);
  CHECK_THROWS_AS(io::parse_config("= 3\n"), DomainError);
}

TEST_CASE("spectrum CSV layout") {
  EigenResult e;
  e.j = 1;
  e.lambda = -5.9999999;
  e.node_count = 0;
  e.error_estimate = 1e-7;
  const auto csv = io::spectrum_csv({{2.0, 0.05, e}});
  const auto ls = lines(csv);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "alpha,eps,j,lambda,node_count,error_estimate");
  CHECK(ls[1] == "2,0.050000000000000003,1,-5.9999998999999997,0,9.9999999999999995e-08");
}

TEST_CASE("sweep rows are sorted by eps desc then alpha asc") {
  std::vector<io::SweepRow> rows;
  for (double e : {0.01, 0.1, 0.05})
    for (double a : {2.0, 0.5, 1.0}) {
      io::SweepRow r;
      r.dim = 3;
      r.alpha = a;
      r.eps = e;
      if (a == 1.0 && e == 0.05) r.error = "failed, badly";
      rows.push_back(r);
    }
  const auto ls = lines(io::sweep_csv(rows));
  REQUIRE(ls.size() == 10);
  CHECK(ls[0] == "N,alpha,eps,u0,lambda1,lambda2,v1,limit_distance,error");
  CHECK(ls[1].rfind("3,0.5,0.10000000000000001,", 0) == 0);
  CHECK(ls[3].rfind("3,2,0.10000000000000001,", 0) == 0);
  CHECK(ls[5] == "3,1,0.050000000000000003,,,,,,failed; badly");
  CHECK(ls[9].rfind("3,2,0.01,", 0) == 0);
}

TEST_CASE("verify report round-trips") {
  VerifyReport r;
  r.criteria.push_back({3, "sup-norm-asymptotics", "within 2%", 0.0059, 0.02, true, 0.02, "ok"});
  r.criteria.push_back({7, "radial-nondegeneracy", "> 1e-3", std::nan(""), 1e-3, false, 0.3, "error: x"});
  r.overall_pass = false;
  r.runtime_s = 0.32;
  const auto text = report_to_json(r);
  const auto back = report_from_json(text);
  CHECK(report_to_json(back) == text);
  CHECK(back.criteria.size() == 2);
  CHECK(std::isnan(back.criteria[1].measured));
  CHECK_THROWS_AS(report_from_json("[]"), DomainError);
}
