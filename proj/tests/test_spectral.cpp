#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "henon/errors.hpp"
#include "henon/rescale.hpp"
#include "henon/spectral.hpp"

using namespace henon;

namespace {

constexpr double pi = std::numbers::pi;

SLProblem free_problem() {
  // q = 0, N = 3 on (1, e^pi): Lambda_j = 1/4 + j^2
  SLProblem pr;
  pr.dim = 3;
  pr.r_first = 1.0;
  pr.r_split = std::exp(pi);
  pr.r_end = std::exp(pi);
  pr.q = [](double) { return 0.0; };
  return pr;
}

struct Dense {
  Eigen::MatrixXd a, b;
};

Dense densify(const Pencil& pen) {
  const auto n = static_cast<Eigen::Index>(pen.diag.size());
  Dense d{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    d.a(i, i) = pen.diag[i];
    d.b(i, i) = pen.mass[i];
    if (i + 1 < n) d.a(i, i + 1) = d.a(i + 1, i) = pen.off[i];
  }
  return d;
}

std::shared_ptr<const RadialProfile> solved(int n, double a, double e) {
  return std::make_shared<const RadialProfile>(solve_dirichlet_ball(ProblemParams(n, a, e)));
}

}  // namespace

TEST_CASE("free problem matches the exact spectrum") {
  const auto eig = eigenvalues(free_problem(), 4);
  REQUIRE(eig.size() == 4);
  for (int j = 1; j <= 4; ++j) {
    CAPTURE(j);
    CHECK(std::abs(eig[j - 1].lambda - (0.25 + j * j)) < 1e-6);
    CHECK(eig[j - 1].node_count == j - 1);
    CHECK(eig[j - 1].error_estimate < 1e-4);
    CHECK(eig[j - 1].raw.size() == 3);
  }
}

TEST_CASE("bisection agrees with a dense generalized eigensolver") {
  const auto pr = free_problem();
  const auto grid = make_grid(pr, std::exp(pi / 200), 1);
  const auto pen = assemble_pencil(pr, grid);
  REQUIRE(pen.diag.size() >= 195);
  const auto d = densify(pen);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(d.a, d.b);
  REQUIRE(es.info() == Eigen::Success);
  const auto vals = pencil_eigenvalues(pen, 6);
  for (int j = 0; j < 6; ++j) {
    CAPTURE(j);
    CHECK(vals[j] == doctest::Approx(es.eigenvalues()(j)).epsilon(1e-9));
    // discretization error against the exact value stays second order
    CHECK(std::abs(vals[j] - (0.25 + (j + 1) * (j + 1))) < 1e-2 * (j + 1) * (j + 1));
  }
  for (double lam : {0.0, 1.0, 3.0, 10.0, 30.0}) {
    const auto below = (es.eigenvalues().array() < lam).count();
    CHECK(sturm_count(pen, lam) == static_cast<std::size_t>(below));
  }
  const auto v = pencil_eigenvector(pen, vals[2]);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data() + (v.size() - pen.diag.size()), pen.diag.size());
  Eigen::VectorXd y = es.eigenvectors().col(2);
  const double cosine = std::abs(x.dot(d.b * y)) / std::sqrt(x.dot(d.b * x) * y.dot(d.b * y));
  CHECK(cosine == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sign_changes(v) == 2);
}

TEST_CASE("plain weight with a natural left end") {
  // -Δz = mu z on the unit ball, radial: mu_j = (j pi)^2
  SLProblem pr;
  pr.dim = 3;
  pr.r_first = 1e-6;
  pr.r_split = 0.05;
  pr.r_end = 1.0;
  pr.q = [](double) { return 0.0; };
  pr.weight = SpectralWeight::plain;
  pr.left = LeftBoundary::natural;
  const auto eig = eigenvalues(pr, 3);
  for (int j = 1; j <= 3; ++j) CHECK(eig[j - 1].lambda == doctest::Approx(j * j * pi * pi).epsilon(1e-6));
}

TEST_CASE("limit problem first two eigenvalues") {
  for (auto [n, a] : {std::pair{3, 2.0}, {3, 0.0}, {4, 2.0}}) {
    CAPTURE(n);
    CAPTURE(a);
    const auto l = limit_eigen(n, a, 1e3);
    CHECK(std::abs(l.lambda1 - lambda1_closed(n, a)) < 1e-4);
    CHECK(std::abs(l.lambda2) < 1e-2);
    CHECK(l.sensitivity2 < 5e-3);
    CHECK(l.at_2r[0].node_count == 0);
    CHECK(l.at_2r[1].node_count == 1);
  }
  CHECK_THROWS_AS(limit_eigen(3, 2.0, 0.5), DomainError);
}

TEST_CASE("limit eigenfunction decay constant matches the closed form") {
  const int n = 3;
  const double a = 1.0, lam = limit_lambda(n, a);
  auto z = [&](double r) { return first_eigenfunction_closed(r, lam, n, a); };
  double sup = 0;
  for (double s = -8; s < 4; s += 1e-4) sup = std::max(sup, z(std::exp(s)));
  double c = 0;
  for (double s = -12; s < std::log(1e3); s += 1e-4) {
    const double r = std::exp(s), h = r * 1e-6;
    const double dz = (z(r + h) - z(r - h)) / (2 * h);
    c = std::max({c, std::abs(z(r)) / sup * std::pow(r, n - 2.0), std::abs(dz) / sup * std::pow(r, n - 1.0)});
  }
  const auto eig = eigenvalues(limit_problem(n, a, 1e3), 1);
  CHECK(eigfun_decay_check(eig[0], n, 0.0) == doctest::Approx(c).epsilon(2e-2));
}

TEST_CASE("unit-ball spectrum against the Pruefer oracle") {
  for (auto [n, a, e] : {std::tuple{3, 2.0, 0.05}, {4, 1.5, 1.0}}) {
    CAPTURE(n);
    CAPTURE(a);
    const auto prof = solved(n, a, e);
    const auto pr = unit_ball_problem(*prof);
    const auto eig = eigenvalues(pr, 3);
    for (const auto& ev : eig) {
      CHECK(ev.node_count == ev.j - 1);
      const double pv = prufer_eigen(pr, ev.j, ev.lambda - 0.05, ev.lambda + 0.05);
      CHECK(std::abs(ev.lambda - pv) < 1e-6);
      CHECK(prufer_count(pr, pv + 1e-6) == ev.j);
    }
    CHECK(eig[0].lambda < eig[1].lambda);
    CHECK(std::abs(weighted_overlap(pr, eig[0], eig[1])) < 1e-6);
    CHECK(weighted_overlap(pr, eig[0], eig[0]) == doctest::Approx(1.0));
  }
}

TEST_CASE("unit ball and rho ball give the same spectrum") {
  const auto prof = solved(3, 2.0, 0.05);
  CHECK(scale_equivalence_test(*prof, rescale(prof), 3) < 1e-6);
}

TEST_CASE("Green-identity deviation agrees with Pruefer") {
  for (auto [n, a, e] : {std::tuple{3, 1.5, 1.0}, {4, 2.5, 0.5}, {3, 2.0, 0.2}}) {
    CAPTURE(n);
    CAPTURE(a);
    CAPTURE(e);
    const auto prof = solved(n, a, e);
    const auto pr = unit_ball_problem(*prof);
    const auto eig = eigenvalues(pr, 1);
    const double pv = prufer_eigen(pr, 1, eig[0].lambda - 0.05, eig[0].lambda + 0.05);
    const auto dev = lambda1_deviation(*prof);
    const double gap = pv - lambda1_closed(n, a);
    CHECK(dev.delta == doctest::Approx(gap).epsilon(1e-3));
  }
}

TEST_CASE("radial kernel test") {
  const auto prof = solved(3, 2.0, 0.05);
  const auto k = radial_kernel_test(*prof);
  CHECK(std::abs(k.v1) > 1e-3);
  CHECK(k.plain_negative == 1);
  CHECK(k.plain_gap > 1e-6);
  CHECK(plain_negative_count(*prof) == 1);
}

TEST_CASE("spectral input validation") {
  CHECK_THROWS_AS(eigenvalues(free_problem(), 0), DomainError);
  SLProblem bad = free_problem();
  bad.r_first = 0.0;
  CHECK_THROWS_AS(eigenvalues(bad, 1), DomainError);
  bad = free_problem();
  bad.q = nullptr;
  CHECK_THROWS_AS(eigenvalues(bad, 1), DomainError);
}
