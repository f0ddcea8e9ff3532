#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "henon/errors.hpp"
#include "henon/rescale.hpp"

using namespace henon;

namespace {

std::shared_ptr<const RadialProfile> solved(int n, double a, double e) {
  return std::make_shared<const RadialProfile>(solve_dirichlet_ball(ProblemParams(n, a, e)));
}

// sup over a dense log grid on (0, 10 rho], independent of the stored nodes.
double dense_distance(const RescaledProfile& w) {
  const int n = w.params().dim();
  const double a = w.params().alpha();
  const double lam = limit_lambda(n, a);
  double d = std::abs(w.w0() - limit_profile(0.0, lam, n, a));
  const double top = std::log(10 * w.rho_eps());
  for (double s = std::log(1e-6); s <= top; s += 1e-3) {
    const double r = std::exp(s);
    d = std::max(d, std::abs(w.value(r) - limit_profile(r, lam, n, a)));
  }
  return d;
}

}  // namespace

TEST_CASE("scale factors") {
  CHECK(rho_eps(3, 0.01) == doctest::Approx(100.0));
  CHECK(rho_eps(4, 0.04) == doctest::Approx(5.0));
  // kappa^{1-p} = C eps^{-(2+a)/(N-2)}
  for (auto [n, a, e] : {std::tuple{3, 2.0, 0.05}, {4, 1.0, 0.2}}) {
    const double p = threshold_exponent(n, a) - e;
    const double k = kappa_eps(n, a, e);
    CHECK(std::pow(k, 1 - p) == doctest::Approx(henon_constant(n, a) * std::pow(e, -(2 + a) / (n - 2.0))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rho_eps(3, 0.0), DomainError);
}

TEST_CASE("rescaled profile is consistent with its source") {
  const auto src = solved(3, 2.0, 0.05);
  const auto w = rescale(src);
  CHECK(w.w0() == doctest::Approx(w.kappa() * src->u0()));
  CHECK(w.grid().back() == doctest::Approx(w.rho_eps()));
  CHECK(std::abs(w.w().back()) < 1e-10 * w.w0());
  for (std::size_t i = 0; i < w.grid().size(); i += 97)
    CHECK(w.w()[i] == doctest::Approx(w.kappa() * src->value(w.grid()[i] / w.rho_eps())).epsilon(1e-12));
  CHECK(kappa_relation_residual(w) < 1e-12);
  CHECK(rescaled_residual(w) < 1e-6);
}

TEST_CASE("rescaled profiles approach the bubble") {
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    CAPTURE(a);
    double prev = INFINITY, prev_w0 = INFINITY;
    const double u0 = limit_profile(0.0, limit_lambda(3, a), 3, a);
    for (double e : {0.1, 0.05, 0.02, 0.01}) {
      const auto w = rescale(solved(3, a, e));
      const double d = limit_distance(w);
      CHECK(d < prev);
      CHECK(std::abs(w.w0() - u0) < prev_w0);
      // the stored nodes plus tail must capture the dense supremum
      const double dense = dense_distance(w);
      CHECK(d == doctest::Approx(dense).epsilon(1e-2));
      prev = d;
      prev_w0 = std::abs(w.w0() - u0);
    }
    CHECK(prev < 0.02 * u0);
  }
}

TEST_CASE("uniform bound constant") {
  for (double a : {0.0, 1.0, 3.0}) {
    // brute-force envelope constant of the bubble
    const double lam = limit_lambda(3, a);
    double c = 0;
    for (double s = -12; s < 8; s += 1e-4) {
      const double r = std::exp(s);
      c = std::max(c, limit_profile(r, lam, 3, a) * std::pow(1 + std::pow(r, 2 + a), 1.0 / (2 + a)));
    }
    CHECK(uniform_bound_constant_closed(3, a) == doctest::Approx(c).epsilon(1e-6));
    const auto w = rescale(solved(3, a, 0.01));
    CHECK(uniform_bound_constant(w) == doctest::Approx(c).epsilon(0.05));
  }
  std::vector<RescaledProfile> sweep;
  for (double e : {0.1, 0.05, 0.02, 0.01}) sweep.push_back(rescale(solved(3, 1.0, e)));
  const auto ub = uniform_bound_sweep(sweep);
  CHECK(ub.constants.size() == 4);
  CHECK(ub.holds);
  CHECK(ub.spread < 1.5);
}
