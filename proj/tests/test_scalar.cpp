#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "henon/errors.hpp"
#include "henon/scalar.hpp"

using namespace henon;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double big_gamma(double x) { return static_cast<double>(boost::multiprecision::tgamma(big(x))); }

// (2(2+a)/(N-2)) C^{(N-2)/(2+a)} Gamma(2(N+a)/(2+a)) / Gamma((N+a)/(2+a))^2 in 50 digits.
double big_sup_norm(int n, double a) {
  const big c = big(n - 2) * big(n + a);
  const big a2 = big(2) + big(a);
  const big g1 = boost::multiprecision::tgamma(big(2) * (big(n) + big(a)) / a2);
  const big g2 = boost::multiprecision::tgamma((big(n) + big(a)) / a2);
  return static_cast<double>(big(2) * a2 / big(n - 2) * pow(c, big(n - 2) / a2) * g1 / (g2 * g2));
}

// dim P_k - dim P_{k-2} for homogeneous polynomials in N variables.
long long harmonic_dim(int n, int k) {
  auto homog = [&](int d) -> long long {
    if (d < 0) return 0;
    return std::llround(boost::math::binomial_coefficient<double>(n + d - 1, d));
  };
  return homog(k) - homog(k - 2);
}

}  // namespace

TEST_CASE("gamma against a 50-digit reference") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.5, 3.0, 4.2, 7.5, 12.25, 30.0, 100.0}) {
    CAPTURE(x);
    CHECK(henon::gamma(x) == doctest::Approx(big_gamma(x)).epsilon(1e-13));
  }
  CHECK(henon::gamma(5.0) == 24.0);
  CHECK(henon::gamma(1.0) == 1.0);
}

TEST_CASE("threshold exponent and Fowler dimension") {
  CHECK(threshold_exponent(3, 0) == 5.0);
  CHECK(threshold_exponent(3, 2) == 9.0);
  CHECK(threshold_exponent(4, 0) == 3.0);
  CHECK(fowler_dimension(3, 2) == doctest::Approx(2.5));
  CHECK(fowler_dimension(4, 0) == doctest::Approx(4.0));
  CHECK(henon_constant(3, 1) == 4.0);
  // Fowler map sends p_alpha to the unweighted critical exponent in dimension m.
  for (double a : {0.0, 0.5, 1.0, 3.0}) {
    const double m = fowler_dimension(3, a);
    CHECK(threshold_exponent(3, a) == doctest::Approx((m + 2) / (m - 2)).epsilon(1e-14));
  }
}

TEST_CASE("sup-norm constant and bubble scale") {
  CHECK(sup_norm_constant(4, 0) == doctest::Approx(96.0).epsilon(1e-13));
  CHECK(sup_norm_constant(3, 0) == doctest::Approx(32.0 * std::sqrt(3.0) / std::numbers::pi).epsilon(1e-13));
  CHECK(limit_lambda(3, 0) == doctest::Approx(32.0 / std::numbers::pi).epsilon(1e-13));
  CHECK(limit_lambda(4, 0) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-13));
  for (int n : {3, 4, 5})
    for (double a : {0.0, 0.5, 1.0, 2.0, 4.5}) {
      CAPTURE(n);
      CAPTURE(a);
      CHECK(sup_norm_constant(n, a) == doctest::Approx(big_sup_norm(n, a)).epsilon(1e-12));
      // U(0)^2 = lambda^{N-2} = M / C^{(N-2)/(2+alpha)}
      const double lam = limit_lambda(n, a);
      CHECK(std::pow(lam, n - 2.0) * std::pow(henon_constant(n, a), (n - 2.0) / (2.0 + a)) ==
            doctest::Approx(sup_norm_constant(n, a)).epsilon(1e-12));
    }
}

TEST_CASE("bubble solves the entire-space equation") {
  for (double a : {0.0, 1.0, 2.0}) {
    const int n = 3;
    const double lam = limit_lambda(n, a), c = henon_constant(n, a);
    const double p = threshold_exponent(n, a);
    for (double r : {0.05, 0.3, 1.0, 4.0}) {
      // scale-free bubble: lambda^{(N-2)/2} (1 + (lambda r)^{2+a})^{-(N-2)/(2+a)} solves -Δu = C |x|^a u^p
      auto u = [&](double x) { return limit_profile(x, lam, n, a); };
      const double h = 1e-4 * r;
      const double d1 = (u(r + h) - u(r - h)) / (2 * h);
      const double d2 = (u(r + h) - 2 * u(r) + u(r - h)) / (h * h);
      const double res = -(d2 + (n - 1) / r * d1) - c * std::pow(r, a) * std::pow(u(r), p);
      CHECK(std::abs(res) < 1e-5 * std::abs(d2) + 1e-8);
    }
  }
}

TEST_CASE("limit first eigenvalue in both forms") {
  CHECK(lambda1_closed(3, 2) == -6.0);
  CHECK(lambda1_closed(3, 0) == -2.0);
  CHECK(lambda1_closed(4, 2) == -8.0);
  for (int n : {3, 4, 6})
    for (double a : {0.0, 0.3, 1.0, 2.0, 7.0}) CHECK(lambda1_closed(n, a) == doctest::Approx(lambda1_closed_expanded(n, a)));
  for (int k = 1; k <= 6; ++k)
    for (int n : {3, 4, 5}) CHECK(lambda1_closed(n, bifurcation_alpha(k)) == doctest::Approx(-sphere_eigen(n, k).sigma));
}

TEST_CASE("sphere eigenvalues and multiplicities") {
  CHECK(sphere_eigen(3, 2).sigma == 6.0);
  CHECK(sphere_eigen(3, 2).multiplicity == 5);
  CHECK(sphere_eigen(4, 2).multiplicity == 9);
  CHECK(sphere_eigen(3, 0).multiplicity == 1);
  for (int n = 3; n <= 8; ++n)
    for (int k = 0; k <= 12; ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(sphere_eigen(n, k).multiplicity == harmonic_dim(n, k));
      CHECK(sphere_eigen(n, k).sigma == double(k) * (n + k - 2));
    }
}

TEST_CASE("first limit eigenfunction") {
  const int n = 3;
  const double a = 1.0, lam = limit_lambda(n, a);
  const double c = henon_constant(n, a), p = threshold_exponent(n, a);
  const double big_lambda = lambda1_closed(n, a);
  auto z = [&](double r) { return first_eigenfunction_closed(r, lam, n, a); };
  for (double r : {0.01, 0.2, 1.0, 3.0}) {
    const double h = 1e-4 * r;
    const double d1 = (z(r + h) - z(r - h)) / (2 * h), d2 = (z(r + h) - 2 * z(r) + z(r - h)) / (h * h);
    const double pot = p * c * std::pow(r, a) * std::pow(limit_profile(r, lam, n, a), p - 1);
    const double res = -(d2 + (n - 1) / r * d1) - pot * z(r) - big_lambda * z(r) / (r * r);
    CHECK(std::abs(res) < 1e-5 * (std::abs(d2) + std::abs(z(r)) / (r * r)));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(ProblemParams(2, 1, 0.1), DomainError);
  CHECK_THROWS_AS(ProblemParams(3, -0.5, 0.1), DomainError);
  CHECK_THROWS_AS(ProblemParams(3, 1, 0.0), DomainError);
  CHECK_THROWS_AS(ProblemParams(3, 1, -0.1), DomainError);
  CHECK_THROWS_AS(ProblemParams(3, 0, 4.0), DomainError);
  CHECK_THROWS_AS(ProblemParams(3, std::nan(""), 0.1), DomainError);
  CHECK_THROWS_AS(sphere_eigen(3, -1), DomainError);
  CHECK_THROWS_AS(bifurcation_alpha(0), DomainError);
  CHECK_NOTHROW(ProblemParams(3, 0, 3.99));
  const ProblemParams p(4, 1, 0.5);
  CHECK(p.exponent() == doctest::Approx(threshold_exponent(4, 1) - 0.5));
}
