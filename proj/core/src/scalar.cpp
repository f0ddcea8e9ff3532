#include "henon/scalar.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "henon/errors.hpp"

namespace henon {

namespace {

void require_dim(int dim) {
  if (dim < 3) throw DomainError("dimension N must be >= 3, got " + std::to_string(dim));
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be finite and >= 0");
}

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  // Gamma(x) for x >= 0.5.
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  const double half = 0.5 * (z + 0.5);
  // t^(z+1/2) split in two halves to stay finite up to x ~ 171.
  const double p = std::pow(t, half);
  return std::sqrt(2.0 * std::numbers::pi) * p * (p * std::exp(-t)) * sum;
}

}  // namespace

ProblemParams::ProblemParams(int dim, double alpha, double eps) : dim_(dim), alpha_(alpha), eps_(eps) {
  require_dim(dim);
  require_alpha(alpha);
  const double pa = threshold_exponent(dim, alpha);
  if (!(eps > 0.0) || !(eps < pa - 1.0))
    throw DomainError("eps must lie in (0, p_alpha - 1) = (0, " + std::to_string(pa - 1.0) + ")");
}

double ProblemParams::threshold() const noexcept { return threshold_exponent(dim_, alpha_); }

double ProblemParams::exponent() const noexcept { return threshold() - eps_; }

double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma: argument must be positive and finite");
  if (x == std::floor(x) && x <= 171.0) {
    double f = 1.0;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  if (x < 0.5) {
    // Reflection keeps the Lanczos sum in its accurate range.
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  return lanczos_gamma(x);
}

double threshold_exponent(int dim, double alpha) {
  require_dim(dim);
  require_alpha(alpha);
  return (dim + 2.0 + 2.0 * alpha) / (dim - 2.0);
}

double henon_constant(int dim, double alpha) {
  require_dim(dim);
  require_alpha(alpha);
  return (dim - 2.0) * (dim + alpha);
}

double fowler_dimension(int dim, double alpha) {
  require_dim(dim);
  require_alpha(alpha);
  return 2.0 * (dim + alpha) / (2.0 + alpha);
}

double sup_norm_constant(int dim, double alpha) {
  const double c = henon_constant(dim, alpha);
  const double n = dim;
  const double a2 = 2.0 + alpha;
  const double g_num = gamma(2.0 * (n + alpha) / a2);
  const double g_den = gamma((n + alpha) / a2);
  return (2.0 * a2 / (n - 2.0)) * std::pow(c, (n - 2.0) / a2) * g_num / (g_den * g_den);
}

double limit_lambda(int dim, double alpha) {
  // lambda^{(N-2)/2} = C^{-(N-2)/(2(2+alpha))} M^{1/2}
  const double c = henon_constant(dim, alpha);
  const double m = sup_norm_constant(dim, alpha);
  return std::pow(c, -1.0 / (2.0 + alpha)) * std::pow(m, 1.0 / (dim - 2.0));
}

LimitConstants limit_constants(int dim, double alpha) {
  return {henon_constant(dim, alpha), sup_norm_constant(dim, alpha), limit_lambda(dim, alpha),
          fowler_dimension(dim, alpha)};
}

double limit_profile(double r, double lambda, int dim, double alpha) {
  const double a2 = 2.0 + alpha;
  const double n2 = dim - 2.0;
  return std::pow(lambda, 0.5 * n2) / std::pow(1.0 + std::pow(lambda * r, a2), n2 / a2);
}

double lambda1_closed(int dim, double alpha) { return -(alpha + 2.0) * (2.0 * dim + alpha - 2.0) / 4.0; }

double lambda1_closed_expanded(int dim, double alpha) {
  return -alpha * alpha / 4.0 - alpha * dim / 2.0 + 1.0 - dim;
}

SphereEigen sphere_eigen(int dim, int k) {
  require_dim(dim);
  if (k < 0) throw DomainError("spherical harmonic degree k must be >= 0");
  const std::int64_t n = dim;
  const std::int64_t kk = k;
  // (N+2k-2)(N+k-3)!/((N-2)! k!) = (N+2k-2) * binom(N+k-3, k) / (N-2)
  std::int64_t binom = 1;
  for (std::int64_t i = 1; i <= kk; ++i) {
    // binom(N-3+i, i) = binom(N-3+i-1, i-1) * (N-3+i) / i, cancelled by gcd first
    std::int64_t num = n - 3 + i;
    std::int64_t den = i;
    const std::int64_t g1 = std::gcd(num, den);
    num /= g1;
    den /= g1;
    const std::int64_t g2 = std::gcd(binom, den);
    binom = (binom / g2) * num;
    den /= g2;
    binom /= den;  // den == 1 here since binom(.,i) is an integer
  }
  std::int64_t factor = n + 2 * kk - 2;
  std::int64_t div = n - 2;
  const std::int64_t g = std::gcd(factor, div);
  factor /= g;
  div /= g;
  const std::int64_t mult = (binom / div) * factor;
  return {static_cast<double>(kk * (n + kk - 2)), mult};
}

double bifurcation_alpha(int k) {
  if (k < 1) throw DomainError("bifurcation index k must be >= 1");
  return 2.0 * (k - 1);
}

double first_eigenfunction_closed(double r, double lambda, int dim, double alpha) {
  const double a2 = 2.0 + alpha;
  const double x = std::pow(lambda * r, a2);
  return std::pow(lambda * r, 0.5 * a2) / std::pow(1.0 + x, (dim + alpha) / a2);
}

}  // namespace henon
