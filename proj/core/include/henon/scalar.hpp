#pragma once

#include <cstdint>

namespace henon {

/// One instance of -Δu = |x|^alpha u^(p_alpha - eps) on the unit ball of R^N.
class ProblemParams {
 public:
  /// Throws DomainError unless N >= 3, alpha >= 0 and 0 < eps < p_alpha - 1.
  ProblemParams(int dim, double alpha, double eps);

  int dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }
  double eps() const noexcept { return eps_; }

  /// p_alpha = (N + 2 + 2 alpha) / (N - 2).
  double threshold() const noexcept;
  /// p = p_alpha - eps.
  double exponent() const noexcept;

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

 private:
  int dim_;
  double alpha_;
  double eps_;
};

/// Constants of the entire-space limit problem.
struct LimitConstants {
  double c_na;      ///< (N-2)(N+alpha)
  double big_m;     ///< lim eps * u(0)^2
  double lambda;    ///< concentration scale of the limit bubble
  double m_fowler;  ///< 2(N+alpha)/(2+alpha)
};

/// Gamma function for x > 0 (Lanczos, g = 7); exact for small integers.
double gamma(double x);

double threshold_exponent(int dim, double alpha);
double henon_constant(int dim, double alpha);
double sup_norm_constant(int dim, double alpha);
double limit_lambda(int dim, double alpha);
double fowler_dimension(int dim, double alpha);
LimitConstants limit_constants(int dim, double alpha);

/// U_{lambda,alpha}(r), the radial bubble of the entire-space problem.
double limit_profile(double r, double lambda, int dim, double alpha);

/// First eigenvalue of the limit linearized problem, -(alpha+2)(2N+alpha-2)/4.
double lambda1_closed(int dim, double alpha);
/// The expanded form -alpha^2/4 - alpha N/2 + 1 - N of the same quantity.
double lambda1_closed_expanded(int dim, double alpha);

struct SphereEigen {
  double sigma;
  std::int64_t multiplicity;
};

/// k-th eigenvalue k(N+k-2) of the Laplace-Beltrami operator on S^{N-1}
/// and the dimension of its eigenspace, computed in exact integer arithmetic.
SphereEigen sphere_eigen(int dim, int k);

/// alpha_k = 2(k-1), the unique root of lambda1_closed(N, .) = -sigma_k.
double bifurcation_alpha(int k);

/// Positive eigenfunction of the limit problem belonging to lambda1_closed.
double first_eigenfunction_closed(double r, double lambda, int dim, double alpha);

}  // namespace henon
