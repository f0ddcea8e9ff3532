#pragma once

// Radial solutions of -Δu = |x|^alpha u^p on the unit ball by shooting.
//
// The initial value problem u'' + (N-1)/r u' + r^alpha u^p = 0, u(0) = a,
// u'(0) = 0 is integrated from a short series start. Its first zero R fixes
// the Dirichlet solution through the scaling u_R(r) = R^{(2+alpha)/(p-1)} u(R r).

#include <optional>
#include <span>
#include <vector>

#include "henon/ode.hpp"
#include "henon/scalar.hpp"

namespace henon {

struct SolverOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double r_max = 1e5;          ///< shot radius limit, in units of the amplitude's natural length
  double start_scale = 1e-6;   ///< series start r0 relative to the natural length a^{-(p-1)/(2+alpha)}
  double zero_rtol = 1e-12;    ///< relative tolerance of the polished first zero
  double table_log_step = 0.005;
  double graded_start = 1e-6;
  double graded_ratio = 1.05;
  double graded_end = 0.1;
  int uniform_points = 2000;
  ode::Method method = ode::Method::dop853;
};

struct ShotTrajectory {
  double amplitude = 0;
  std::vector<double> r, u, du;  ///< accepted steps, starting at the series point
  std::optional<double> first_zero;
  double slope_at_zero = 0;
  double r_max = 0;
};

/// Shoots the radial IVP with u(0) = amplitude. r_max is an absolute radius.
/// Throws DomainError for p outside (1, p_alpha] and IntegrationError on step failure.
ShotTrajectory integrate_radial_ivp(int dim, double alpha, double p, double amplitude, double r_max,
                                    const SolverOptions& options = {});

/// Values (u, u') of the shot at the requested ascending radii, all of which
/// must lie before its first zero.
struct ShotSamples {
  std::vector<double> u, du;
};
ShotSamples sample_radial_ivp(int dim, double alpha, double p, double amplitude, std::span<const double> radii,
                              const SolverOptions& options = {});

/// Log-uniform samples of a profile on [r_first, 1]; the last node is r = 1.
struct ProfileTable {
  double log_start = 0;
  double log_step = 0;
  std::vector<double> r, u, du, d2u;
};

class RadialProfile {
 public:
  RadialProfile(ProblemParams params, std::vector<double> grid, std::vector<double> u, std::vector<double> du,
                double u0, double first_zero_raw, double integrator_tol, ProfileTable table);

  const ProblemParams& params() const noexcept { return params_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& du() const noexcept { return du_; }
  double u0() const noexcept { return u0_; }
  double mu() const noexcept { return mu_; }
  double first_zero_raw() const noexcept { return first_zero_raw_; }
  double integrator_tol() const noexcept { return integrator_tol_; }
  const ProfileTable& table() const noexcept { return table_; }

  /// u(r) for any r >= 0: series near the origin, quintic Hermite on the
  /// table, zero outside the ball.
  double value(double r) const;
  double slope(double r) const;

 private:
  double series_value(double r) const;
  double series_slope(double r) const;
  std::size_t locate(double r) const;

  ProblemParams params_;
  std::vector<double> grid_, u_, du_;
  double u0_, mu_, first_zero_raw_, integrator_tol_;
  ProfileTable table_;
};

/// The unique positive radial solution of the Dirichlet problem.
/// Throws NoZeroError if the shot stays positive up to options.r_max.
RadialProfile solve_dirichlet_ball(const ProblemParams& params, const SolverOptions& options = {},
                                   double amplitude = 1.0);

/// Relative residual of the Fowler-transformed equation
/// v'' + (m-1)/t v' + v^{(m+2)/(m-2)-eps} = 0, v(t) = c u(t^{2/(2+alpha)}),
/// with derivatives taken by five-point differences of v alone.
double fowler_check(const RadialProfile& profile);

/// Relative residual of the original ODE from five-point
/// differences of the tabulated u.
double ode_residual(const RadialProfile& profile);

/// min over the grid of (bound - u) for the pointwise envelope
/// u(r) <= [mu^{(p_a-1-2eps)/4} / (mu^{(p_a-1-eps)/2} + r^{2+alpha}/C)]^{(N-2)/(2+alpha)}.
double decay_bound(const RadialProfile& profile, double r);
double decay_bound_check(const RadialProfile& profile);

struct SupNormRow {
  double eps;
  double u0;
  double eps_u0_sq;
  double big_m;
  double ratio;
  double mu_pow_eps;
};

struct SupNormTable {
  int dim;
  double alpha;
  std::vector<SupNormRow> rows;
  double extrapolated;        ///< linear Richardson extrapolation of eps*u0^2 to eps = 0
  double extrapolated_ratio;  ///< extrapolated / M
};

SupNormTable sup_norm_table(int dim, double alpha, std::span<const double> eps_list,
                            const SolverOptions& options = {});

/// Residual of a second order radial ODE from five-point differences on
/// log-uniform nodes. `terms` receives (r, f, f', f'') and returns
/// {residual, magnitude}; both are weighted by r^2 and the max residual is
/// divided by the max magnitude.
template <class Terms>
double log_grid_residual(std::span<const double> r, std::span<const double> f, double log_step, Terms&& terms);

}  // namespace henon

#include <algorithm>
#include <cmath>

template <class Terms>
double henon::log_grid_residual(std::span<const double> r, std::span<const double> f, double h, Terms&& terms) {
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 2; i + 2 < f.size(); ++i) {
    const double fs = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    const double fss = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
    const double x = r[i];
    const double d1 = fs / x;
    const double d2 = (fss - fs) / (x * x);
    const auto [res, mag] = terms(x, f[i], d1, d2);
    worst = std::max(worst, std::abs(res) * x * x);
    scale = std::max(scale, mag * x * x);
  }
  return scale > 0.0 ? worst / scale : 0.0;
}
