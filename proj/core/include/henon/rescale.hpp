#pragma once

// w(r) = kappa u(r / rho) on the ball of radius rho = eps^{-1/(N-2)}, with
// kappa^{1-p} = C_{N,alpha} eps^{-(2+alpha)/(N-2)}. w solves
// -Δw = C_{N,alpha} |x|^alpha w^p and tends to the entire-space bubble.

#include <memory>
#include <span>
#include <vector>

#include "henon/radial.hpp"

namespace henon {

class RescaledProfile {
 public:
  explicit RescaledProfile(std::shared_ptr<const RadialProfile> source);

  const ProblemParams& params() const noexcept { return source_->params(); }
  const RadialProfile& source() const noexcept { return *source_; }
  double rho_eps() const noexcept { return rho_; }
  double kappa() const noexcept { return kappa_; }
  double w0() const noexcept { return w0_; }
  /// Rescaled stored grid on [0, rho] and the values of w there.
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& w() const noexcept { return w_; }

  /// w(r) for r >= 0; zero outside the ball.
  double value(double r) const { return kappa_ * source_->value(r / rho_); }
  double slope(double r) const { return kappa_ / rho_ * source_->slope(r / rho_); }

 private:
  std::shared_ptr<const RadialProfile> source_;
  double rho_, kappa_, w0_;
  std::vector<double> grid_, w_;
};

RescaledProfile rescale(const RadialProfile& profile);
RescaledProfile rescale(std::shared_ptr<const RadialProfile> profile);

/// rho_eps = eps^{-1/(N-2)} and kappa from its defining relation, in log space.
double rho_eps(int dim, double eps);
double kappa_eps(int dim, double alpha, double eps);

/// |kappa^{1-p} - C eps^{-(2+alpha)/(N-2)}| relative to the right side.
double kappa_relation_residual(const RescaledProfile& rescaled);

/// Relative residual of -Δw = C r^alpha w^p on the rescaled table nodes.
double rescaled_residual(const RescaledProfile& rescaled);

/// sup |w - U_alpha| over the rescaled nodes and a log tail on [rho, 10 rho].
double limit_distance(const RescaledProfile& rescaled);

/// Smallest C with w(r) <= C / (1 + r^{2+alpha})^{(N-2)/(2+alpha)} on the nodes.
double uniform_bound_constant(const RescaledProfile& rescaled);

/// The same constant for the bubble U_alpha itself, by algebra.
double uniform_bound_constant_closed(int dim, double alpha);

struct UniformBoundSweep {
  std::vector<double> constants;
  double spread = 0;  ///< max / min over the sweep
  bool holds = false; ///< spread < 10
};
UniformBoundSweep uniform_bound_sweep(std::span<const RescaledProfile> sweep);

}  // namespace henon
