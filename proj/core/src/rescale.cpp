#include "henon/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "henon/errors.hpp"

namespace henon {

double rho_eps(int dim, double eps) {
  if (dim < 3 || !(eps > 0.0)) throw DomainError("rho_eps needs N >= 3 and eps > 0");
  return std::pow(eps, -1.0 / (dim - 2.0));
}

double kappa_eps(int dim, double alpha, double eps) {
  ProblemParams(dim, alpha, eps);
  const double p = threshold_exponent(dim, alpha) - eps;
  const double log_kappa =
      (std::log(henon_constant(dim, alpha)) - (2.0 + alpha) / (dim - 2.0) * std::log(eps)) / (1.0 - p);
  return std::exp(log_kappa);
}

RescaledProfile::RescaledProfile(std::shared_ptr<const RadialProfile> source) : source_(std::move(source)) {
  if (!source_) throw DomainError("rescale of a null profile");
  const auto& prm = source_->params();
  rho_ = henon::rho_eps(prm.dim(), prm.eps());
  kappa_ = kappa_eps(prm.dim(), prm.alpha(), prm.eps());
  w0_ = kappa_ * source_->u0();
  grid_.reserve(source_->grid().size());
  w_.reserve(source_->grid().size());
  for (std::size_t i = 0; i < source_->grid().size(); ++i) {
    grid_.push_back(rho_ * source_->grid()[i]);
    w_.push_back(kappa_ * source_->u()[i]);
  }
}

RescaledProfile rescale(const RadialProfile& profile) {
  return RescaledProfile(std::make_shared<const RadialProfile>(profile));
}

RescaledProfile rescale(std::shared_ptr<const RadialProfile> profile) { return RescaledProfile(std::move(profile)); }

double kappa_relation_residual(const RescaledProfile& rescaled) {
  const auto& prm = rescaled.params();
  const double lhs = std::pow(rescaled.kappa(), 1.0 - prm.exponent());
  const double rhs = henon_constant(prm.dim(), prm.alpha()) * std::pow(prm.eps(), -(2.0 + prm.alpha()) / (prm.dim() - 2.0));
  return std::abs(lhs - rhs) / rhs;
}

double rescaled_residual(const RescaledProfile& rescaled) {
  const auto& prm = rescaled.params();
  const auto& tab = rescaled.source().table();
  const double alpha = prm.alpha();
  const double p = prm.exponent();
  const double c = henon_constant(prm.dim(), alpha);
  const double nm1 = prm.dim() - 1.0;
  std::vector<double> r(tab.r.size()), w(tab.r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = rescaled.rho_eps() * tab.r[i];
    w[i] = rescaled.kappa() * tab.u[i];
  }
  return log_grid_residual(r, w, tab.log_step, [&](double x, double f, double d1, double d2) {
    const double src = c * std::pow(x, alpha) * std::pow(std::abs(f), p - 1.0) * f;
    const double drift = nm1 / x * d1;
    return std::pair{d2 + drift + src, std::abs(d2) + std::abs(drift) + std::abs(src)};
  });
}

namespace {

template <class F>
void for_each_node(const RescaledProfile& rescaled, F&& f) {
  for (std::size_t i = 0; i < rescaled.grid().size(); ++i) f(rescaled.grid()[i], rescaled.w()[i]);
  const auto& tab = rescaled.source().table();
  for (std::size_t i = 0; i < tab.r.size(); ++i) f(rescaled.rho_eps() * tab.r[i], rescaled.kappa() * tab.u[i]);
}

}  // namespace

double limit_distance(const RescaledProfile& rescaled) {
  const auto& prm = rescaled.params();
  const int n = prm.dim();
  const double alpha = prm.alpha();
  const double lambda = limit_lambda(n, alpha);
  double worst = 0.0;
  for_each_node(rescaled, [&](double r, double w) {
    worst = std::max(worst, std::abs(w - limit_profile(r, lambda, n, alpha)));
  });
  const double rho = rescaled.rho_eps();
  constexpr int tail = 200;
  for (int i = 0; i < tail; ++i) {
    const double r = rho * std::pow(10.0, static_cast<double>(i) / (tail - 1));
    worst = std::max(worst, limit_profile(r, lambda, n, alpha));
  }
  return worst;
}

double uniform_bound_constant(const RescaledProfile& rescaled) {
  const auto& prm = rescaled.params();
  const double alpha = prm.alpha();
  const double e = (prm.dim() - 2.0) / (2.0 + alpha);
  double c = 0.0;
  for_each_node(rescaled, [&](double r, double w) { c = std::max(c, w * std::pow(1.0 + std::pow(r, 2.0 + alpha), e)); });
  return c;
}

double uniform_bound_constant_closed(int dim, double alpha) {
  const double lambda = limit_lambda(dim, alpha);
  const double n2 = dim - 2.0;
  return std::pow(lambda, n2 / 2.0) * std::max(1.0, std::pow(lambda, -n2));
}

UniformBoundSweep uniform_bound_sweep(std::span<const RescaledProfile> sweep) {
  UniformBoundSweep out;
  if (sweep.empty()) return out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : sweep) {
    const double c = uniform_bound_constant(r);
    out.constants.push_back(c);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  out.spread = hi / lo;
  out.holds = out.spread < 10.0;
  return out;
}

}  // namespace henon
