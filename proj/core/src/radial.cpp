#include "henon/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/roots.hpp"

namespace henon {

namespace {

using Shot = ode::AdaptiveStepper<2>;

void validate_ivp(int dim, double alpha, double p, double amplitude, const SolverOptions& opt) {
  const double pa = threshold_exponent(dim, alpha);
  if (!(p > 1.0) || p > pa * (1.0 + 1e-15)) {
    std::ostringstream os;
    os << "exponent p = " << p << " outside (1, p_alpha = " << pa << "]";
    throw DomainError(os.str());
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("shot amplitude must be positive");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integrator tolerances must be positive");
}

ode::Rhs<2> radial_rhs(int dim, double alpha, double p) {
  const double nm1 = dim - 1.0;
  return [=](double r, const ode::State<2>& y, ode::State<2>& dy) {
    const double u = y[0];
    const double weight = alpha == 0.0 ? 1.0 : std::pow(r, alpha);
    dy[0] = y[1];
    dy[1] = -nm1 / r * y[1] - weight * std::pow(std::abs(u), p - 1.0) * u;
  };
}

double natural_length(double alpha, double p, double amplitude) {
  return std::pow(amplitude, -(p - 1.0) / (2.0 + alpha));
}

// Leading terms of the regular solution at the origin.
ode::State<2> series_start(int dim, double alpha, double p, double amplitude, double r) {
  const double c = std::pow(amplitude, p) / ((2.0 + alpha) * (dim + alpha));
  return {amplitude - c * std::pow(r, 2.0 + alpha), -c * (2.0 + alpha) * std::pow(r, 1.0 + alpha)};
}

ode::StepControl control_of(const SolverOptions& opt) {
  ode::StepControl c;
  c.rtol = opt.rtol;
  c.atol = opt.atol;
  return c;
}

}  // namespace

ShotTrajectory integrate_radial_ivp(int dim, double alpha, double p, double amplitude, double r_max,
                                    const SolverOptions& opt) {
  validate_ivp(dim, alpha, p, amplitude, opt);
  const double r0 = opt.start_scale * natural_length(alpha, p, amplitude);
  if (!(r_max > r0)) throw DomainError("r_max must exceed the series start radius");

  ShotTrajectory out;
  out.amplitude = amplitude;
  out.r_max = r_max;
  Shot stepper(opt.method, radial_rhs(dim, alpha, p), control_of(opt));
  const auto y0 = series_start(dim, alpha, p, amplitude, r0);
  stepper.reset(r0, y0);
  out.r.push_back(r0);
  out.u.push_back(y0[0]);
  out.du.push_back(y0[1]);

  while (stepper.step_toward(r_max)) {
    const auto& y = stepper.y();
    if (y[0] <= 0.0) {
      const double t0 = stepper.t_prev();
      const auto y_prev = stepper.y_prev();
      const double h = stepper.t() - t0;
      double zero = stepper.t();
      ode::State<2> at = y;
      if (y[0] < 0.0) {
        auto miss = [&](double s) { return stepper.trial_step(t0, y_prev, s)[0]; };
        const auto root = find_root(miss, 0.0, h, y_prev[0], y[0], opt.zero_rtol * t0, 0.0);
        zero = t0 + root.x;
        at = stepper.trial_step(t0, y_prev, root.x);
      }
      out.first_zero = zero;
      out.slope_at_zero = at[1];
      out.r.push_back(zero);
      out.u.push_back(at[0]);
      out.du.push_back(at[1]);
      break;
    }
    out.r.push_back(stepper.t());
    out.u.push_back(y[0]);
    out.du.push_back(y[1]);
  }
  return out;
}

ShotSamples sample_radial_ivp(int dim, double alpha, double p, double amplitude, std::span<const double> radii,
                              const SolverOptions& opt) {
  validate_ivp(dim, alpha, p, amplitude, opt);
  if (!std::is_sorted(radii.begin(), radii.end())) throw DomainError("sample radii must be ascending");
  const double r0 = opt.start_scale * natural_length(alpha, p, amplitude);
  Shot stepper(opt.method, radial_rhs(dim, alpha, p), control_of(opt));
  stepper.reset(r0, series_start(dim, alpha, p, amplitude, r0));

  ShotSamples out;
  out.u.reserve(radii.size());
  out.du.reserve(radii.size());
  for (const double r : radii) {
    if (r <= r0) {
      const auto s = series_start(dim, alpha, p, amplitude, r);
      out.u.push_back(s[0]);
      out.du.push_back(s[1]);
      continue;
    }
    while (stepper.t() < r) stepper.step_toward(r);
    out.u.push_back(stepper.y()[0]);
    out.du.push_back(stepper.y()[1]);
  }
  return out;
}

RadialProfile::RadialProfile(ProblemParams params, std::vector<double> grid, std::vector<double> u,
                             std::vector<double> du, double u0, double first_zero_raw, double integrator_tol,
                             ProfileTable table)
    : params_(params),
      grid_(std::move(grid)),
      u_(std::move(u)),
      du_(std::move(du)),
      u0_(u0),
      mu_(1.0 / (u0 * u0)),
      first_zero_raw_(first_zero_raw),
      integrator_tol_(integrator_tol),
      table_(std::move(table)) {
  if (grid_.size() != u_.size() || grid_.size() != du_.size())
    throw DomainError("profile grid and value arrays differ in length");
  if (table_.r.size() < 2 || table_.u.size() != table_.r.size() || table_.du.size() != table_.r.size() ||
      table_.d2u.size() != table_.r.size())
    throw DomainError("profile table is malformed");
}

double RadialProfile::series_value(double r) const {
  const double a = params_.alpha();
  const double c = std::pow(u0_, params_.exponent()) / ((2.0 + a) * (params_.dim() + a));
  return u0_ - c * std::pow(r, 2.0 + a);
}

double RadialProfile::series_slope(double r) const {
  const double a = params_.alpha();
  const double c = std::pow(u0_, params_.exponent()) / (params_.dim() + a);
  return -c * std::pow(r, 1.0 + a);
}

std::size_t RadialProfile::locate(double r) const {
  const std::size_t last = table_.r.size() - 2;
  const double x = (std::log(r) - table_.log_start) / table_.log_step;
  std::size_t i = x <= 0.0 ? 0 : std::min(static_cast<std::size_t>(x), last);
  while (i > 0 && table_.r[i] > r) --i;
  while (i < last && table_.r[i + 1] < r) ++i;
  return i;
}

double RadialProfile::value(double r) const {
  if (r < 0.0) throw DomainError("negative radius");
  if (r > 1.0) return 0.0;
  if (r <= table_.r.front()) return series_value(r);
  const std::size_t i = locate(r);
  const double h = table_.r[i + 1] - table_.r[i];
  const double t = (r - table_.r[i]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 0.5 * (t3 - 2 * t4 + t5);
  return table_.u[i] * h0 + h * table_.du[i] * h1 + h * h * table_.d2u[i] * h2 + table_.u[i + 1] * h3 +
         h * table_.du[i + 1] * h4 + h * h * table_.d2u[i + 1] * h5;
}

double RadialProfile::slope(double r) const {
  if (r < 0.0) throw DomainError("negative radius");
  if (r > 1.0) return 0.0;
  if (r <= table_.r.front()) return series_slope(r);
  const std::size_t i = locate(r);
  const double h = table_.r[i + 1] - table_.r[i];
  const double t = (r - table_.r[i]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double h0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double h1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double h2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double h3 = 30 * t2 - 60 * t3 + 30 * t4;
  const double h4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double h5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  return (table_.u[i] * h0 + h * table_.du[i] * h1 + h * h * table_.d2u[i] * h2 + table_.u[i + 1] * h3 +
          h * table_.du[i + 1] * h4 + h * h * table_.d2u[i + 1] * h5) /
         h;
}

RadialProfile solve_dirichlet_ball(const ProblemParams& params, const SolverOptions& opt, double amplitude) {
  const int n = params.dim();
  const double alpha = params.alpha();
  const double p = params.exponent();
  const double length = natural_length(alpha, p, amplitude);

  const auto shot = integrate_radial_ivp(n, alpha, p, amplitude, opt.r_max * length, opt);
  if (!shot.first_zero) {
    std::ostringstream os;
    os << "no zero of the shot within r_max = " << shot.r_max << " (supercritical or r_max too small)";
    throw NoZeroError(os.str());
  }
  const double big_r = *shot.first_zero;
  const double beta = (2.0 + alpha) / (p - 1.0);
  const double u0 = amplitude * std::pow(big_r, beta);

  // Log-uniform table from the series start to r = 1.
  ProfileTable table;
  const double r_first = opt.start_scale * length / big_r;
  table.log_start = std::log(r_first);
  const auto nodes = static_cast<std::size_t>(std::max(8.0, std::ceil(-table.log_start / opt.table_log_step) + 1));
  table.log_step = -table.log_start / static_cast<double>(nodes - 1);
  table.r.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) table.r[i] = std::exp(table.log_start + table.log_step * i);
  table.r.front() = r_first;
  table.r.back() = 1.0;

  std::vector<double> grid{0.0};
  for (double r = opt.graded_start; r < opt.graded_end * (1 - 1e-12); r *= opt.graded_ratio) grid.push_back(r);
  const int m = std::max(2, opt.uniform_points);
  for (int j = 0; j < m; ++j) grid.push_back(opt.graded_end + (1.0 - opt.graded_end) * j / (m - 1.0));
  grid.back() = 1.0;

  // One pass over the union of both node sets, in shot coordinates.
  std::vector<double> radii;
  radii.reserve(nodes + grid.size());
  for (double r : table.r) radii.push_back(r * big_r);
  for (std::size_t i = 1; i < grid.size(); ++i) radii.push_back(grid[i] * big_r);
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] < radii[b]; });
  std::vector<double> sorted(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = radii[order[i]];
  const auto samples = sample_radial_ivp(n, alpha, p, amplitude, sorted, opt);

  const double su = std::pow(big_r, beta);
  const double sdu = su * big_r;
  std::vector<double> u_all(radii.size()), du_all(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    u_all[order[i]] = su * samples.u[i];
    du_all[order[i]] = sdu * samples.du[i];
  }
  table.u.assign(u_all.begin(), u_all.begin() + nodes);
  table.du.assign(du_all.begin(), du_all.begin() + nodes);
  table.d2u.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double r = table.r[i];
    const double w = alpha == 0.0 ? 1.0 : std::pow(r, alpha);
    table.d2u[i] = -(n - 1.0) / r * table.du[i] - w * std::pow(std::abs(table.u[i]), p - 1.0) * table.u[i];
  }
  std::vector<double> gu{u0}, gdu{0.0};
  gu.insert(gu.end(), u_all.begin() + nodes, u_all.end());
  gdu.insert(gdu.end(), du_all.begin() + nodes, du_all.end());

  return RadialProfile(params, std::move(grid), std::move(gu), std::move(gdu), u0, big_r, opt.rtol,
                       std::move(table));
}

double fowler_check(const RadialProfile& profile) {
  const auto& prm = profile.params();
  const double alpha = prm.alpha();
  const double eps = prm.eps();
  const double m = fowler_dimension(prm.dim(), alpha);
  const double q = (m + 2.0) / (m - 2.0) - eps;
  const double c = std::pow(2.0 / (2.0 + alpha), 2.0 / (prm.threshold() - 1.0 - eps));
  const auto& tab = profile.table();
  const double stretch = 0.5 * (2.0 + alpha);
  std::vector<double> t(tab.r.size()), v(tab.r.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = std::pow(tab.r[i], stretch);
    v[i] = c * tab.u[i];
  }
  return log_grid_residual(t, v, tab.log_step * stretch, [&](double x, double f, double d1, double d2) {
    const double src = std::pow(std::abs(f), q - 1.0) * f;
    const double drift = (m - 1.0) / x * d1;
    return std::pair{d2 + drift + src, std::abs(d2) + std::abs(drift) + std::abs(src)};
  });
}

double ode_residual(const RadialProfile& profile) {
  const auto& prm = profile.params();
  const double alpha = prm.alpha();
  const double p = prm.exponent();
  const double nm1 = prm.dim() - 1.0;
  const auto& tab = profile.table();
  return log_grid_residual(tab.r, tab.u, tab.log_step, [&](double x, double f, double d1, double d2) {
    const double src = std::pow(x, alpha) * std::pow(std::abs(f), p - 1.0) * f;
    const double drift = nm1 / x * d1;
    return std::pair{d2 + drift + src, std::abs(d2) + std::abs(drift) + std::abs(src)};
  });
}

double decay_bound(const RadialProfile& profile, double r) {
  const auto& prm = profile.params();
  const double pa = prm.threshold();
  const double eps = prm.eps();
  const double alpha = prm.alpha();
  const double mu = profile.mu();
  const double c = henon_constant(prm.dim(), alpha);
  const double num = std::pow(mu, (pa - 1.0 - 2.0 * eps) / 4.0);
  const double den = std::pow(mu, (pa - 1.0 - eps) / 2.0) + std::pow(r, 2.0 + alpha) / c;
  return std::pow(num / den, (prm.dim() - 2.0) / (2.0 + alpha));
}

double decay_bound_check(const RadialProfile& profile) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.grid().size(); ++i)
    worst = std::min(worst, decay_bound(profile, profile.grid()[i]) - profile.u()[i]);
  const auto& tab = profile.table();
  for (std::size_t i = 0; i < tab.r.size(); ++i) worst = std::min(worst, decay_bound(profile, tab.r[i]) - tab.u[i]);
  return worst;
}

SupNormTable sup_norm_table(int dim, double alpha, std::span<const double> eps_list, const SolverOptions& opt) {
  if (eps_list.size() < 2) throw DomainError("sup_norm_table needs at least two eps values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw DomainError("eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw DomainError("eps list must be strictly decreasing");
  }
  SupNormTable table{dim, alpha, {}, 0.0, 0.0};
  const double big_m = sup_norm_constant(dim, alpha);
  for (const double eps : eps_list) {
    const auto profile = solve_dirichlet_ball(ProblemParams(dim, alpha, eps), opt);
    const double u0 = profile.u0();
    const double e2 = eps * u0 * u0;
    table.rows.push_back({eps, u0, e2, big_m, e2 / big_m, std::pow(profile.mu(), eps)});
  }
  const auto& a = table.rows[table.rows.size() - 2];
  const auto& b = table.rows.back();
  table.extrapolated = b.eps_u0_sq - b.eps * (a.eps_u0_sq - b.eps_u0_sq) / (a.eps - b.eps);
  table.extrapolated_ratio = table.extrapolated / big_m;
  return table;
}

}  // namespace henon
