#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/spectral.hpp"

namespace henon {

std::vector<EigenResult> eigenvalues(const SLProblem& problem, int count, const SpectralOptions& opt) {
  if (opt.levels < 1) throw DomainError("at least one grid level is required");
  std::vector<std::vector<double>> raw;
  std::vector<std::size_t> sizes;
  Pencil finest;
  SLGrid finest_grid;
  for (int l = 0; l < opt.levels; ++l) {
    auto grid = make_grid(problem, opt.ratio, 1 << l);
    auto pen = assemble_pencil(problem, grid);
    raw.push_back(pencil_eigenvalues(pen, count, opt.bisection_tol));
    sizes.push_back(pen.diag.size());
    if (l + 1 == opt.levels) {
      finest = std::move(pen);
      finest_grid = std::move(grid);
    }
  }

  std::vector<EigenResult> out;
  const std::size_t last = raw.size() - 1;
  for (int j = 0; j < count; ++j) {
    EigenResult e;
    e.j = j + 1;
    e.grid_sizes = sizes;
    for (const auto& level : raw) e.raw.push_back(level[j]);
    if (last >= 2) {
      const double fine = (4.0 * raw[last][j] - raw[last - 1][j]) / 3.0;
      const double prev = (4.0 * raw[last - 1][j] - raw[last - 2][j]) / 3.0;
      e.lambda = fine;
      e.error_estimate = std::abs(fine - prev);
    } else if (last == 1) {
      e.lambda = (4.0 * raw[1][j] - raw[0][j]) / 3.0;
      e.error_estimate = std::abs(raw[1][j] - raw[0][j]) / 3.0;
    } else {
      e.lambda = raw[0][j];
      e.error_estimate = 0.0;
    }
    const auto z = pencil_eigenvector(finest, raw[last][j]);
    e.r = finest_grid.r;
    e.z.assign(e.r.size(), 0.0);
    const std::size_t offset = finest.left_unknown ? 0 : 1;
    std::copy(z.begin(), z.end(), e.z.begin() + static_cast<std::ptrdiff_t>(offset));
    e.node_count = sign_changes(e.z);
    if (e.node_count != j) {
      std::ostringstream os;
      os << "eigenvector " << j + 1 << " has " << e.node_count << " sign changes";
      throw NumericalError(os.str());
    }
    out.push_back(std::move(e));
  }
  return out;
}

SLProblem unit_ball_problem(const RadialProfile& profile, double r_first) {
  const auto& prm = profile.params();
  auto shared = std::make_shared<const RadialProfile>(profile);
  const double p = prm.exponent();
  const double alpha = prm.alpha();
  SLProblem pr;
  pr.dim = prm.dim();
  pr.r_first = r_first / rho_eps(prm.dim(), prm.eps());
  pr.r_split = 1.0;
  pr.r_end = 1.0;
  pr.q = [shared, p, alpha](double r) {
    const double u = std::max(shared->value(r), 0.0);
    return p * std::pow(r, alpha) * std::pow(u, p - 1.0);
  };
  return pr;
}

SLProblem rho_ball_problem(const RescaledProfile& rescaled, double r_first) {
  const auto& prm = rescaled.params();
  auto shared = std::make_shared<const RescaledProfile>(rescaled);
  const double p = prm.exponent();
  const double alpha = prm.alpha();
  const double c = henon_constant(prm.dim(), alpha);
  SLProblem pr;
  pr.dim = prm.dim();
  pr.r_first = r_first;
  pr.r_split = 1.0;
  pr.r_end = rescaled.rho_eps();
  pr.q = [shared, p, alpha, c](double r) {
    const double w = std::max(shared->value(r), 0.0);
    return p * c * std::pow(r, alpha) * std::pow(w, p - 1.0);
  };
  return pr;
}

SLProblem limit_problem(int dim, double alpha, double r_trunc, double r_first) {
  if (!(r_trunc > 1.0)) throw DomainError("r_trunc must exceed 1");
  const double lam = std::pow(limit_lambda(dim, alpha), 2.0 + alpha);
  const double amp = threshold_exponent(dim, alpha) * henon_constant(dim, alpha) * lam;
  SLProblem pr;
  pr.dim = dim;
  pr.r_first = r_first;
  pr.r_split = 1.0;
  pr.r_end = r_trunc;
  pr.q = [=](double r) {
    const double d = 1.0 + lam * std::pow(r, 2.0 + alpha);
    return amp * std::pow(r, alpha) / (d * d);
  };
  return pr;
}

SLProblem radial_plain_problem(const RadialProfile& profile, double r_first) {
  auto pr = unit_ball_problem(profile, r_first);
  pr.weight = SpectralWeight::plain;
  pr.left = LeftBoundary::natural;
  return pr;
}

std::vector<EigenResult> unit_ball_spectrum(const RadialProfile& profile, int count, const SpectralOptions& opt) {
  return eigenvalues(unit_ball_problem(profile), count, opt);
}

LimitEigen limit_eigen(int dim, double alpha, double r_trunc, const SpectralOptions& opt) {
  LimitEigen out;
  out.dim = dim;
  out.alpha = alpha;
  out.r_trunc = r_trunc;
  out.at_r = eigenvalues(limit_problem(dim, alpha, r_trunc), 2, opt);
  out.at_2r = eigenvalues(limit_problem(dim, alpha, 2.0 * r_trunc), 2, opt);
  const double beta2 = 0.25 * (dim - 2.0) * (dim - 2.0);
  double extrapolated[2], sens[2], err[2];
  for (int j = 0; j < 2; ++j) {
    const double a = out.at_r[j].lambda;
    const double b = out.at_2r[j].lambda;
    const double k = std::sqrt(std::max(beta2 - b, 0.0));
    const double f = std::pow(2.0, 2.0 * k);
    extrapolated[j] = f > 1.0 ? b + (b - a) / (f - 1.0) : b;
    sens[j] = std::abs(b - a);
    err[j] = std::max(out.at_r[j].error_estimate, out.at_2r[j].error_estimate);
  }
  out.lambda1 = extrapolated[0];
  out.lambda2 = extrapolated[1];
  out.sensitivity1 = sens[0];
  out.sensitivity2 = sens[1];
  out.error1 = err[0];
  out.error2 = err[1];
  return out;
}

RadialKernel radial_kernel_test(const RadialProfile& profile, const SpectralOptions& opt) {
  const auto& prm = profile.params();
  const int n = prm.dim();
  const double alpha = prm.alpha();
  const double p = prm.exponent();
  const double big_r = profile.first_zero_raw();
  const double nm1 = n - 1.0;

  // Shot coordinates with amplitude 1: v(1) of the profile is v(R) here.
  ode::Rhs<4> rhs = [=](double t, const ode::State<4>& y, ode::State<4>& dy) {
    const double w = alpha == 0.0 ? 1.0 : std::pow(t, alpha);
    const double au = std::abs(y[0]);
    const double pw = std::pow(au, p - 1.0);
    dy[0] = y[1];
    dy[1] = -nm1 / t * y[1] - w * pw * y[0];
    dy[2] = y[3];
    dy[3] = -nm1 / t * y[3] - p * w * pw * y[2];
  };
  SolverOptions sopt;
  ode::StepControl ctl;
  ctl.rtol = profile.integrator_tol();
  ctl.atol = sopt.atol;
  const double t0 = sopt.start_scale;
  const double c = 1.0 / ((2.0 + alpha) * (n + alpha));
  const double t2 = std::pow(t0, 2.0 + alpha);
  const double t1 = std::pow(t0, 1.0 + alpha);
  ode::State<4> y0{1.0 - c * t2, -c * (2.0 + alpha) * t1, 1.0 - p * c * t2, -p * c * (2.0 + alpha) * t1};
  ode::AdaptiveStepper<4> stepper(ode::Method::dop853, rhs, ctl);
  stepper.reset(t0, y0);
  while (stepper.t() < big_r) stepper.step_toward(big_r);

  RadialKernel out;
  out.v1 = stepper.y()[2];
  out.dv1 = stepper.y()[3] * big_r;

  const auto plain = radial_plain_problem(profile);
  out.plain_negative = plain_negative_count(profile, opt);
  const auto eig = eigenvalues(plain, out.plain_negative + 1, opt);
  out.plain_gap = std::abs(eig.back().lambda);
  if (out.plain_negative > 0) out.plain_gap = std::min(out.plain_gap, std::abs(eig[out.plain_negative - 1].lambda));
  return out;
}

int plain_negative_count(const RadialProfile& profile, const SpectralOptions& opt) {
  const auto plain = radial_plain_problem(profile);
  const auto grid = make_grid(plain, opt.ratio, 1 << (std::max(opt.levels, 1) - 1));
  return static_cast<int>(sturm_count(assemble_pencil(plain, grid), 0.0));
}

double scale_equivalence_test(const RadialProfile& profile, const RescaledProfile& rescaled, int j_max,
                              const SpectralOptions& opt) {
  const auto a = unit_ball_spectrum(profile, j_max, opt);
  const auto b = eigenvalues(rho_ball_problem(rescaled), j_max, opt);
  double worst = 0.0;
  for (int j = 0; j < j_max; ++j) worst = std::max(worst, std::abs(a[j].lambda - b[j].lambda));
  return worst;
}

double eigfun_decay_check(const EigenResult& eig, int dim, double r_min) {
  double c = 0.0;
  for (std::size_t i = 0; i < eig.r.size(); ++i) {
    if (eig.r[i] < r_min) continue;
    c = std::max(c, std::abs(eig.z[i]) * std::pow(eig.r[i], dim - 2.0));
    if (i + 1 < eig.r.size()) {
      const double dr = eig.r[i + 1] - eig.r[i];
      const double rm = 0.5 * (eig.r[i + 1] + eig.r[i]);
      c = std::max(c, std::abs((eig.z[i + 1] - eig.z[i]) / dr) * std::pow(rm, dim - 1.0));
    }
  }
  return c;
}

double weighted_overlap(const SLProblem& problem, const EigenResult& a, const EigenResult& b,
                        const SpectralOptions& opt) {
  const auto grid = make_grid(problem, opt.ratio, 1 << (std::max(opt.levels, 1) - 1));
  const auto pen = assemble_pencil(problem, grid);
  if (a.z.size() != grid.r.size() || b.z.size() != grid.r.size())
    throw DomainError("eigenfunctions do not live on the finest grid of this problem");
  const std::size_t offset = pen.left_unknown ? 0 : 1;
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < pen.mass.size(); ++i) {
    const double za = a.z[i + offset], zb = b.z[i + offset];
    ab += pen.mass[i] * za * zb;
    aa += pen.mass[i] * za * za;
    bb += pen.mass[i] * zb * zb;
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace henon

namespace henon {

Lambda1Deviation lambda1_deviation(const RadialProfile& profile, const SpectralOptions& opt) {
  return lambda1_deviation(profile, unit_ball_spectrum(profile, 1, opt).front(), opt);
}

Lambda1Deviation lambda1_deviation(const RadialProfile& profile, const EigenResult& e, const SpectralOptions& opt) {
  const auto& prm = profile.params();
  const double alpha = prm.alpha();
  const auto problem = unit_ball_problem(profile);
  const auto grid = make_grid(problem, opt.ratio, 1 << (std::max(opt.levels, 1) - 1));
  const auto pen = assemble_pencil(problem, grid);
  if (e.j != 1 || e.z.size() != grid.r.size()) throw DomainError("first eigenfunction does not match the grid");
  const std::size_t offset = pen.left_unknown ? 0 : 1;

  auto psi = [&](double r) { return std::pow(r, -0.5 * alpha) * profile.slope(r); };
  double overlap = 0.0;
  for (std::size_t i = 0; i < pen.mass.size(); ++i) overlap += pen.mass[i] * e.z[i + offset] * psi(pen.r[i]);

  // Boundary flux from the last cell, moved to r = 1.
  const std::size_t n = e.r.size() - 1;
  const double slope = (e.z[n] - e.z[n - 1]) / (e.r[n] - e.r[n - 1]);
  const double dz1 = slope * std::pow(grid.r_mid[n - 1], prm.dim() - 1.0);

  Lambda1Deviation out;
  out.psi1 = profile.table().du.back();
  out.dz1 = dz1;
  out.overlap = overlap;
  out.delta = -out.psi1 * dz1 / overlap;
  return out;
}

}  // namespace henon
