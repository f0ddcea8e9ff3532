#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/spectral.hpp"

namespace henon {

SLGrid make_grid(const SLProblem& problem, double ratio, int refine) {
  if (!(problem.r_first > 0.0)) throw DomainError("spectral grid must start at r > 0");
  if (!(problem.r_end > problem.r_first)) throw DomainError("spectral domain is empty");
  if (!(ratio > 1.0) || refine < 1) throw DomainError("grid ratio must exceed 1 and refinement be positive");
  const double split = std::min(std::max(problem.r_split, problem.r_first), problem.r_end);

  const double span = std::log(split / problem.r_first);
  const double h0 = std::log(ratio);
  const long ng0 = span > 0.0 ? std::max(1L, static_cast<long>(std::ceil(span / h0 - 1e-9))) : 0L;
  const double hb = ng0 > 0 ? span / ng0 : h0;
  long nu0 = 0;
  double slope = split;
  if (problem.r_end > split) {
    nu0 = std::max(1L, static_cast<long>(std::ceil((problem.r_end - split) / (split * hb) - 1e-9)));
    slope = (problem.r_end - split) / (nu0 * hb);
  }
  const long ng = ng0 * refine;
  const long nu = nu0 * refine;

  SLGrid g;
  g.h = hb / refine;
  const std::size_t n = static_cast<std::size_t>(ng + nu) + 1;
  g.r.resize(n);
  g.gp.resize(n);
  for (long i = 0; i <= ng; ++i) {
    g.r[i] = problem.r_first * std::exp(g.h * i);
    g.gp[i] = g.r[i];
  }
  g.r[ng] = split;
  g.gp[ng] = nu > 0 ? 0.5 * (split + slope) : split;
  if (ng == 0) g.gp[0] = nu > 0 ? slope : split;
  for (long i = 1; i <= nu; ++i) {
    g.r[ng + i] = split + slope * g.h * i;
    g.gp[ng + i] = slope;
  }
  g.r.back() = problem.r_end;

  g.r_mid.resize(n - 1);
  g.gp_mid.resize(n - 1);
  for (long i = 0; i + 1 < static_cast<long>(n); ++i) {
    if (i < ng) {
      g.r_mid[i] = problem.r_first * std::exp(g.h * (i + 0.5));
      g.gp_mid[i] = g.r_mid[i];
    } else {
      g.r_mid[i] = split + slope * g.h * (i - ng + 0.5);
      g.gp_mid[i] = slope;
    }
  }
  return g;
}

Pencil assemble_pencil(const SLProblem& problem, const SLGrid& grid) {
  if (!problem.q) throw DomainError("spectral problem has no potential");
  if (grid.r.size() < 3) throw DomainError("spectral grid needs at least three nodes");
  if (!(grid.r.front() > 0.0)) throw DomainError("spectral grid touches r = 0");
  const double nm1 = problem.dim - 1.0;
  const double wexp = problem.weight == SpectralWeight::inverse_square ? problem.dim - 3.0 : nm1;
  const std::size_t n = grid.r.size() - 1;
  const double h = grid.h;

  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = std::pow(grid.r_mid[i], nm1) / (grid.gp_mid[i] * h);

  Pencil pen;
  pen.left_unknown = problem.left == LeftBoundary::natural;
  const std::size_t first = pen.left_unknown ? 0 : 1;
  for (std::size_t i = first; i < n; ++i) {
    const double r = grid.r[i];
    const double cell = i == 0 ? 0.5 * h * grid.gp[0] : h * grid.gp[i];
    const double pot = cell * std::pow(r, nm1) * problem.q(r);
    const double left = i == 0 ? 0.0 : k[i - 1];
    pen.r.push_back(r);
    pen.diag.push_back(left + k[i] - pot);
    pen.mass.push_back(cell * std::pow(r, wexp));
    if (i + 1 < n) pen.off.push_back(-k[i]);
  }
  return pen;
}

std::size_t sturm_count(const Pencil& pen, double lambda) {
  std::size_t neg = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < pen.diag.size(); ++i) {
    double a = pen.diag[i] - lambda * pen.mass[i];
    if (i > 0) a -= pen.off[i - 1] * pen.off[i - 1] / d;
    if (a == 0.0) a = -tiny;
    if (a < 0.0) ++neg;
    d = a;
  }
  return neg;
}

std::vector<double> pencil_eigenvalues(const Pencil& pen, int count, double tol) {
  const std::size_t n = pen.diag.size();
  if (count < 1) throw DomainError("eigenvalue count must be positive");
  if (static_cast<std::size_t>(count) > n) throw DomainError("more eigenvalues requested than unknowns");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double rad = 0.0;
    if (i > 0) rad += std::abs(pen.off[i - 1]) / std::sqrt(pen.mass[i - 1] * pen.mass[i]);
    if (i + 1 < n) rad += std::abs(pen.off[i]) / std::sqrt(pen.mass[i] * pen.mass[i + 1]);
    const double c = pen.diag[i] / pen.mass[i];
    lo = std::min(lo, c - rad);
    hi = std::max(hi, c + rad);
  }
  lo -= 1.0;
  hi += 1.0;

  std::vector<double> out;
  double floor = lo;
  for (int j = 0; j < count; ++j) {
    double a = floor, b = hi;
    int it = 0;
    while (b - a > tol * std::max(1.0, std::abs(0.5 * (a + b)))) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      if (sturm_count(pen, m) > static_cast<std::size_t>(j)) b = m;
      else a = m;
      if (++it > 400) throw BracketError("bisection did not converge", a, b);
    }
    out.push_back(0.5 * (a + b));
    floor = a;
  }
  return out;
}

namespace {

// Gaussian elimination with partial pivoting on a tridiagonal system.
std::vector<double> tridiagonal_solve(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                                      std::vector<double> b) {
  const std::size_t n = d.size();
  std::vector<double> du2(n, 0.0);
  const double tiny = 1e-300;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
      dl[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
      const double t = d[i + 1];
      d[i + 1] = du[i] - f * t;
      du[i] = t;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  std::vector<double> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    if (ii + 1 < n) s -= du[ii] * x[ii + 1];
    if (ii + 2 < n) s -= du2[ii] * x[ii + 2];
    x[ii] = s / d[ii];
  }
  return x;
}

void normalize(std::vector<double>& z) {
  double big = 0.0;
  for (double v : z) big = std::max(big, std::abs(v));
  if (!(big > 0.0) || !std::isfinite(big)) throw NumericalError("inverse iteration produced a degenerate vector");
  double sign = 1.0;
  for (double v : z)
    if (std::abs(v) >= 1e-3 * big) {
      sign = v > 0.0 ? 1.0 : -1.0;
      break;
    }
  for (double& v : z) v *= sign / big;
}

}  // namespace

std::vector<double> pencil_eigenvector(const Pencil& pen, double lambda) {
  const std::size_t n = pen.diag.size();
  std::vector<double> d(n), off = pen.off;
  for (std::size_t i = 0; i < n; ++i) d[i] = pen.diag[i] - lambda * pen.mass[i];
  std::vector<double> z(n, 1.0);
  for (int it = 0; it < 3; ++it) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = pen.mass[i] * z[i];
    z = tridiagonal_solve(off, d, off, std::move(rhs));
    normalize(z);
  }
  return z;
}

int sign_changes(std::span<const double> z) {
  double big = 0.0;
  for (double v : z) big = std::max(big, std::abs(v));
  int changes = 0;
  int last = 0;
  for (double v : z) {
    if (std::abs(v) <= 1e-10 * big) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace henon
