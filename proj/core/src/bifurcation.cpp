#include "henon/bifurcation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/parallel.hpp"
#include "henon/roots.hpp"

namespace henon {

namespace {

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

ProfileCache::ProfileCache(SolverOptions options, std::shared_ptr<ProfileStore> store)
    : options_(options), store_(std::move(store)) {}

std::string ProfileCache::key(const ProblemParams& p, const SolverOptions& o) {
  std::string k = "N=" + std::to_string(p.dim());
  k += ";alpha=" + num(p.alpha()) + ";eps=" + num(p.eps());
  k += ";rtol=" + num(o.rtol) + ";atol=" + num(o.atol) + ";r_max=" + num(o.r_max);
  k += ";start=" + num(o.start_scale) + ";zero=" + num(o.zero_rtol) + ";table=" + num(o.table_log_step);
  k += ";graded=" + num(o.graded_start) + "," + num(o.graded_ratio) + "," + num(o.graded_end);
  k += ";uniform=" + std::to_string(o.uniform_points);
  k += o.method == ode::Method::dop853 ? ";method=dop853" : ";method=dopri5";
  return k;
}

std::shared_ptr<const RadialProfile> ProfileCache::get(const ProblemParams& params) {
  const auto k = key(params, options_);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(k); it != memo_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::shared_ptr<const RadialProfile> profile;
  if (store_) profile = store_->load(k);
  if (!profile) {
    profile = std::make_shared<const RadialProfile>(solve_dirichlet_ball(params, options_));
    if (store_) store_->save(k, *profile);
  }
  std::lock_guard lock(mutex_);
  ++misses_;
  return memo_.emplace(k, profile).first->second;
}

std::size_t ProfileCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::size_t ProfileCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

Lambda1Sample lambda1_at(int dim, double eps, double alpha, const BifurcationOptions& opt, ProfileCache& cache) {
  const auto profile = cache.get(ProblemParams(dim, alpha, eps));
  const auto eig = unit_ball_spectrum(*profile, 1, opt.spectral);
  const auto dev = lambda1_deviation(*profile, eig.front(), opt.spectral);
  Lambda1Sample s;
  s.alpha = alpha;
  s.closed = lambda1_closed(dim, alpha);
  s.deviation = dev.delta;
  s.lambda1 = s.closed + s.deviation;
  s.direct = eig.front().lambda;
  s.error_estimate = eig.front().error_estimate;
  return s;
}

std::vector<Lambda1Sample> lambda1_curve(int dim, double eps, std::span<const double> alphas,
                                         const BifurcationOptions& opt, ProfileCache& cache) {
  std::vector<Lambda1Sample> out(alphas.size());
  parallel_for(alphas.size(), opt.jobs, [&](std::size_t i) { out[i] = lambda1_at(dim, eps, alphas[i], opt, cache); });
  return out;
}

namespace {

// Root of -d (2N + 4k - 4 + d) / 4 + deviation(alpha_k + d) = 0 by fixed point
// in the offset d, which keeps full relative precision when d is tiny.
std::optional<double> polish_offset(int dim, double eps, int k, double d0, double lo, double hi,
                                    const BifurcationOptions& opt, ProfileCache& cache) {
  const double ak = bifurcation_alpha(k);
  const double c = 2.0 * dim + 4.0 * k - 4.0;
  double d = d0;
  for (int it = 0; it < 60; ++it) {
    const double a = ak + d;
    if (a <= lo || a >= hi) return std::nullopt;
    const double dev = lambda1_at(dim, eps, a, opt, cache).deviation;
    const double next = 4.0 * dev / (c + d);
    if (std::abs(next - d) <= 1e-10 * std::abs(next) || next == d) return next;
    d = next;
  }
  return std::nullopt;
}

}  // namespace

BifurcationResult find_bifurcation_alpha(int dim, double eps, int k, const BifurcationOptions& opt,
                                         ProfileCache& cache, std::optional<std::pair<double, double>> bracket) {
  if (k < 2) throw DomainError("bifurcation index k must be at least 2");
  if (opt.scan_points < 2) throw DomainError("scan needs at least two points");
  const double ak = bifurcation_alpha(k);
  const auto [lo, hi] = bracket.value_or(std::pair{ak - opt.rho, ak + opt.rho});
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("bifurcation bracket must satisfy 0 < lo < hi");
  const double sigma = sphere_eigen(dim, k).sigma;

  BifurcationResult res;
  res.dim = dim;
  res.eps = eps;
  res.k = k;
  res.lo = lo;
  res.hi = hi;
  std::vector<double> grid(static_cast<std::size_t>(opt.scan_points));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + (hi - lo) * i / (grid.size() - 1.0);
  res.scan = lambda1_curve(dim, eps, grid, opt, cache);

  auto f = [&](double a) { return lambda1_at(dim, eps, a, opt, cache).lambda1 + sigma; };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double fa = res.scan[i].lambda1 + sigma;
    const double fb = res.scan[i + 1].lambda1 + sigma;
    const bool change = (fa < 0.0) != (fb < 0.0) || (i == 0 && fa == 0.0);
    if (!change) continue;
    BifurcationPoint pt;
    pt.dim = dim;
    pt.eps = eps;
    pt.k = k;
    pt.lo = grid[i];
    pt.hi = grid[i + 1];
    double root = grid[i];
    if (fa != 0.0) root = find_root(f, grid[i], grid[i + 1], fa, fb, 1e-13, 0.1 * opt.tol).x;
    double d = root - ak;
    if (auto polished = polish_offset(dim, eps, k, d, grid[i], grid[i + 1], opt, cache)) {
      d = *polished;
      root = ak + d;
    }
    pt.alpha_k_eps = root;
    pt.offset = d;
    const auto at = lambda1_at(dim, eps, root, opt, cache);
    pt.residual = std::abs(at.direct + sigma);
    pt.residual_deviation = std::abs(-d * (2.0 * dim + 4.0 * k - 4.0 + d) / 4.0 + at.deviation);
    if (pt.residual_deviation >= opt.tol) {
      std::ostringstream os;
      os << "root refinement stalled at alpha = " << root << " with |f| = " << pt.residual_deviation;
      throw NumericalError(os.str());
    }
    res.points.push_back(pt);
  }
  if (res.points.empty()) {
    std::ostringstream os;
    os << "Lambda_1 + sigma_" << k << " has no sign change on [" << lo << ", " << hi << "] (eps too large?)";
    throw BracketError(os.str(), lo, hi);
  }
  std::sort(res.points.begin(), res.points.end(),
            [&](const auto& a, const auto& b) { return std::abs(a.offset) < std::abs(b.offset); });
  res.non_unique = res.points.size() > 1;

  for (int l = 1; l <= k + 5; ++l) {
    if (l == k) continue;
    const double sl = sphere_eigen(dim, l).sigma;
    for (std::size_t i = 0; i + 1 < res.scan.size(); ++i) {
      if ((res.scan[i].lambda1 + sl < 0.0) != (res.scan[i + 1].lambda1 + sl < 0.0)) {
        res.exclusion_ok = false;
        res.excluded_crossings.push_back(l);
        break;
      }
    }
  }
  return res;
}

MorseIndexReport morse_index(int dim, double eps, double alpha, const BifurcationOptions& opt, ProfileCache& cache) {
  const auto profile = cache.get(ProblemParams(dim, alpha, eps));
  const auto eig = unit_ball_spectrum(*profile, opt.j_max, opt.spectral);
  MorseIndexReport rep;
  rep.alpha = alpha;
  rep.eps = eps;
  rep.dim = dim;
  for (const auto& e : eig) rep.lambdas.push_back(e.lambda);
  const double bound = std::abs(rep.lambdas.front()) + opt.k_margin;
  int k = 1;
  while (sphere_eigen(dim, k).sigma <= bound) ++k;
  rep.k_max = k;
  rep.radial = plain_negative_count(*profile, opt.spectral);
  rep.index_full = rep.radial;
  rep.index_invariant = rep.radial;
  for (int kk = 1; kk <= rep.k_max; ++kk) {
    const auto se = sphere_eigen(dim, kk);
    for (std::size_t j = 0; j < rep.lambdas.size(); ++j) {
      const double f = rep.lambdas[j] + se.sigma;
      if (std::abs(f) < opt.degenerate_tol) {
        std::ostringstream os;
        os << "at bifurcation point: |Lambda_" << j + 1 << " + sigma_" << kk << "| = " << std::abs(f)
           << " at alpha = " << alpha;
        throw DegeneratePointError(os.str());
      }
      if (f < 0.0) {
        rep.pairs.push_back({static_cast<int>(j) + 1, kk, rep.lambdas[j], se.sigma, se.multiplicity});
        rep.index_full += se.multiplicity;
        rep.index_invariant += 1;
      }
    }
  }
  return rep;
}

long long morse_value(const MorseIndexReport& r, MorseMode mode) {
  return mode == MorseMode::full ? r.index_full : r.index_invariant;
}

MorseJump morse_jump(int dim, double eps, int k, double delta, const BifurcationOptions& opt, ProfileCache& cache) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const auto res = find_bifurcation_alpha(dim, eps, k, opt, cache);
  MorseJump out;
  out.point = res.points.front();
  out.delta = delta;
  for (std::size_t i = 1; i < res.points.size(); ++i)
    if (std::abs(res.points[i].alpha_k_eps - out.point.alpha_k_eps) <= delta) out.isolated = false;
  out.below = morse_index(dim, eps, out.point.alpha_k_eps - delta, opt, cache);
  out.above = morse_index(dim, eps, out.point.alpha_k_eps + delta, opt, cache);
  out.jump_full = out.above.index_full - out.below.index_full;
  out.jump_invariant = out.above.index_invariant - out.below.index_invariant;
  out.expected_full = sphere_eigen(dim, k).multiplicity;
  return out;
}

Lambda2Floor lambda2_floor(int dim, double eps, std::span<const double> alphas, const BifurcationOptions& opt,
                           ProfileCache& cache) {
  if (alphas.empty()) throw DomainError("empty alpha grid");
  std::vector<std::pair<double, double>> vals(alphas.size());
  parallel_for(alphas.size(), opt.jobs, [&](std::size_t i) {
    const auto profile = cache.get(ProblemParams(dim, alphas[i], eps));
    const auto eig = unit_ball_spectrum(*profile, 2, opt.spectral);
    vals[i] = {eig[0].lambda, eig[1].lambda};
  });
  Lambda2Floor out;
  out.min_lambda2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out.samples.push_back({alphas[i], vals[i]});
    if (vals[i].second < out.min_lambda2) {
      out.min_lambda2 = vals[i].second;
      out.argmin = alphas[i];
    }
    if (!(vals[i].second > vals[i].first)) out.ordered = false;
  }
  return out;
}

ConvergenceStudy convergence_study(int dim, int k, std::span<const double> eps_list, const BifurcationOptions& opt,
                                   ProfileCache& cache, std::optional<std::pair<double, double>> bracket) {
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw DomainError("eps list must be strictly decreasing");
  ConvergenceStudy out;
  out.dim = dim;
  out.k = k;
  for (const double eps : eps_list) {
    const auto res = find_bifurcation_alpha(dim, eps, k, opt, cache, bracket);
    const auto& pt = res.points.front();
    out.rows.push_back({eps, pt.alpha_k_eps, pt.offset, std::abs(pt.offset), pt.residual, !res.non_unique});
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].error > out.rows[i - 1].error) out.monotone = false;
    const double a = out.rows[i - 1].error, b = out.rows[i].error;
    out.rates.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(out.rows[i - 1].eps / out.rows[i].eps)
                                           : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace henon
