#include "henon/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "henon/parallel.hpp"
#include "henon/radial.hpp"
#include "henon/rescale.hpp"
#include "henon/spectral.hpp"
#include "json.hpp"

namespace henon {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

struct Context {
  const VerifyOptions& opt;
  ProfileCache cache;
  BifurcationOptions bif;

  explicit Context(const VerifyOptions& o) : opt(o), cache(SolverOptions{}, o.store) { bif.jobs = std::max(1, o.jobs); }
};

const char* const k_names[criterion_count] = {"limit-first-eigenvalue", "limit-second-eigenvalue",
                                              "sup-norm-asymptotics",   "bifurcation-convergence",
                                              "morse-index-jump",       "second-eigenvalue-floor",
                                              "radial-nondegeneracy",   "oracle-equivalence",
                                              "pointwise-bounds",       "rescaled-convergence"};

CriterionResult start(int id, std::string target) {
  CriterionResult r;
  r.id = id;
  r.name = k_names[id - 1];
  r.target = std::move(target);
  return r;
}

const std::vector<double> k_eps_list{0.1, 0.05, 0.02, 0.01};

CriterionResult limit_first(Context&) {
  auto r = start(1, "Lambda1 = -(alpha+2)(2N+alpha-2)/4 for (3,2), (3,0), (4,2)");
  r.tolerance = 1e-4;
  std::ostringstream d;
  bool ok = true;
  for (auto [n, a] : {std::pair{3, 2.0}, {3, 0.0}, {4, 2.0}}) {
    const auto t0 = Clock::now();
    const auto l = limit_eigen(n, a, 1e3);
    const double t = seconds_since(t0);
    const double err = std::abs(l.lambda1 - lambda1_closed(n, a));
    r.measured = std::max(r.measured, err);
    ok = ok && t <= 30.0;
    d << "(" << n << "," << a << "): " << fmt(l.lambda1, 10) << " vs " << fmt(lambda1_closed(n, a)) << " err "
      << fmt(err, 3) << " in " << fmt(t, 3) << " s; ";
  }
  r.pass = ok && r.measured < r.tolerance;
  r.details = d.str() + "budget 30 s each";
  return r;
}

CriterionResult limit_second(Context&) {
  auto r = start(2, "|Lambda2| < 1e-2, N=3, alpha in {0,1,2}; truncation sensitivity < 5e-3");
  r.tolerance = 1e-2;
  double sens = 0;
  std::ostringstream d;
  for (double a : {0.0, 1.0, 2.0}) {
    const auto l = limit_eigen(3, a, 1e3);
    r.measured = std::max(r.measured, std::abs(l.lambda2));
    sens = std::max(sens, l.sensitivity2);
    d << "alpha=" << a << ": Lambda2=" << fmt(l.lambda2, 3) << " sens=" << fmt(l.sensitivity2, 3) << "; ";
  }
  r.pass = r.measured < r.tolerance && sens < 5e-3;
  r.details = d.str() + "max sensitivity " + fmt(sens, 3);
  return r;
}

CriterionResult sup_norm(Context&) {
  auto r = start(3, "eps*u0^2 -> M = 96 (N=4, alpha=0) within 2%, ratios monotone toward 1");
  r.tolerance = 0.02;
  const auto t0 = Clock::now();
  const auto tab = sup_norm_table(4, 0.0, k_eps_list);
  const double t = seconds_since(t0);
  r.measured = std::abs(tab.extrapolated_ratio - 1.0);
  bool monotone = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < tab.rows.size(); ++i) {
    d << "ratio(" << tab.rows[i].eps << ")=" << fmt(tab.rows[i].ratio, 6) << " ";
    if (i > 0) {
      monotone = monotone && std::abs(tab.rows[i].ratio - 1.0) < std::abs(tab.rows[i - 1].ratio - 1.0);
      monotone = monotone && std::abs(tab.rows[i].mu_pow_eps - 1.0) <= std::abs(tab.rows[i - 1].mu_pow_eps - 1.0);
    }
  }
  d << "; extrapolated " << fmt(tab.extrapolated, 6) << "; monotone " << (monotone ? "yes" : "no") << "; "
    << fmt(t, 3) << " s of 20 s";
  r.pass = r.measured < r.tolerance && monotone && t <= 20.0;
  r.details = d.str();
  return r;
}

CriterionResult bifurcation_convergence(Context& c) {
  auto r = start(4, "|alpha_2^eps - 2| nonincreasing, |Lambda1 + 6| < 1e-6 at the roots");
  r.tolerance = 1e-6;
  const auto t0 = Clock::now();
  const auto study = convergence_study(3, 2, k_eps_list, c.bif, c.cache);
  const double t = seconds_since(t0);
  std::ostringstream d;
  for (const auto& row : study.rows) {
    r.measured = std::max(r.measured, row.residual);
    d << "eps=" << row.eps << ": offset " << fmt(row.offset, 4) << " residual " << fmt(row.residual, 3)
      << (row.unique ? "" : " (several roots)") << "; ";
  }
  d << "rates";
  for (double q : study.rates) d << " " << fmt(q, 4);
  d << "; " << fmt(t, 3) << " s of 180 s";
  r.pass = study.monotone && r.measured < r.tolerance && t <= 180.0 && study.rows.size() == k_eps_list.size();
  r.details = d.str();
  return r;
}

CriterionResult morse(Context& c) {
  auto r = start(5, "invariant index jumps by 1, full index by 5 across alpha_2^eps (N=3, eps=0.01)");
  r.tolerance = 0;
  const auto j = morse_jump(3, 0.01, 2, 0.05, c.bif, c.cache);
  r.measured = static_cast<double>(j.jump_invariant);
  r.pass = j.jump_invariant == 1 && j.jump_full == 5 && j.expected_full == 5 && j.isolated;
  r.details = "alpha_2^eps=" + fmt(j.point.alpha_k_eps, 17) + " full " + std::to_string(j.below.index_full) + "->" +
              std::to_string(j.above.index_full) + " invariant " + std::to_string(j.below.index_invariant) + "->" +
              std::to_string(j.above.index_invariant) + " radial " + std::to_string(j.below.radial) +
              (j.isolated ? "" : " (not isolated)");
  return r;
}

CriterionResult second_floor(Context& c) {
  auto r = start(6, "min over alpha in [1,5] of Lambda2^eps > -2 (N=3, eps=0.01)");
  r.tolerance = -2.0;
  std::vector<double> alphas;
  for (int i = 0; i <= 16; ++i) alphas.push_back(1.0 + 0.25 * i);
  const auto f = lambda2_floor(3, 0.01, alphas, c.bif, c.cache);
  r.measured = f.min_lambda2;
  r.pass = f.min_lambda2 > -2.0 && f.ordered;
  r.details = "minimum at alpha=" + fmt(f.argmin) + (f.ordered ? "" : "; Lambda2 <= Lambda1 somewhere");
  return r;
}

CriterionResult kernel(Context& c) {
  auto r = start(7, "|v(1)| > 1e-3 over N=3, alpha in {0.5..4.5}, eps in {0.05, 0.01}");
  r.tolerance = 1e-3;
  std::vector<std::pair<double, double>> jobs;
  for (double e : {0.05, 0.01})
    for (int i = 1; i <= 9; ++i) jobs.emplace_back(0.5 * i, e);
  std::vector<RadialKernel> out(jobs.size());
  parallel_for(jobs.size(), c.bif.jobs, [&](std::size_t i) {
    out[i] = radial_kernel_test(*c.cache.get(ProblemParams(3, jobs[i].first, jobs[i].second)));
  });
  double worst = std::numeric_limits<double>::infinity(), gap = worst;
  std::size_t at = 0;
  bool one_negative = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::abs(out[i].v1) < worst) {
      worst = std::abs(out[i].v1);
      at = i;
    }
    gap = std::min(gap, out[i].plain_gap);
    one_negative = one_negative && out[i].plain_negative == 1;
  }
  r.measured = worst;
  r.pass = worst > r.tolerance && gap > 1e-6 && one_negative;
  r.details = "minimum at alpha=" + fmt(jobs[at].first) + " eps=" + fmt(jobs[at].second) + ", margin " +
              fmt(worst / r.tolerance, 3) + "x; v(1) scales like eps; min plain-pencil gap " + fmt(gap, 3);
  return r;
}

CriterionResult oracles(Context& c) {
  auto r = start(8, "(a) 1e-8 (b) 1e-6 (c) 1e-6 (d) 1e-6 (e) 1e-8; measured is worst value/tolerance");
  r.tolerance = 1.0;
  std::ostringstream d;
  double worst = 0;
  auto record = [&](const char* tag, double value, double tol) {
    worst = std::max(worst, value / tol);
    d << tag << " " << fmt(value, 3) << " (tol " << fmt(tol, 1) << "); ";
  };

  double a = 0;
  SolverOptions dp5;
  dp5.method = ode::Method::dopri5;
  for (auto [n, al, p] : {std::tuple{3, 2.0, 5.0}, {3, 0.0, 4.9}, {4, 0.0, 2.99}, {3, 2.0, 6.99}, {4, 1.0, 3.5}}) {
    const auto x = integrate_radial_ivp(n, al, p, 1.0, 1e5, SolverOptions{});
    const auto y = integrate_radial_ivp(n, al, p, 1.0, 1e5, dp5);
    if (!x.first_zero || !y.first_zero) throw NumericalError("dual-integrator instance without a zero");
    a = std::max(a, std::abs(*x.first_zero - *y.first_zero) / *x.first_zero);
  }
  record("(a) first zeros", a, 1e-8);

  double b = 0;
  for (auto [n, al, e] : {std::tuple{3, 2.0, 0.05}, {3, 1.0, 0.01}, {4, 1.0, 0.05}}) {
    const auto prof = c.cache.get(ProblemParams(n, al, e));
    const auto prob = unit_ball_problem(*prof);
    const auto eig = eigenvalues(prob, 3);
    for (const auto& ev : eig)
      b = std::max(b, std::abs(ev.lambda - prufer_eigen(prob, ev.j, ev.lambda - 0.05, ev.lambda + 0.05)));
  }
  record("(b) pencil vs Pruefer", b, 1e-6);

  double sc = 0, fw = 0, amp = 0;
  for (auto [n, al, e] : {std::tuple{3, 2.0, 0.05}, {3, 1.0, 0.01}, {4, 0.0, 0.02}}) {
    const auto prof = c.cache.get(ProblemParams(n, al, e));
    sc = std::max(sc, scale_equivalence_test(*prof, rescale(prof), 3));
    fw = std::max(fw, fowler_check(*prof));
    SolverOptions tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    const auto base = solve_dirichlet_ball(ProblemParams(n, al, e), tight, 1.0);
    for (double s : {0.25, 4.0}) {
      const auto other = solve_dirichlet_ball(ProblemParams(n, al, e), tight, s);
      double diff = 0;
      for (std::size_t i = 0; i < base.grid().size(); ++i) diff = std::max(diff, std::abs(base.u()[i] - other.u()[i]));
      amp = std::max(amp, diff / base.u0());
    }
  }
  record("(c) unit vs rho ball", sc, 1e-6);
  record("(d) Fowler residual", fw, 1e-6);
  record("(e) amplitude invariance", amp, 1e-8);

  r.measured = worst;
  r.pass = worst < 1.0;
  r.details = d.str();
  return r;
}

CriterionResult bounds(Context& c) {
  auto r = start(9, "decay margin >= -1e-9 u0; uniform-bound and eigenfunction-decay constants within 10x");
  r.tolerance = 10.0;
  std::ostringstream d;

  std::vector<ProblemParams> regression;
  for (int n : {3, 4})
    for (double a : {0.0, 1.0, 2.0})
      for (double e : k_eps_list) regression.emplace_back(n, a, e);
  std::vector<std::shared_ptr<const RadialProfile>> profs(regression.size());
  parallel_for(regression.size(), c.bif.jobs, [&](std::size_t i) { profs[i] = c.cache.get(regression[i]); });
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& p : profs) margin = std::min(margin, decay_bound_check(*p) / p->u0());
  d << "min decay margin/u0 " << fmt(margin, 3) << "; ";

  std::vector<RescaledProfile> sweep;
  for (double a : {0.5, 1.0, 2.0, 4.0})
    for (double e : k_eps_list) sweep.push_back(rescale(c.cache.get(ProblemParams(3, a, e))));
  const auto ub = uniform_bound_sweep(sweep);
  d << "uniform bound constants " << fmt(*std::min_element(ub.constants.begin(), ub.constants.end()), 4) << ".."
    << fmt(*std::max_element(ub.constants.begin(), ub.constants.end()), 4) << " spread " << fmt(ub.spread, 4) << "; ";

  double lo_all = std::numeric_limits<double>::infinity(), hi_all = 0, lo_far = lo_all, hi_far = 0;
  for (double a : {1.0, 2.0, 3.0})
    for (double e : {0.05, 0.02, 0.01}) {
      const auto res = rescale(c.cache.get(ProblemParams(3, a, e)));
      const auto eig = eigenvalues(rho_ball_problem(res), 1);
      const double all = eigfun_decay_check(eig[0], 3, 0.0);
      const double far = eigfun_decay_check(eig[0], 3, 1.0);
      lo_all = std::min(lo_all, all);
      hi_all = std::max(hi_all, all);
      lo_far = std::min(lo_far, far);
      hi_far = std::max(hi_far, far);
    }
  const double spread_all = hi_all / lo_all;
  d << "eigenfunction decay constants on (0,rho) " << fmt(lo_all, 4) << ".." << fmt(hi_all, 4) << " spread "
    << fmt(spread_all, 4) << "; on r>=1 only (informational) spread " << fmt(hi_far / lo_far, 4);

  r.measured = std::max(ub.spread, spread_all);
  r.pass = margin >= -1e-9 && ub.spread < 10.0 && spread_all < 10.0;
  r.details = d.str();
  return r;
}

CriterionResult rescaled_trend(Context& c) {
  auto r = start(10, "sup|w - U| strictly decreasing along eps (N=3, alpha in {1,2})");
  r.tolerance = 1.0;
  std::ostringstream d;
  for (double a : {1.0, 2.0}) {
    d << "alpha=" << a << ":";
    double prev = std::numeric_limits<double>::infinity();
    for (double e : k_eps_list) {
      const double dist = limit_distance(rescale(c.cache.get(ProblemParams(3, a, e))));
      if (std::isfinite(prev)) r.measured = std::max(r.measured, dist / prev);
      prev = dist;
      d << " " << fmt(dist, 4);
    }
    d << "; ";
  }
  r.pass = r.measured < 1.0;
  r.details = d.str() + "measured is the largest successive ratio";
  return r;
}

using CriterionFn = CriterionResult (*)(Context&);
constexpr CriterionFn k_criteria[criterion_count] = {limit_first, limit_second, sup_norm, bifurcation_convergence,
                                                     morse, second_floor, kernel, oracles, bounds, rescaled_trend};



CriterionResult run_one(int id, Context& ctx) {
  if (id < 1 || id > criterion_count) throw DomainError("criterion id must be in 1.." + std::to_string(criterion_count));
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    r = k_criteria[id - 1](ctx);
  } catch (const std::exception& e) {
    r = start(id, "");
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.details = std::string("error: ") + e.what();
  }
  r.runtime_s = seconds_since(t0);
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& options) {
  Context ctx(options);
  return run_one(id, ctx);
}

VerifyReport run_verify(const VerifyOptions& options, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = options.only;
  if (ids.empty())
    for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
  for (int id : ids)
    if (id < 1 || id > criterion_count)
      throw DomainError("criterion id must be in 1.." + std::to_string(criterion_count));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  Context ctx(options);
  VerifyReport report;
  const auto t0 = Clock::now();
  for (int id : ids) {
    report.criteria.push_back(run_one(id, ctx));
    if (on_result) on_result(report.criteria.back());
  }
  report.runtime_s = seconds_since(t0);
  report.overall_pass = std::all_of(report.criteria.begin(), report.criteria.end(),
                                    [](const CriterionResult& c) { return c.pass; });
  return report;
}

std::string format_criterion_line(const CriterionResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-26s measured=%-12.6g tol=%-10.3g %8.2f s", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.measured, r.tolerance, r.runtime_s);
  return buf;
}

std::string report_to_json(const VerifyReport& report) {
  using nlohmann::json;
  json arr = json::array();
  for (const auto& c : report.criteria)
    arr.push_back({{"id", c.id},
                   {"name", c.name},
                   {"target", c.target},
                   {"measured", std::isfinite(c.measured) ? json(c.measured) : json(nullptr)},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass},
                   {"runtime_s", c.runtime_s},
                   {"details", c.details}});
  return json{{"schema_version", io::schema_version},
              {"kind", "verify_report"},
              {"overall_pass", report.overall_pass},
              {"runtime_s", report.runtime_s},
              {"criteria", arr}}
      .dump(1);
}

VerifyReport report_from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const auto j = json::parse(text);
    if (j.at("schema_version").get<int>() != io::schema_version) throw DomainError("unsupported report schema version");
    if (j.at("kind").get<std::string>() != "verify_report") throw DomainError("document is not a verify report");
    VerifyReport r;
    r.overall_pass = j.at("overall_pass").get<bool>();
    r.runtime_s = j.at("runtime_s").get<double>();
    for (const auto& c : j.at("criteria")) {
      const auto& m = c.at("measured");
      r.criteria.push_back({c.at("id").get<int>(), c.at("name").get<std::string>(), c.at("target").get<std::string>(),
                            m.is_null() ? std::numeric_limits<double>::quiet_NaN() : m.get<double>(),
                            c.at("tolerance").get<double>(), c.at("pass").get<bool>(), c.at("runtime_s").get<double>(),
                            c.at("details").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed verify report: ") + e.what());
  }
}

}  // namespace henon
