#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "henon/bifurcation.hpp"
#include "henon/errors.hpp"
#include "henon/io.hpp"
#include "henon/parallel.hpp"
#include "henon/radial.hpp"
#include "henon/rescale.hpp"
#include "henon/spectral.hpp"
#include "henon/verify.hpp"

namespace henon::cli {

namespace {

struct Settings {
  int dim = 3;
  std::vector<double> alpha{2.0};
  std::vector<double> eps{0.05};
  int k = 2;
  double tol = 0;  // 0: module default
  int grid_points = 2000;
  double r_trunc = 1e3;
  int count = 3;
  bool limit = false;
  std::string out;
  std::string format = "json";
  int jobs = 1;
  bool no_cache = false;
  std::string config;
  std::vector<int> only;
};

void add_common(CLI::App* sub, Settings& s) {
  sub->add_option("--N", s.dim, "space dimension (3 or more)")->capture_default_str();
  sub->add_option("--alpha", s.alpha, "weight exponent(s), comma separated")->delimiter(',')->capture_default_str();
  sub->add_option("--eps", s.eps, "distance(s) below the threshold exponent, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--tol", s.tol, "integrator rtol; for bifurcate the root tolerance");
  sub->add_option("--grid-points", s.grid_points, "uniform points of the stored profile grid")
      ->check(CLI::Range(10, 10000000))
      ->capture_default_str();
  sub->add_option("--r-trunc", s.r_trunc, "truncation radius of the limit problem")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--out", s.out, "output file (default: standard output)");
  sub->add_option("--format", s.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--jobs", s.jobs, "parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--no-cache", s.no_cache, "bypass the on-disk profile cache");
  sub->add_option("--config", s.config, "flat key = value file; flags take precedence");
}

SolverOptions solver_options(const Settings& s, bool tol_is_rtol = true) {
  SolverOptions o;
  o.uniform_points = s.grid_points;
  if (tol_is_rtol && s.tol > 0) {
    o.rtol = s.tol;
    o.atol = s.tol * 1e-2;
  }
  return o;
}

ProfileCache make_cache(const Settings& s, bool tol_is_rtol = true) {
  std::shared_ptr<ProfileStore> store;
  if (!s.no_cache) store = std::make_shared<io::DiskProfileStore>(io::default_cache_dir());
  return ProfileCache(solver_options(s, tol_is_rtol), store);
}

double single(const std::vector<double>& v, const char* name) {
  if (v.size() != 1) throw DomainError(std::string("--") + name + " takes exactly one value for this command");
  return v.front();
}

void validate(const Settings& s) {
  if (s.tol < 0 || !std::isfinite(s.tol)) throw DomainError("--tol must be positive");
  if (s.alpha.empty() || s.eps.empty()) throw DomainError("--alpha and --eps need at least one value");
  for (double a : s.alpha)
    for (double e : s.eps) ProblemParams(s.dim, a, e);
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.out.empty())
    out << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  else
    io::write_atomic(s.out, text);
}

int cmd_solve(const Settings& s, std::ostream& out) {
  validate(s);
  const ProblemParams params(s.dim, single(s.alpha, "alpha"), single(s.eps, "eps"));
  auto cache = make_cache(s);
  const auto prof = cache.get(params);
  if (s.format == "json") {
    emit(s, io::profile_to_json(*prof), out);
  } else {
    std::string csv = "r,u,du\n";
    for (std::size_t i = 0; i < prof->grid().size(); ++i)
      csv += io::csv_line({io::format_double(prof->grid()[i]), io::format_double(prof->u()[i]),
                           io::format_double(prof->du()[i])});
    emit(s, csv, out);
  }
  return ok;
}

int cmd_rescale(const Settings& s, std::ostream& out) {
  validate(s);
  const ProblemParams params(s.dim, single(s.alpha, "alpha"), single(s.eps, "eps"));
  auto cache = make_cache(s);
  const auto res = rescale(cache.get(params));
  if (s.format == "json") {
    emit(s, io::rescaled_to_json(res), out);
  } else {
    const double lam = limit_lambda(s.dim, params.alpha());
    std::string csv = "r,w,U\n";
    for (std::size_t i = 0; i < res.grid().size(); ++i)
      csv += io::csv_line({io::format_double(res.grid()[i]), io::format_double(res.w()[i]),
                           io::format_double(limit_profile(res.grid()[i], lam, s.dim, params.alpha()))});
    emit(s, csv, out);
  }
  return ok;
}

int cmd_spectrum(const Settings& s, std::ostream& out) {
  if (s.count < 1) throw DomainError("--count must be at least 1");
  if (s.limit) {
    const double alpha = single(s.alpha, "alpha");
    ProblemParams(s.dim, alpha, 0.01);
    const auto l = limit_eigen(s.dim, alpha, s.r_trunc);
    emit(s, s.format == "json" ? io::limit_json(l) : io::limit_csv(l), out);
    return ok;
  }
  validate(s);
  auto cache = make_cache(s);
  std::vector<std::pair<double, double>> jobs;
  for (double e : s.eps)
    for (double a : s.alpha) jobs.emplace_back(a, e);
  std::vector<std::vector<EigenResult>> res(jobs.size());
  parallel_for(jobs.size(), s.jobs, [&](std::size_t i) {
    res[i] = unit_ball_spectrum(*cache.get(ProblemParams(s.dim, jobs[i].first, jobs[i].second)), s.count);
  });
  std::vector<io::SpectrumRow> rows;
  for (std::size_t i = 0; i < jobs.size(); ++i)
    for (auto& e : res[i]) rows.push_back({jobs[i].first, jobs[i].second, std::move(e)});
  emit(s, s.format == "json" ? io::spectrum_json(rows, "unit_ball") : io::spectrum_csv(rows), out);
  return ok;
}

int cmd_bifurcate(const Settings& s, std::ostream& out) {
  validate(s);
  if (s.k < 2) throw DomainError("--k must be at least 2");
  const double eps = single(s.eps, "eps");
  auto cache = make_cache(s, false);
  BifurcationOptions opt;
  opt.jobs = s.jobs;
  if (s.tol > 0) opt.tol = s.tol;
  const auto r = find_bifurcation_alpha(s.dim, eps, s.k, opt, cache);
  if (r.points.empty()) throw NumericalError("no bifurcation root found");
  emit(s, s.format == "json" ? io::bifurcation_json(r) : io::bifurcation_csv(r), out);
  return ok;
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.alpha.empty() || s.eps.empty()) throw DomainError("--alpha and --eps need at least one value");
  auto cache = make_cache(s);
  std::vector<io::SweepRow> rows;
  for (double e : s.eps)
    for (double a : s.alpha) {
      io::SweepRow row;
      row.dim = s.dim;
      row.alpha = a;
      row.eps = e;
      rows.push_back(row);
    }
  parallel_for(rows.size(), s.jobs, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      const auto prof = cache.get(ProblemParams(row.dim, row.alpha, row.eps));
      const auto spec = unit_ball_spectrum(*prof, 2);
      row.u0 = prof->u0();
      row.lambda1 = spec[0].lambda;
      row.lambda2 = spec[1].lambda;
      row.v1 = radial_kernel_test(*prof).v1;
      row.limit_distance = limit_distance(rescale(prof));
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  const auto good = std::count_if(rows.begin(), rows.end(), [](const io::SweepRow& r) { return r.error.empty(); });
  emit(s, s.format == "json" ? io::sweep_json(rows) : io::sweep_csv(rows), out);
  if (good == 0) {
    err << "error: every sweep row failed\n";
    return numerical_error;
  }
  return ok;
}

int cmd_verify(const Settings& s, std::ostream& out) {
  VerifyOptions opt;
  opt.only = s.only;
  opt.jobs = s.jobs;
  if (!s.no_cache) opt.store = std::make_shared<io::DiskProfileStore>(io::default_cache_dir());
  const auto report = run_verify(opt, [&](const CriterionResult& c) { out << format_criterion_line(c) << std::endl; });
  out << (report.overall_pass ? "PASS" : "FAIL") << ": " << std::count_if(report.criteria.begin(), report.criteria.end(),
                                                                          [](const CriterionResult& c) { return c.pass; })
      << "/" << report.criteria.size() << " criteria in " << report.runtime_s << " s\n";
  const std::string path = s.out.empty() ? "verify_report.json" : s.out;
  io::write_atomic(path, report_to_json(report));
  out << "report written to " << path << "\n";
  return report.overall_pass ? ok : failed;
}

// Appends "--key value" for config entries whose flag was not given.
std::vector<std::string> merge_config(CLI::App* sub, const std::vector<std::string>& args, const std::string& path) {
  const auto entries = io::parse_config(io::read_file(path));
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : entries) {
    if (key == "config") throw DomainError("config files cannot include other config files");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw DomainError("unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1") merged.push_back("--" + key);
      else if (value != "false" && value != "0") throw DomainError("config key '" + key + "' expects true or false");
      continue;
    }
    merged.push_back("--" + key);
    merged.push_back(value);
  }
  return merged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Numerical toolkit for the Henon problem on the unit ball"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "radial Dirichlet solution");
  auto* resc = app.add_subcommand("rescale", "rescaled profile and distance to the limit bubble");
  auto* spectrum = app.add_subcommand("spectrum", "linearized radial eigenvalues");
  auto* bif = app.add_subcommand("bifurcate", "locate alpha_k^eps");
  auto* sweep = app.add_subcommand("sweep", "table over an (alpha, eps) grid");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  for (auto* sub : {solve, resc, spectrum, bif, sweep, verify}) add_common(sub, s);
  spectrum->add_option("--count", s.count, "eigenvalues per point")->capture_default_str();
  spectrum->add_flag("--limit", s.limit, "limit problem on (0, r-trunc) instead of the unit ball");
  bif->add_option("--k", s.k, "spherical harmonic degree")->capture_default_str();
  verify->add_option("--only", s.only, "criterion ids, comma separated")->delimiter(',');

  auto parse = [&](std::vector<std::string> a) {
    std::reverse(a.begin(), a.end());
    app.parse(a);
  };

  try {
    parse(args);
    if (!s.config.empty()) {
      CLI::App* sub = app.get_subcommands().front();
      auto merged = merge_config(sub, args, s.config);
      if (merged.size() != args.size()) {
        s = Settings{};
        app.clear();
        parse(merged);
      }
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return domain_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return domain_error;
  }

  try {
    if (solve->parsed()) return cmd_solve(s, out);
    if (resc->parsed()) return cmd_rescale(s, out);
    if (spectrum->parsed()) return cmd_spectrum(s, out);
    if (bif->parsed()) return cmd_bifurcate(s, out);
    if (sweep->parsed()) return cmd_sweep(s, out, err);
    if (verify->parsed()) return cmd_verify(s, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return domain_error;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return failed;
  }
  return failed;
}

}  // namespace henon::cli
