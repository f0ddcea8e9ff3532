#pragma once

// Bifurcation values alpha_k^eps with Λ_1^eps(alpha) = -sigma_k, Morse indices
// and the Λ_2 floor.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "henon/radial.hpp"
#include "henon/spectral.hpp"

namespace henon {

/// Persistent backing for ProfileCache, keyed by ProfileCache::key.
class ProfileStore {
 public:
  virtual ~ProfileStore() = default;
  virtual std::shared_ptr<const RadialProfile> load(const std::string& key) = 0;
  virtual void save(const std::string& key, const RadialProfile& profile) = 0;
};

/// Thread-safe memo of Dirichlet profiles for fixed solver options.
class ProfileCache {
 public:
  explicit ProfileCache(SolverOptions options = {}, std::shared_ptr<ProfileStore> store = nullptr);

  std::shared_ptr<const RadialProfile> get(const ProblemParams& params);
  const SolverOptions& options() const noexcept { return options_; }

  /// Canonical text of (N, alpha, eps) and every solver option.
  static std::string key(const ProblemParams& params, const SolverOptions& options);

  std::size_t hits() const;
  std::size_t misses() const;

 private:
  SolverOptions options_;
  std::shared_ptr<ProfileStore> store_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const RadialProfile>> memo_;
  std::size_t hits_ = 0, misses_ = 0;
};

struct BifurcationOptions {
  SpectralOptions spectral;
  double rho = 0.9;
  int scan_points = 32;
  double tol = 1e-6;           ///< |f| at accepted roots
  double degenerate_tol = 1e-6;
  int j_max = 3;
  double k_margin = 5.0;
  int jobs = 1;
};

struct Lambda1Sample {
  double alpha = 0;
  double lambda1 = 0;          ///< closed + deviation
  double direct = 0;           ///< extrapolated pencil value
  double error_estimate = 0;   ///< of the pencil value
  double closed = 0;
  double deviation = 0;
};

Lambda1Sample lambda1_at(int dim, double eps, double alpha, const BifurcationOptions& options, ProfileCache& cache);
std::vector<Lambda1Sample> lambda1_curve(int dim, double eps, std::span<const double> alphas,
                                         const BifurcationOptions& options, ProfileCache& cache);

struct BifurcationPoint {
  int dim = 0;
  double eps = 0;
  int k = 0;
  double alpha_k_eps = 0;
  double offset = 0;            ///< alpha_k_eps - 2(k-1), resolved below the spacing of doubles near alpha_k
  double residual = 0;          ///< |pencil Λ_1 + sigma_k| at the root
  double residual_deviation = 0;///< |closed + deviation + sigma_k| at the root
  double lo = 0, hi = 0;        ///< sign-change interval of the scan
};

struct BifurcationResult {
  int dim = 0;
  double eps = 0;
  int k = 0;
  double lo = 0, hi = 0;
  std::vector<BifurcationPoint> points;
  std::vector<Lambda1Sample> scan;
  bool non_unique = false;
  bool exclusion_ok = true;     ///< no crossing of -sigma_l, l != k, on the scan
  std::vector<int> excluded_crossings;
};

/// Scans [lo, hi] (default 2(k-1) -+ rho), refines every sign change of
/// Λ_1^eps + sigma_k and reports all roots. Throws BracketError if the scan
/// finds no sign change.
BifurcationResult find_bifurcation_alpha(int dim, double eps, int k, const BifurcationOptions& options,
                                         ProfileCache& cache,
                                         std::optional<std::pair<double, double>> bracket = std::nullopt);

enum class MorseMode { full, invariant };

struct MorsePair {
  int j = 0;
  int k = 0;
  double lambda = 0;
  double sigma = 0;
  long long multiplicity = 0;
};

struct MorseIndexReport {
  double alpha = 0;
  double eps = 0;
  int dim = 0;
  int k_max = 0;
  int radial = 0;
  long long index_full = 0;
  long long index_invariant = 0;
  std::vector<MorsePair> pairs;
  std::vector<double> lambdas;
};

/// Throws DegeneratePointError if some |Λ_j + sigma_k| is below degenerate_tol.
MorseIndexReport morse_index(int dim, double eps, double alpha, const BifurcationOptions& options,
                             ProfileCache& cache);
long long morse_value(const MorseIndexReport& report, MorseMode mode);

struct MorseJump {
  BifurcationPoint point;
  double delta = 0;
  MorseIndexReport below, above;
  long long jump_full = 0;
  long long jump_invariant = 0;
  long long expected_full = 0;  ///< multiplicity of sigma_k
  bool isolated = true;         ///< no other scanned root within delta
};

MorseJump morse_jump(int dim, double eps, int k, double delta, const BifurcationOptions& options,
                     ProfileCache& cache);

struct Lambda2Floor {
  double min_lambda2 = 0;
  double argmin = 0;
  bool ordered = true;          ///< Λ_2 > Λ_1 at every grid point
  std::vector<std::pair<double, std::pair<double, double>>> samples;  ///< alpha -> (Λ_1, Λ_2)
};

Lambda2Floor lambda2_floor(int dim, double eps, std::span<const double> alphas, const BifurcationOptions& options,
                           ProfileCache& cache);

struct ConvergenceRow {
  double eps = 0;
  double alpha_k_eps = 0;
  double offset = 0;
  double error = 0;
  double residual = 0;
  bool unique = true;
};

struct ConvergenceStudy {
  int dim = 0;
  int k = 0;
  std::vector<ConvergenceRow> rows;
  bool monotone = false;        ///< |offset| nonincreasing along the list
  std::vector<double> rates;    ///< log(err_i / err_{i+1}) / log(eps_i / eps_{i+1})
};

ConvergenceStudy convergence_study(int dim, int k, std::span<const double> eps_list,
                                   const BifurcationOptions& options, ProfileCache& cache,
                                   std::optional<std::pair<double, double>> bracket = std::nullopt);

}  // namespace henon
