#pragma once

// Eigenvalues of -(r^{N-1} z')' - r^{N-1} q z = Λ W(r) z on (r_first, r_end),
// W = r^{N-3} (inverse square weight) or r^{N-1} (plain weight).
//
// The pencil is a conservative three-point scheme in a mapped coordinate xi:
// r = r_first e^xi up to r_split, then linear in xi up to r_end. Spectra are
// computed on three nested grids and extrapolated in the step.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "henon/radial.hpp"
#include "henon/rescale.hpp"

namespace henon {

enum class SpectralWeight { inverse_square, plain };
enum class LeftBoundary { dirichlet, natural };

struct SLProblem {
  int dim = 3;
  double r_first = 1e-6;
  double r_split = 1.0;
  double r_end = 1.0;
  std::function<double(double)> q;
  SpectralWeight weight = SpectralWeight::inverse_square;
  LeftBoundary left = LeftBoundary::dirichlet;
};

struct SpectralOptions {
  double ratio = 1.05;       ///< geometric ratio of the coarsest grid
  int levels = 3;            ///< nested grids h, h/2, h/4, ...
  double bisection_tol = 1e-10;
};

/// Nodes r_0 = r_first < ... < r_n = r_end with the map derivative at nodes
/// and at cell midpoints.
struct SLGrid {
  double h = 0;
  std::vector<double> r, gp;
  std::vector<double> r_mid, gp_mid;
};

/// refine multiplies the number of cells of the coarsest grid.
SLGrid make_grid(const SLProblem& problem, double ratio, int refine);

/// Symmetric tridiagonal A and diagonal B over the unknown nodes.
struct Pencil {
  std::vector<double> r;      ///< radii of the unknowns
  std::vector<double> diag;
  std::vector<double> off;    ///< off[i] couples unknowns i and i + 1
  std::vector<double> mass;
  bool left_unknown = false;  ///< node r_first is an unknown (natural condition)
};

/// Throws DomainError if the grid starts at r <= 0.
Pencil assemble_pencil(const SLProblem& problem, const SLGrid& grid);

/// Number of pencil eigenvalues strictly below lambda (inertia of A - lambda B).
std::size_t sturm_count(const Pencil& pencil, double lambda);

/// The lowest `count` eigenvalues by bisection on the Sturm count.
std::vector<double> pencil_eigenvalues(const Pencil& pencil, int count, double tol = 1e-10);

/// Eigenvector for an accurate eigenvalue by inverse iteration, normalized to
/// sup-norm 1 with its first significant entry positive.
std::vector<double> pencil_eigenvector(const Pencil& pencil, double lambda);

/// Sign changes, ignoring entries below 1e-10 of the max.
int sign_changes(std::span<const double> z);

struct EigenResult {
  int j = 0;
  double lambda = 0;          ///< extrapolated
  int node_count = 0;
  std::vector<std::size_t> grid_sizes;
  std::vector<double> raw;    ///< per grid, coarsest first
  double error_estimate = 0;
  std::vector<double> r, z;   ///< finest grid, boundary nodes included
};

/// Extrapolated lowest eigenvalues. Throws NumericalError if a node count
/// differs from j - 1.
std::vector<EigenResult> eigenvalues(const SLProblem& problem, int count, const SpectralOptions& options = {});

/// Potential (p) r^alpha u^{p-1} on the unit ball, first node 1e-6 / rho_eps.
SLProblem unit_ball_problem(const RadialProfile& profile, double r_first = 1e-6);
/// Potential (p) C r^alpha w^{p-1} on (0, rho_eps).
SLProblem rho_ball_problem(const RescaledProfile& rescaled, double r_first = 1e-6);
/// Bubble potential on (0, r_trunc).
SLProblem limit_problem(int dim, double alpha, double r_trunc, double r_first = 1e-6);
/// Unit-ball potential, plain weight, natural condition at the first node.
SLProblem radial_plain_problem(const RadialProfile& profile, double r_first = 1e-6);

std::vector<EigenResult> unit_ball_spectrum(const RadialProfile& profile, int count,
                                            const SpectralOptions& options = {});

struct LimitEigen {
  int dim = 0;
  double alpha = 0;
  double r_trunc = 0;
  std::vector<EigenResult> at_r, at_2r;
  double lambda1 = 0, lambda2 = 0;  ///< truncation-extrapolated
  double error1 = 0, error2 = 0;    ///< grid error estimates
  double sensitivity1 = 0, sensitivity2 = 0;  ///< |Λ(2R) - Λ(R)|
};

/// Lowest two eigenvalues of the truncated limit problem at R and 2R. The
/// truncation error of a Dirichlet end at R behaves like R^{-2k},
/// k = sqrt(((N-2)/2)^2 - Λ); the reported pair removes that term.
LimitEigen limit_eigen(int dim, double alpha, double r_trunc = 1e3, const SpectralOptions& options = {});

struct RadialKernel {
  double v1 = 0;               ///< v(1) of the linearized radial IVP
  double dv1 = 0;
  double plain_gap = 0;        ///< min |mu| over the plain-weight pencil spectrum
  int plain_negative = 0;      ///< eigenvalues below 0 of that pencil
};

/// v'' + (N-1)/r v' + p r^alpha u^{p-1} v = 0, v(0) = 1, v'(0) = 0, integrated
/// alongside the shot; plus the plain-weight pencil cross-check.
RadialKernel radial_kernel_test(const RadialProfile& profile, const SpectralOptions& options = {});

/// max_j |Λ_j(unit ball) - Λ_j(rho ball)| for j <= j_max.
double scale_equivalence_test(const RadialProfile& profile, const RescaledProfile& rescaled, int j_max,
                              const SpectralOptions& options = {});

/// Smallest C with |z| <= C r^{2-N} and |z'| <= C r^{1-N} on r >= r_min.
double eigfun_decay_check(const EigenResult& eig, int dim, double r_min = 1.0);

/// sum_i mass_i z1_i z2_i / sqrt(norms), on the finest grid of two results.
double weighted_overlap(const SLProblem& problem, const EigenResult& a, const EigenResult& b,
                        const SpectralOptions& options = {});

/// psi(r) = r^{-alpha/2} u'(r) solves the weighted linearized equation with
/// Λ = lambda1_closed exactly, though psi(1) != 0. With z the first Dirichlet
/// eigenfunction, Green's identity gives
///   Λ_1 - lambda1_closed = -psi(1) z'(1) / ∫ r^{N-3} z psi dr,
/// which resolves the gap without cancellation.
struct Lambda1Deviation {
  double delta = 0;
  double psi1 = 0;
  double dz1 = 0;
  double overlap = 0;
};
Lambda1Deviation lambda1_deviation(const RadialProfile& profile, const SpectralOptions& options = {});
/// Same, reusing the first result of unit_ball_spectrum(profile, ., options).
Lambda1Deviation lambda1_deviation(const RadialProfile& profile, const EigenResult& first,
                                   const SpectralOptions& options = {});

/// Eigenvalues below 0 of the plain-weight radial pencil on the finest grid.
int plain_negative_count(const RadialProfile& profile, const SpectralOptions& options = {});

struct PruferOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double tol = 1e-11;  ///< eigenvalue tolerance
};

/// Eigenvalues of the problem below lambda, by forward Prüfer angle.
int prufer_count(const SLProblem& problem, double lambda, const PruferOptions& options = {});

/// Λ_j by two-sided Prüfer matching in s = log r. The mismatch must change
/// sign on [lo, hi], otherwise BracketError.
double prufer_eigen(const SLProblem& problem, int j, double lo, double hi, const PruferOptions& options = {});

}  // namespace henon
