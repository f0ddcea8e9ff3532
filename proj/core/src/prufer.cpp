#include <cmath>
#include <numbers>

#include "henon/errors.hpp"
#include "henon/ode.hpp"
#include "henon/roots.hpp"
#include "henon/spectral.hpp"

namespace henon {

namespace {

// Liouville form in s = log r: -y'' + V y = Λ y, V = ((N-2)/2)^2 - r^2 q(r).
struct Liouville {
  const SLProblem& pr;
  double beta2;
  double s_a, s_b;

  explicit Liouville(const SLProblem& p)
      : pr(p), beta2(0.25 * (p.dim - 2.0) * (p.dim - 2.0)), s_a(std::log(p.r_first)), s_b(std::log(p.r_end)) {
    if (!pr.q) throw DomainError("spectral problem has no potential");
    if (pr.weight != SpectralWeight::inverse_square || pr.left != LeftBoundary::dirichlet)
      throw DomainError("the angle oracle handles the inverse square weight with Dirichlet ends only");
    if (!(pr.r_first > 0.0) || !(pr.r_end > pr.r_first)) throw DomainError("invalid spectral domain");
  }

  double v(double s) const {
    const double r = std::exp(s);
    return beta2 - r * r * pr.q(r);
  }

  double angle(double lambda, double from, double to, double theta0, const PruferOptions& o) const {
    ode::StepControl ctl;
    ctl.rtol = o.rtol;
    ctl.atol = o.atol;
    ode::Rhs<1> rhs = [this, lambda, from, to](double t, const ode::State<1>& y, ode::State<1>& dy) {
      const double s = from < to ? t : -t;
      const double c = std::cos(y[0]), sn = std::sin(y[0]);
      const double d = c * c + (lambda - v(s)) * sn * sn;
      dy[0] = from < to ? d : -d;
    };
    const double t0 = from < to ? from : -from;
    const double t1 = from < to ? to : -to;
    ode::AdaptiveStepper<1> st(ode::Method::dop853, rhs, ctl);
    st.reset(t0, {theta0});
    while (st.t() < t1) st.step_toward(t1);
    return st.y()[0];
  }

  double match_point() const {
    constexpr int samples = 2000;
    double best = s_a, vbest = v(s_a);
    for (int i = 1; i < samples; ++i) {
      const double s = s_a + (s_b - s_a) * i / samples;
      const double vs = v(s);
      if (vs < vbest) {
        vbest = vs;
        best = s;
      }
    }
    return best;
  }
};

}  // namespace

int prufer_count(const SLProblem& problem, double lambda, const PruferOptions& o) {
  const Liouville lv(problem);
  const double theta = lv.angle(lambda, lv.s_a, lv.s_b, 0.0, o);
  return static_cast<int>(std::floor(theta / std::numbers::pi));
}

double prufer_eigen(const SLProblem& problem, int j, double lo, double hi, const PruferOptions& o) {
  if (j < 1) throw DomainError("eigenvalue index must be positive");
  if (!(lo < hi)) throw DomainError("empty eigenvalue bracket");
  const Liouville lv(problem);
  const double sm = lv.match_point();
  auto mismatch = [&](double lambda) {
    const double left = lv.angle(lambda, lv.s_a, sm, 0.0, o);
    const double right = lv.angle(lambda, lv.s_b, sm, j * std::numbers::pi, o);
    return left - right;
  };
  const auto root = find_root(mismatch, lo, hi, mismatch(lo), mismatch(hi), o.tol, 0.0);
  return root.x;
}

}  // namespace henon
