#include <cmath>

#include "doctest.h"
#include "henon/ode.hpp"

using namespace henon;
using namespace henon::ode;

namespace {

template <std::size_t D>
State<D> integrate(Method m, Rhs<D> f, State<D> y0, double t0, double t1, StepControl c) {
  AdaptiveStepper<D> s(m, std::move(f), c);
  s.reset(t0, y0);
  while (s.step_toward(t1)) {
  }
  CHECK(s.t() == t1);
  return s.y();
}

}  // namespace

TEST_CASE("exponential growth") {
  for (Method m : {Method::dop853, Method::dopri5}) {
    StepControl c;
    c.rtol = 1e-12;
    c.atol = 1e-14;
    const auto y = integrate<1>(m, [](double, const State<1>& y, State<1>& f) { f[0] = y[0]; }, {1.0}, 0.0, 3.0, c);
    CHECK(y[0] == doctest::Approx(std::exp(3.0)).epsilon(1e-10));
  }
}

TEST_CASE("harmonic oscillator over ten periods") {
  for (Method m : {Method::dop853, Method::dopri5}) {
    StepControl c;
    c.rtol = 1e-11;
    c.atol = 1e-13;
    const double t1 = 20 * M_PI;
    const auto y = integrate<2>(
        m, [](double, const State<2>& y, State<2>& f) { f = {y[1], -y[0]}; }, {0.0, 1.0}, 0.0, t1, c);
    CHECK(std::abs(y[0] - std::sin(t1)) < 1e-8);
    CHECK(std::abs(y[1] - std::cos(t1)) < 1e-8);
  }
}

TEST_CASE("accuracy follows the tolerance") {
  auto err = [](Method m, double tol) {
    StepControl c;
    c.rtol = tol;
    c.atol = tol * 1e-2;
    const auto y = integrate<2>(
        m, [](double t, const State<2>& y, State<2>& f) { f = {y[1], -y[0] / (1 + t)}; }, {1.0, 0.0}, 0.0, 5.0, c);
    StepControl ref;
    ref.rtol = 1e-14;
    ref.atol = 1e-16;
    const auto z = integrate<2>(
        Method::dop853, [](double t, const State<2>& y, State<2>& f) { f = {y[1], -y[0] / (1 + t)}; }, {1.0, 0.0}, 0.0,
        5.0, ref);
    return std::abs(y[0] - z[0]);
  };
  for (Method m : {Method::dop853, Method::dopri5}) {
    CHECK(err(m, 1e-6) < 1e-4);
    CHECK(err(m, 1e-10) < 1e-8);
    CHECK(err(m, 1e-10) < err(m, 1e-6));
  }
}

TEST_CASE("backward integration and exact landing") {
  StepControl c;
  const auto y = integrate<1>(Method::dop853, [](double, const State<1>& y, State<1>& f) { f[0] = -y[0]; }, {1.0}, 2.0,
                              0.5, c);
  CHECK(y[0] == doctest::Approx(std::exp(1.5)).epsilon(1e-9));
}

TEST_CASE("span below one ulp of t is landed") {
  AdaptiveStepper<1> s(Method::dop853, [](double, const State<1>& y, State<1>& f) { f[0] = y[0]; });
  const double t0 = 1e-6;
  s.reset(t0, {1.0});
  const double t1 = std::nextafter(t0, 1.0);
  CHECK(s.step_toward(t1));
  CHECK(s.t() == t1);
  CHECK_FALSE(s.step_toward(t1));
}

TEST_CASE("step budget is enforced") {
  StepControl c;
  c.max_steps = 5;
  AdaptiveStepper<2> s(Method::dopri5, [](double, const State<2>& y, State<2>& f) { f = {y[1], -1e4 * y[0]}; }, c);
  s.reset(0.0, {1.0, 0.0});
  CHECK_THROWS_AS(
      [&] {
        while (s.step_toward(100.0)) {
        }
      }(),
      IntegrationError);
}

TEST_CASE("trial step matches the local Taylor expansion") {
  AdaptiveStepper<1> s(Method::dop853, [](double, const State<1>& y, State<1>& f) { f[0] = y[0]; });
  const auto y = s.trial_step(0.0, {1.0}, 0.1);
  CHECK(y[0] == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
}
