#pragma once

// Explicit embedded Runge-Kutta integrators with adaptive step control.
//
// Two schemes are provided so that every shooting result can be confirmed by an
// integrator of different order and step controller:
//   * dop853 : Dormand-Prince 8(5,3), combined 5th/3rd order error estimate,
//              integral step controller;
//   * dopri5 : Dormand-Prince 5(4), PI step controller.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>

#include "henon/errors.hpp"

namespace henon::ode {

enum class Method { dop853, dopri5 };

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  ///< 0 selects an automatic initial step
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

template <std::size_t D>
using State = std::array<double, D>;

template <std::size_t D>
using Rhs = std::function<void(double, const State<D>&, State<D>&)>;

namespace detail {

// DOP853 coefficients (Hairer & Wanner).
struct Dop853 {
  static constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                          c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                          c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                          c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                          c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
  static constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                          b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                          b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                          b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
  static constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                          bhh3 = 0.220588235294117647058823529412E-01;
  static constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                          er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                          er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                          er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;
  static constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                          a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                          a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                          a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                          a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                          a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                          a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                          a76 = -1.7578125E-2, a81 = 3.70920001185047927108779319836E-2,
                          a84 = 1.70383925712239993810214054705E-1, a85 = 1.07262030446373284651809199168E-1,
                          a86 = -1.53194377486244017527936158236E-2, a87 = 8.27378916381402288758473766002E-3,
                          a91 = 6.24110958716075717114429577812E-1, a94 = -3.36089262944694129406857109825E0,
                          a95 = -8.68219346841726006818189891453E-1, a96 = 2.75920996994467083049415600797E1,
                          a97 = 2.01540675504778934086186788979E1, a98 = -4.34898841810699588477366255144E1,
                          a101 = 4.77662536438264365890433908527E-1, a104 = -2.48811461997166764192642586468E0,
                          a105 = -5.90290826836842996371446475743E-1, a106 = 2.12300514481811942347288949897E1,
                          a107 = 1.52792336328824235832596922938E1, a108 = -3.32882109689848629194453265587E1,
                          a109 = -2.03312017085086261358222928593E-2, a111 = -9.3714243008598732571704021658E-1,
                          a114 = 5.18637242884406370830023853209E0, a115 = 1.09143734899672957818500254654E0,
                          a116 = -8.14978701074692612513997267357E0, a117 = -1.85200656599969598641566180701E1,
                          a118 = 2.27394870993505042818970056734E1, a119 = 2.49360555267965238987089396762E0,
                          a1110 = -3.0467644718982195003823669022E0, a121 = 2.27331014751653820792359768449E0,
                          a124 = -1.05344954667372501984066689879E1, a125 = -2.00087205822486249909675718444E0,
                          a126 = -1.79589318631187989172765950534E1, a127 = 2.79488845294199600508499808837E1,
                          a128 = -2.85899827713502369474065508674E0, a129 = -8.87285693353062954433549289258E0,
                          a1210 = 1.23605671757943030647266201528E1, a1211 = 6.43392746015763530355970484046E-1;
};

// Dormand-Prince 5(4).
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Adaptive one-step driver. The owner advances it with step_toward() and reads
/// the last accepted step from (t_prev, y_prev) -> (t, y).
template <std::size_t D>
class AdaptiveStepper {
 public:
  using Vec = State<D>;

  AdaptiveStepper(Method method, Rhs<D> rhs, StepControl control = {})
      : method_(method), rhs_(std::move(rhs)), control_(control) {}

  void reset(double t, const Vec& y) {
    t_ = t_prev_ = t;
    y_ = y_prev_ = y;
    rhs_(t_, y_, f_);
    h_ = 0.0;
    fac_old_ = 1e-4;
    steps_ = 0;
    rejected_ = false;
  }

  /// Takes one accepted step in the direction of t_limit, landing exactly on it
  /// if it is within reach. Returns false if already there.
  bool step_toward(double t_limit) {
    const double span = t_limit - t_;
    if (span == 0.0) return false;
    if (std::abs(span) < 64.0 * std::numeric_limits<double>::epsilon() * std::abs(t_)) {
      // Below the resolvable step: one Euler step onto the target.
      t_prev_ = t_;
      y_prev_ = y_;
      for (std::size_t i = 0; i < D; ++i) y_[i] += span * f_[i];
      t_ = t_limit;
      rhs_(t_, y_, f_);
      return true;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    if (h_ == 0.0) h_ = control_.h_init > 0 ? control_.h_init : initial_step(dir, std::abs(span));
    h_ = std::min(std::abs(h_), control_.h_max);

    while (true) {
      if (++steps_ > control_.max_steps) fail("maximum number of steps exceeded");
      if (h_ < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t_), 1e-300))
        fail("step size underflow");

      bool last = false;
      const double h_wanted = h_;
      double h = h_;
      if (h >= std::abs(span) * (1.0 - 1e-12) || std::abs(span) - h < 0.01 * h) {
        h = std::abs(span);
        last = true;
      }
      Vec y_new;
      const double err = attempt(t_, y_, f_, dir * h, y_new);
      const double order_exp = method_ == Method::dop853 ? 1.0 / 8.0 : 1.0 / 5.0;
      const double beta = method_ == Method::dop853 ? 0.0 : 0.04;
      if (err <= 1.0) {
        double fac = std::pow(std::max(err, 1e-16), order_exp - 0.75 * beta) * std::pow(fac_old_, beta) / 0.9;
        fac = std::clamp(fac, 1.0 / 6.0, 1.0 / 0.333);
        fac_old_ = std::max(err, 1e-4);
        t_prev_ = t_;
        y_prev_ = y_;
        t_ = last ? t_limit : t_ + dir * h;
        y_ = y_new;
        rhs_(t_, y_, f_);
        double h_next = h / fac;
        if (rejected_) h_next = std::min(h_next, h);
        rejected_ = false;
        // A step cut short by a stop point says nothing about the right step size.
        h_ = (last && h < h_wanted) ? h_wanted : h_next;
        return true;
      }
      rejected_ = true;
      h_ = h / std::min(1.0 / 0.333, std::pow(err, order_exp) / 0.9);
    }
  }

  /// One unadapted step of size h from (t0, y0); used to polish events.
  Vec trial_step(double t0, const Vec& y0, double h) const {
    Vec f0;
    rhs_(t0, y0, f0);
    Vec y1;
    attempt(t0, y0, f0, h, y1);
    return y1;
  }

  double t() const noexcept { return t_; }
  const Vec& y() const noexcept { return y_; }
  double t_prev() const noexcept { return t_prev_; }
  const Vec& y_prev() const noexcept { return y_prev_; }
  std::size_t steps() const noexcept { return steps_; }
  Method method() const noexcept { return method_; }

 private:
  [[noreturn]] void fail(const char* why) const {
    std::ostringstream os;
    os << "integration failure at t = " << t_ << ": " << why;
    throw IntegrationError(os.str());
  }

  double scale(std::size_t i, const Vec& a, const Vec& b) const {
    return control_.atol + control_.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  }

  double initial_step(double dir, double span) const {
    Vec sc{};
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double s = control_.atol + control_.rtol * std::abs(y_[i]);
      d0 += (y_[i] / s) * (y_[i] / s);
      d1 += (f_[i] / s) * (f_[i] / s);
      sc[i] = s;
    }
    d0 = std::sqrt(d0 / D);
    d1 = std::sqrt(d1 / D);
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 * std::max(span, 1e-300) : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vec y1, f1;
    for (std::size_t i = 0; i < D; ++i) y1[i] = y_[i] + dir * h0 * f_[i];
    rhs_(t_ + dir * h0, y1, f1);
    double d2 = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double v = (f1[i] - f_[i]) / sc[i];
      d2 += v * v;
    }
    d2 = std::sqrt(d2 / D) / h0;
    const double order = method_ == Method::dop853 ? 8.0 : 5.0;
    const double dd = std::max(d1, d2);
    const double h1 = dd <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dd, 1.0 / order);
    return std::min({100.0 * h0, h1, span, control_.h_max});
  }

  double attempt(double t, const Vec& y, const Vec& k1, double h, Vec& y_new) const {
    return method_ == Method::dop853 ? attempt853(t, y, k1, h, y_new) : attempt5(t, y, k1, h, y_new);
  }

  double attempt853(double t, const Vec& y, const Vec& k1, double h, Vec& y_new) const {
    using C = detail::Dop853;
    Vec k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, w;
    auto stage = [&](double c, auto&& combine, Vec& out) {
      for (std::size_t i = 0; i < D; ++i) w[i] = y[i] + h * combine(i);
      rhs_(t + c * h, w, out);
    };
    stage(C::c2, [&](std::size_t i) { return C::a21 * k1[i]; }, k2);
    stage(C::c3, [&](std::size_t i) { return C::a31 * k1[i] + C::a32 * k2[i]; }, k3);
    stage(C::c4, [&](std::size_t i) { return C::a41 * k1[i] + C::a43 * k3[i]; }, k4);
    stage(C::c5, [&](std::size_t i) { return C::a51 * k1[i] + C::a53 * k3[i] + C::a54 * k4[i]; }, k5);
    stage(C::c6, [&](std::size_t i) { return C::a61 * k1[i] + C::a64 * k4[i] + C::a65 * k5[i]; }, k6);
    stage(C::c7, [&](std::size_t i) { return C::a71 * k1[i] + C::a74 * k4[i] + C::a75 * k5[i] + C::a76 * k6[i]; },
          k7);
    stage(C::c8,
          [&](std::size_t i) {
            return C::a81 * k1[i] + C::a84 * k4[i] + C::a85 * k5[i] + C::a86 * k6[i] + C::a87 * k7[i];
          },
          k8);
    stage(C::c9,
          [&](std::size_t i) {
            return C::a91 * k1[i] + C::a94 * k4[i] + C::a95 * k5[i] + C::a96 * k6[i] + C::a97 * k7[i] +
                   C::a98 * k8[i];
          },
          k9);
    stage(C::c10,
          [&](std::size_t i) {
            return C::a101 * k1[i] + C::a104 * k4[i] + C::a105 * k5[i] + C::a106 * k6[i] + C::a107 * k7[i] +
                   C::a108 * k8[i] + C::a109 * k9[i];
          },
          k10);
    stage(C::c11,
          [&](std::size_t i) {
            return C::a111 * k1[i] + C::a114 * k4[i] + C::a115 * k5[i] + C::a116 * k6[i] + C::a117 * k7[i] +
                   C::a118 * k8[i] + C::a119 * k9[i] + C::a1110 * k10[i];
          },
          k11);
    stage(1.0,
          [&](std::size_t i) {
            return C::a121 * k1[i] + C::a124 * k4[i] + C::a125 * k5[i] + C::a126 * k6[i] + C::a127 * k7[i] +
                   C::a128 * k8[i] + C::a129 * k9[i] + C::a1210 * k10[i] + C::a1211 * k11[i];
          },
          k12);
    double err5 = 0, err3 = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double kb = C::b1 * k1[i] + C::b6 * k6[i] + C::b7 * k7[i] + C::b8 * k8[i] + C::b9 * k9[i] +
                        C::b10 * k10[i] + C::b11 * k11[i] + C::b12 * k12[i];
      y_new[i] = y[i] + h * kb;
    }
    for (std::size_t i = 0; i < D; ++i) {
      const double kb = (y_new[i] - y[i]) / h;
      const double sk = 1.0 / scale(i, y, y_new);
      const double e3 = (kb - C::bhh1 * k1[i] - C::bhh2 * k9[i] - C::bhh3 * k12[i]) * sk;
      const double e5 = (C::er1 * k1[i] + C::er6 * k6[i] + C::er7 * k7[i] + C::er8 * k8[i] + C::er9 * k9[i] +
                         C::er10 * k10[i] + C::er11 * k11[i] + C::er12 * k12[i]) *
                        sk;
      err3 += e3 * e3;
      err5 += e5 * e5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err5 * std::sqrt(1.0 / (deno * D));
  }

  double attempt5(double t, const Vec& y, const Vec& k1, double h, Vec& y_new) const {
    using C = detail::Dopri5;
    Vec k2, k3, k4, k5, k6, k7, w;
    for (std::size_t i = 0; i < D; ++i) w[i] = y[i] + h * C::a21 * k1[i];
    rhs_(t + C::c2 * h, w, k2);
    for (std::size_t i = 0; i < D; ++i) w[i] = y[i] + h * (C::a31 * k1[i] + C::a32 * k2[i]);
    rhs_(t + C::c3 * h, w, k3);
    for (std::size_t i = 0; i < D; ++i) w[i] = y[i] + h * (C::a41 * k1[i] + C::a42 * k2[i] + C::a43 * k3[i]);
    rhs_(t + C::c4 * h, w, k4);
    for (std::size_t i = 0; i < D; ++i)
      w[i] = y[i] + h * (C::a51 * k1[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
    rhs_(t + C::c5 * h, w, k5);
    for (std::size_t i = 0; i < D; ++i)
      w[i] = y[i] + h * (C::a61 * k1[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] + C::a65 * k5[i]);
    rhs_(t + h, w, k6);
    for (std::size_t i = 0; i < D; ++i)
      y_new[i] = y[i] + h * (C::b1 * k1[i] + C::b3 * k3[i] + C::b4 * k4[i] + C::b5 * k5[i] + C::b6 * k6[i]);
    rhs_(t + h, y_new, k7);
    double err = 0;
    for (std::size_t i = 0; i < D; ++i) {
      const double e =
          h * (C::e1 * k1[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] + C::e6 * k6[i] + C::e7 * k7[i]);
      const double s = e / scale(i, y, y_new);
      err += s * s;
    }
    return std::sqrt(err / D);
  }

  Method method_;
  Rhs<D> rhs_;
  StepControl control_;
  double t_ = 0, t_prev_ = 0, h_ = 0, fac_old_ = 1e-4;
  Vec y_{}, y_prev_{}, f_{};
  std::size_t steps_ = 0;
  bool rejected_ = false;
};

}  // namespace henon::ode
