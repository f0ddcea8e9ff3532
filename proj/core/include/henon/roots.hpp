#pragma once

#include <cmath>
#include <sstream>

#include "henon/errors.hpp"

namespace henon {

struct RootResult {
  double x;
  double fx;
  double lo;
  double hi;
  int iterations;
};

/// Bracketed secant (Illinois regula falsi) with a bisection fallback on
/// [lo, hi], where f(lo) and f(hi) have opposite signs. Stops when |f| <= ftol
/// or the bracket is narrower than xtol.
template <class F>
RootResult find_root(F&& f, double lo, double hi, double flo, double fhi, double xtol, double ftol,
                     int max_iter = 200) {
  if (flo == 0.0) return {lo, 0.0, lo, lo, 0};
  if (fhi == 0.0) return {hi, 0.0, hi, hi, 0};
  if (std::signbit(flo) == std::signbit(fhi)) {
    std::ostringstream os;
    os << "no sign change on [" << lo << ", " << hi << "]: f = " << flo << ", " << fhi;
    throw BracketError(os.str(), lo, hi);
  }
  double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double fbest = std::abs(flo) < std::abs(fhi) ? flo : fhi;
  // Weighted end values for the Illinois modification.
  double glo = flo, ghi = fhi;
  int side = 0;
  int stalled = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const double width = hi - lo;
    double x = hi - ghi * (hi - lo) / (ghi - glo);
    if (!(x > lo && x < hi) || stalled >= 3) {
      x = 0.5 * (lo + hi);
      stalled = 0;
    }
    const double fx = f(x);
    if (std::abs(fx) < std::abs(fbest)) {
      best = x;
      fbest = fx;
    }
    if (fx == 0.0 || std::abs(fx) <= ftol) return {x, fx, lo, hi, it};
    if (std::signbit(fx) == std::signbit(flo)) {
      lo = x;
      flo = glo = fx;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = ghi = fx;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
    stalled = (hi - lo) > 0.5 * width ? stalled + 1 : 0;
    if (hi - lo <= xtol) return {best, fbest, lo, hi, it};
  }
  std::ostringstream os;
  os << "root finder did not converge; bracket [" << lo << ", " << hi << "]";
  throw BracketError(os.str(), lo, hi);
}

}  // namespace henon
