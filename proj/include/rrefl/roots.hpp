#pragma once

#include <cmath>
#include <utility>

#include "rrefl/errors.hpp"

namespace rrefl::roots {

/// Plain bisection on a bracket with f(lo), f(hi) of opposite sign.
/// Stops when the bracket is below `tol` (absolute) or stops shrinking.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) fail(ErrorKind::BracketingFailure, "bisect: no sign change on bracket");
  for (int it = 0; it < max_iter && std::abs(hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Bisection on a monotone predicate: pred(lo) is false, pred(hi) is true.
/// Returns the final `hi`, i.e. the smallest point found where pred holds.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double tol, int max_iter = 400) {
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pred(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

/// Golden-section search for a maximum of a unimodal f on [a, b].
/// Returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, int iterations = 200) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
    if (!(b - a > 1e-15 * (std::abs(a) + std::abs(b)))) break;
  }
  return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace rrefl::roots
