#pragma once

// Continuation in the wedge angle from the normal reflection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/family_distance.hpp"
#include "rrefl/solver.hpp"

namespace rrefl {

inline constexpr int kMaxStepHalvings = 6;

struct SweepResult {
  std::vector<SolutionField> family;
  std::vector<double> distances;  // between consecutive members
  std::optional<ErrorKind> stop;
  std::string message;

  bool complete() const { return !stop.has_value(); }
};

using MemberObserver = std::function<void(const SolutionField&)>;

namespace detail {

inline bool retry_with_smaller_step(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::GraphPropertyLost:
    case ErrorKind::FoldedMesh:
    case ErrorKind::EllipticityLost:
    case ErrorKind::VacuumReached:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// Solves at `target` starting from `from`, halving the angle step on
/// recoverable failures. Intermediate angles only serve as warm starts.
inline SolutionField continue_to(const GasParams& params, const SolutionField& from, double target,
                                 const IterationParams& it, int n1, int n2) {
  SolutionField cur = from;
  double reached = from.theta_w();
  double step = target - reached;
  int halvings = 0;
  while (reached != target) {
    const double next = step < 0.0 ? std::max(target, reached + step) : std::min(target, reached + step);
    try {
      cur = fixed_point_solve(params, next, it, cur, n1, n2);
      reached = next;
    } catch (const Error& e) {
      if (!detail::retry_with_smaller_step(e.kind()) || halvings >= kMaxStepHalvings) throw;
      step *= 0.5;
      ++halvings;
    }
  }
  return cur;
}

/// Solution at an isolated angle, reached from the normal reflection in
/// steps of at most `step` radians.
inline SolutionField solve_from_normal(const GasParams& params, double theta, const IterationParams& it, int n1,
                                       int n2, double step) {
  if (!(step > 0.0)) fail(ErrorKind::InvalidParameter, "continuation step must be positive");
  if (theta > kHalfPi) fail(ErrorKind::InvalidParameter, "wedge angle must not exceed 90 degrees");
  build_configuration(params, theta, it.sigma);
  SolutionField cur = fixed_point_solve(params, kHalfPi, it, normal_reflection(params, n1, n2, it), n1, n2);
  const int steps = std::max(1, static_cast<int>(std::ceil((kHalfPi - theta) / step - 1e-9)));
  for (int k = 1; k <= steps && cur.theta_w() != theta; ++k) {
    const double target = k == steps ? theta : kHalfPi - k * (kHalfPi - theta) / steps;
    cur = continue_to(params, cur, target, it, n1, n2);
  }
  return cur;
}

/// Marches down the angle grid, which must start at pi/2 and decrease. The
/// family and consecutive distances are kept up to the first failure.
inline SweepResult continuation_sweep(const GasParams& params, const std::vector<double>& thetas,
                                      const IterationParams& it, int n1, int n2,
                                      const MemberObserver& observer = {}) {
  if (thetas.empty()) fail(ErrorKind::InvalidParameter, "empty angle grid");
  if (std::abs(thetas.front() - kHalfPi) > 1e-12) fail(ErrorKind::InvalidParameter, "angle grid must start at 90 degrees");
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    if (!(thetas[k] < thetas[k - 1])) fail(ErrorKind::InvalidParameter, "angle grid must be strictly decreasing");
  }
  SweepResult out;
  const SolutionField nr = normal_reflection(params, n1, n2, it);
  out.family.push_back(fixed_point_solve(params, kHalfPi, it, nr, n1, n2));
  if (observer) observer(out.family.back());
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    try {
      SolutionField next = continue_to(params, out.family.back(), thetas[k], it, n1, n2);
      out.distances.push_back(c1_family_distance(out.family.back(), next));
      out.family.push_back(std::move(next));
      if (observer) observer(out.family.back());
    } catch (const Error& e) {
      out.stop = e.kind();
      out.message = e.what();
      break;
    }
  }
  return out;
}

}  // namespace rrefl
