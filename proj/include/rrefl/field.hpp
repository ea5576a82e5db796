#pragma once

// Discrete pseudo-potential on the mapped grid together with the geometry it
// was computed on.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rrefl/geometry.hpp"
#include "rrefl/square_map.hpp"

namespace rrefl {

struct IterationParams {
  /// Width of the cutoff band near the sonic side, as a fraction of c2.
  double cutoff_width = 0.1;
  /// Depth kappa of the Mach-number cap 1 - kappa inside the band.
  double cutoff_depth = 0.05;
  bool cutoff_enabled = true;
  double relax = 0.5;
  /// History depth of Anderson mixing on the shock nodes (0 = plain relaxation).
  int anderson_depth = 5;
  /// Bound on both the shock movement and the C^1 change of the potential
  /// between outer iterates.
  double tol_fixed_point = 1e-9;
  int max_outer = 400;
  double newton_tol = 1e-10;
  int max_newton = 40;
  double stretch = kDefaultStretch;
  /// Width of the subsonic-near-sonic band in the regime classification.
  double sigma = kDefaultSigma;
};

struct OuterRecord {
  int iteration = 0;
  double shock_movement = 0.0;
  double interior_residual = 0.0;
  /// sup |d psi| + sup |D d psi| between consecutive outer iterates.
  double field_change = 0.0;
};

struct SolutionField {
  ReflectionConfiguration config;
  ShockCurve shock;
  SquareMap map;
  std::vector<double> phi;
  IterationParams iter;
  std::vector<OuterRecord> residual_history;
  std::string status = "converged";

  double theta_w() const { return config.theta_w; }
  int n1() const { return map.n1(); }
  int n2() const { return map.n2(); }

  /// phi - phi2 at the nodes.
  std::vector<double> psi() const {
    std::vector<double> out(phi.size());
    const auto& nodes = map.nodes();
    for (std::size_t k = 0; k < phi.size(); ++k) out[k] = phi[k] - config.state2.potential(nodes[k]);
    return out;
  }
};

namespace detail {

inline auto index_derivative(const auto& v, int k, int n) {
  if (k == 0) return 0.5 * (-3.0 * v(0) + 4.0 * v(1) - v(2));
  if (k == n - 1) return 0.5 * (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3));
  return 0.5 * (v(k + 1) - v(k - 1));
}

}  // namespace detail

/// Second-order nodal gradients of a grid function, computed by differencing
/// the function and the node coordinates in index space.
inline std::vector<Vec2> node_gradients(const SquareMap& map, const std::vector<double>& f) {
  const int n1 = map.n1(), n2 = map.n2();
  std::vector<Vec2> out(map.size());
  std::vector<bool> singular(map.size(), false);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const auto fi = [&](int k) { return f[map.index(k, j)]; };
      const auto fj = [&](int k) { return f[map.index(i, k)]; };
      const auto xi = [&](int k) { return map.node(k, j); };
      const auto xj = [&](int k) { return map.node(i, k); };
      const double di = detail::index_derivative(fi, i, n1);
      const double dj = detail::index_derivative(fj, j, n2);
      const Vec2 ti = detail::index_derivative(xi, i, n1);
      const Vec2 tj = detail::index_derivative(xj, j, n2);
      const double det = cross(ti, tj);
      if (std::abs(det) <= 1e-14 * (norm_sq(ti) + norm_sq(tj)) || norm_sq(ti) == 0.0) {
        singular[map.index(i, j)] = true;
        continue;
      }
      out[map.index(i, j)] = Vec2{tj.y * di - ti.y * dj, -tj.x * di + ti.x * dj} / det;
    }
  }
  // Collapsed sonic side (subsonic case): borrow the next row.
  for (int i = 0; i < n1; ++i) {
    if (singular[map.index(i, 0)]) out[map.index(i, 0)] = out[map.index(i, 1)];
  }
  return out;
}

struct FieldSample {
  double phi;
  Vec2 grad;
};

/// phi and Dphi at every node, with the state-(2) part taken exactly.
inline std::vector<FieldSample> node_samples(const SolutionField& sol) {
  const auto psi = sol.psi();
  const auto g = node_gradients(sol.map, psi);
  std::vector<FieldSample> out(psi.size());
  const auto& nodes = sol.map.nodes();
  for (std::size_t k = 0; k < psi.size(); ++k) {
    out[k] = {sol.phi[k], sol.config.state2.gradient(nodes[k]) + g[k]};
  }
  return out;
}

/// Bilinear interpolation of phi and Dphi at a physical point of Omega.
inline std::optional<FieldSample> interpolate(const SolutionField& sol, const std::vector<FieldSample>& samples,
                                              Vec2 xi) {
  const auto loc = sol.map.find(xi);
  if (!loc) return std::nullopt;
  const auto& s2 = sol.config.state2;
  const double w[4] = {(1 - loc->a) * (1 - loc->b), loc->a * (1 - loc->b), (1 - loc->a) * loc->b, loc->a * loc->b};
  const std::size_t ids[4] = {sol.map.index(loc->i, loc->j), sol.map.index(loc->i + 1, loc->j),
                              sol.map.index(loc->i, loc->j + 1), sol.map.index(loc->i + 1, loc->j + 1)};
  FieldSample out{s2.potential(xi), s2.gradient(xi)};
  const auto& nodes = sol.map.nodes();
  for (int k = 0; k < 4; ++k) {
    const auto& smp = samples[ids[k]];
    out.phi += w[k] * (smp.phi - s2.potential(nodes[ids[k]]));
    out.grad += w[k] * (smp.grad - s2.gradient(nodes[ids[k]]));
  }
  return out;
}

}  // namespace rrefl
