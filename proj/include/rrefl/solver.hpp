#pragma once

// Free-boundary iteration: for a fixed shock, solve the boundary value problem
// with the mass flux condition on the shock; then move the shock to the zero
// set of phi - phi1; repeat until the shock stops moving.

#include <Eigen/Sparse>
#include <Eigen/QR>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/field.hpp"
#include "rrefl/fv_operator.hpp"
#include "rrefl/geometry.hpp"
#include "rrefl/shock_relations.hpp"
#include "rrefl/square_map.hpp"

namespace rrefl {

inline double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

/// Mach-squared cap of the flux: max(1 - zeta(d), M2^2(x)), where zeta falls
/// from the cutoff depth at the sonic side to 0 at distance cutoff_width * c2
/// and M2 is the local Mach number of state (2), so state (2) is never cut.
inline double mach_cap(const ReflectionConfiguration& cfg, const IterationParams& it, Vec2 x) {
  if (!it.cutoff_enabled) return std::numeric_limits<double>::infinity();
  const double width = it.cutoff_width * cfg.sonic_radius;
  const double zeta = it.cutoff_depth * (1.0 - smoothstep(cfg.sonic_distance(x) / width));
  const double m2 = norm_sq(cfg.state2.gradient(x)) / (cfg.state2.c * cfg.state2.c);
  return std::max(1.0 - zeta, m2);
}

/// Cutoff is switched off in the regime where the equation stays uniformly elliptic.
inline IterationParams effective_params(const ReflectionConfiguration& cfg, IterationParams it) {
  if (cfg.regime == Regime::SubsonicAwayFromSonic) it.cutoff_enabled = false;
  return it;
}

inline BvpProblem physical_problem(const ReflectionConfiguration& cfg, const IterationParams& it) {
  BvpProblem p;
  p.reference = cfg.state2;
  const UniformState s1 = cfg.incident.state1;
  const UniformState s2 = cfg.state2;
  const double rho1 = cfg.params.rho1;
  p.dirichlet = [s2](Vec2 x) { return s2.potential(x); };
  p.boundary_flux = [s1, rho1](Side side, Vec2 x, Vec2 n) {
    return side == Side::Shock ? rho1 * dot(s1.gradient(x), n) : 0.0;
  };
  p.mach_cap = [cfg, it](Vec2 x) { return mach_cap(cfg, it, x); };
  return p;
}

struct BvpResult {
  std::vector<double> psi;
  double residual = 0.0;
  int newton_iterations = 0;
  double max_mach_sq_outside_band = 0.0;
};

/// Damped Newton on the discrete equations, starting from psi_init.
inline BvpResult solve_bvp(const SquareMap& map, const GasParams& params, const BvpProblem& problem,
                           std::vector<double> psi_init, const IterationParams& it) {
  FvOperator op(map, params, problem);
  if (psi_init.size() != op.size()) psi_init.assign(op.size(), 0.0);
  for (std::size_t k = 0; k < op.size(); ++k) {
    if (op.is_dirichlet(k)) psi_init[k] = op.dirichlet_values()[k];
  }
  const auto weighted = [&](const std::vector<double>& r) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (op.is_dirichlet(k)) continue;
      const double v = r[k] / op.volumes()[k];
      s += v * v * op.volumes()[k];
    }
    return std::sqrt(s);
  };
  BvpResult res;
  std::vector<double> psi = std::move(psi_init);
  Eigen::SparseMatrix<double> jac;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<double> r = op.linearize(psi, jac);
  for (int n = 0;; ++n) {
    res.residual = op.scaled_norm(r);
    res.newton_iterations = n;
    if (res.residual < it.newton_tol) break;
    if (n >= it.max_newton) {
      fail(ErrorKind::NoConvergence, "Newton iteration stalled at residual " + std::to_string(res.residual));
    }
    jac.makeCompressed();
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) fail(ErrorKind::NoConvergence, "singular Jacobian");
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(r.size()));
    for (std::size_t k = 0; k < r.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = -r[k];
    const Eigen::VectorXd dx = lu.solve(rhs);
    const double r0 = weighted(r);
    double lambda = 1.0;
    bool accepted = false;
    std::vector<double> trial(psi.size());
    for (int ls = 0; ls < 30; ++ls, lambda *= 0.5) {
      for (std::size_t k = 0; k < psi.size(); ++k) trial[k] = psi[k] + lambda * dx[static_cast<Eigen::Index>(k)];
      try {
        const auto rt = op.residual(trial);
        if (weighted(rt) < (1.0 - 1e-4 * lambda) * r0 || op.scaled_norm(rt) < it.newton_tol) {
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::VacuumReached) throw;
      }
    }
    if (!accepted) {
      fail(ErrorKind::NoConvergence, "line search failed at residual " + std::to_string(res.residual));
    }
    psi = trial;
    r = op.linearize(psi, jac);
  }
  res.psi = std::move(psi);
  return res;
}

inline std::vector<double> phi_from_psi(const SquareMap& map, const UniformState& ref, const std::vector<double>& psi) {
  std::vector<double> phi(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) phi[k] = psi[k] + ref.potential(map.nodes()[k]);
  return phi;
}

/// Largest Mach number squared at free nodes farther than the cutoff band
/// from the sonic side.
inline double max_mach_sq_outside_band(const ReflectionConfiguration& cfg, const IterationParams& it,
                                       const SquareMap& map, const std::vector<double>& psi) {
  const auto g = node_gradients(map, psi);
  double m = 0.0;
  for (int j = 1; j < map.n2(); ++j) {
    for (int i = 0; i < map.n1(); ++i) {
      const std::size_t k = map.index(i, j);
      const Vec2 x = map.node(i, j);
      if (cfg.sonic_distance(x) <= it.cutoff_width * cfg.sonic_radius) continue;
      const Vec2 grad = cfg.state2.gradient(x) + g[k];
      const double phi = cfg.state2.potential(x) + psi[k];
      const double rho = density(norm_sq(grad), phi, cfg.params);
      m = std::max(m, norm_sq(grad) / std::pow(rho, cfg.params.gamma - 1.0));
    }
  }
  return m;
}

/// BVP on the current shock for the physical problem.
inline BvpResult solve_bvp(const ReflectionConfiguration& cfg, const SquareMap& map, const IterationParams& it_in,
                           std::vector<double> psi_init) {
  const IterationParams it = effective_params(cfg, it_in);
  BvpResult res = solve_bvp(map, cfg.params, physical_problem(cfg, it), std::move(psi_init), it);
  res.max_mach_sq_outside_band = max_mach_sq_outside_band(cfg, it, map, res.psi);
  if (res.max_mach_sq_outside_band >= 1.0) {
    fail(ErrorKind::EllipticityLost, "Mach number reaches 1 outside the cutoff band (M^2 = " +
                                         std::to_string(res.max_mach_sq_outside_band) + ")");
  }
  return res;
}

inline ShockCurve shock_on_levels(const ReflectionConfiguration& cfg, const std::vector<double>& xs,
                                  const std::vector<double>& levels) {
  ShockCurve sc;
  sc.points.resize(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) sc.points[j] = {xs[j], cfg.p1.y * (1.0 - levels[j])};
  sc.points.front() = cfg.p1;
  return sc;
}

struct ShockUpdate {
  ShockCurve shock;
  double movement = 0.0;
};

/// Moves interior shock nodes along e = (-1, 0) to the zero of the linearly
/// extrapolated phi - phi1; P1 stays pinned and the foot P2 closes the curve
/// with zero slope across the symmetry axis.
inline ShockUpdate update_shock(const ReflectionConfiguration& cfg, const SquareMap& map,
                                const std::vector<double>& psi, const ShockCurve& shock, double relax) {
  const int n2 = map.n2();
  const auto g = node_gradients(map, psi);
  const auto& s1 = cfg.incident.state1;
  const auto& s2 = cfg.state2;
  const Vec2 e{-1.0, 0.0};
  ShockUpdate out;
  out.shock = shock;
  auto& pts = out.shock.points;
  for (int j = 1; j + 1 < n2; ++j) {
    const std::size_t k = map.index(0, j);
    const Vec2 x = map.node(0, j);
    const double h = s2.potential(x) + psi[k] - s1.potential(x);
    const double dh = dot(e, s2.gradient(x) + g[k] - s1.gradient(x));
    if (!(dh > 0.0)) {
      fail(ErrorKind::GraphPropertyLost, "phi - phi1 is not increasing along e at shock node " + std::to_string(j));
    }
    pts[j] = x + (-relax * h / dh) * e;
  }
  // x = a + c y^2 through the three nodes above the foot.
  double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
  for (int j = n2 - 4; j <= n2 - 2; ++j) {
    const double y2 = pts[j].y * pts[j].y;
    s00 += 1.0;
    s01 += y2;
    s11 += y2 * y2;
    b0 += pts[j].x;
    b1 += pts[j].x * y2;
  }
  const double det = s00 * s11 - s01 * s01;
  const double a = (s11 * b0 - s01 * b1) / det;
  pts[n2 - 1] = {a, 0.0};
  for (std::size_t j = 0; j < pts.size(); ++j) out.movement = std::max(out.movement, distance(pts[j], shock.points[j]));
  if (pts.back().x > -kAttachFraction * cfg.sonic_radius) {
    fail(ErrorKind::AttachedShockDetected, "shock foot reached xi1 = " + std::to_string(pts.back().x));
  }
  for (int j = 0; j + 1 < n2; ++j) {
    if (!(pts[j + 1].y < pts[j].y)) fail(ErrorKind::GraphPropertyLost, "shock nodes out of order");
  }
  return out;
}

/// Explicit normal reflection on an n1 x n2 grid.
inline SolutionField normal_reflection(const GasParams& params, int n1, int n2, const IterationParams& it = {}) {
  SolutionField sol;
  sol.config = build_configuration(params, kHalfPi, it.sigma);
  sol.iter = it;
  const auto levels = shock_levels(n2, it.stretch);
  sol.shock = straight_shock(sol.config, levels);
  sol.map = build_square_map(sol.config, sol.shock, n1, n2, it.stretch);
  sol.phi = phi_from_psi(sol.map, sol.config.state2, std::vector<double>(sol.map.size(), 0.0));
  return sol;
}

namespace detail {

inline double lerp_grid(const std::vector<double>& f, int n1, int n2, double s, double t,
                        const std::vector<double>& t_levels) {
  const double fi = s * (n1 - 1);
  const int i = std::clamp(static_cast<int>(fi), 0, n1 - 2);
  const double a = fi - i;
  const auto it = std::upper_bound(t_levels.begin(), t_levels.end(), t);
  const int j = std::clamp(static_cast<int>(it - t_levels.begin()) - 1, 0, n2 - 2);
  const double b = (t - t_levels[j]) / (t_levels[j + 1] - t_levels[j]);
  const auto at = [&](int ii, int jj) { return f[static_cast<std::size_t>(jj) * n1 + ii]; };
  return (1 - a) * (1 - b) * at(i, j) + a * (1 - b) * at(i + 1, j) + (1 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1);
}

}  // namespace detail

/// Warm start on a new configuration: the shock is carried by the affine map
/// taking the old (P1, P2) to the new P1 and the old foot; psi is carried on
/// the unit square.
inline std::pair<ShockCurve, std::vector<double>> transport(const SolutionField& from,
                                                            const ReflectionConfiguration& cfg, int n1, int n2,
                                                            double beta) {
  const auto levels = shock_levels(n2, beta);
  const Vec2 op1 = from.shock.points.front();
  const Vec2 op2 = from.shock.points.back();
  const Vec2 np1 = cfg.p1;
  const Vec2 np2 = op2;
  std::vector<double> xs(n2);
  // Old shock as x(y), sampled at the new levels after scaling y.
  const auto& old = from.shock.points;
  for (int j = 0; j < n2; ++j) {
    const double frac = 1.0 - levels[j];  // y / y(P1) on both curves
    const double y_old = op1.y * frac;
    std::size_t k = 0;
    while (k + 2 < old.size() && old[k + 1].y > y_old) ++k;
    const double w = (old[k].y - y_old) / (old[k].y - old[k + 1].y);
    const double x_old = old[k].x + w * (old[k + 1].x - old[k].x);
    xs[j] = x_old + frac * (np1.x - op1.x) + (1.0 - frac) * (np2.x - op2.x);
  }
  ShockCurve shock = shock_on_levels(cfg, xs, levels);
  const auto old_psi = from.psi();
  std::vector<double> psi(static_cast<std::size_t>(n1) * n2);
  const bool same = from.n1() == n1 && from.n2() == n2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n1 + i;
      psi[k] = same ? old_psi[k]
                    : detail::lerp_grid(old_psi, from.n1(), from.n2(), static_cast<double>(i) / (n1 - 1), levels[j],
                                        from.map.t_levels());
    }
  }
  return {shock, psi};
}

using OuterObserver = std::function<void(const OuterRecord&)>;

namespace detail {

/// Anderson mixing for x = G(x) on the shock abscissae.
class AndersonMixer {
 public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  std::vector<double> next(const std::vector<double>& x, const std::vector<double>& gx) {
    const std::size_t n = x.size();
    Eigen::VectorXd f(static_cast<Eigen::Index>(n));
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      f[static_cast<Eigen::Index>(k)] = gx[k] - x[k];
      g[static_cast<Eigen::Index>(k)] = gx[k];
    }
    if (has_prev_) {
      df_.push_back(f - f_prev_);
      dg_.push_back(g - g_prev_);
      if (static_cast<int>(df_.size()) > depth_) {
        df_.erase(df_.begin());
        dg_.erase(dg_.begin());
      }
    }
    f_prev_ = f;
    g_prev_ = g;
    has_prev_ = true;
    if (depth_ <= 0 || df_.empty()) return gx;
    const Eigen::Index m = static_cast<Eigen::Index>(df_.size());
    Eigen::MatrixXd F(static_cast<Eigen::Index>(n), m);
    Eigen::MatrixXd G(static_cast<Eigen::Index>(n), m);
    for (Eigen::Index c = 0; c < m; ++c) {
      F.col(c) = df_[static_cast<std::size_t>(c)];
      G.col(c) = dg_[static_cast<std::size_t>(c)];
    }
    const Eigen::VectorXd gamma = F.colPivHouseholderQr().solve(f);
    const Eigen::VectorXd out = g - G * gamma;
    if (!out.allFinite()) return gx;
    return {out.data(), out.data() + out.size()};
  }

  void reset() {
    df_.clear();
    dg_.clear();
    has_prev_ = false;
  }

 private:
  int depth_;
  bool has_prev_ = false;
  Eigen::VectorXd f_prev_, g_prev_;
  std::vector<Eigen::VectorXd> df_, dg_;
};

inline double c1_change(const SquareMap& map, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  double sup = 0.0, sup_grad = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d[k] = b[k] - a[k];
    sup = std::max(sup, std::abs(d[k]));
  }
  for (const Vec2& g : node_gradients(map, d)) sup_grad = std::max(sup_grad, norm(g));
  return sup + sup_grad;
}

inline bool ordered_shock(const ShockCurve& s, double attach_limit) {
  for (std::size_t j = 0; j + 1 < s.points.size(); ++j) {
    if (!(s.points[j + 1].y < s.points[j].y) || !std::isfinite(s.points[j].x)) return false;
  }
  return s.points.back().x < attach_limit;
}

}  // namespace detail

inline SolutionField fixed_point_solve(const GasParams& params, double theta, const IterationParams& it,
                                       const SolutionField& init, int n1 = 0, int n2 = 0,
                                       const OuterObserver& observer = {}) {
  if (n1 == 0) n1 = init.n1();
  if (n2 == 0) n2 = init.n2();
  SolutionField sol;
  sol.config = build_configuration(params, theta, it.sigma);
  sol.iter = it;
  auto [shock, psi] = transport(init, sol.config, n1, n2, it.stretch);
  detail::AndersonMixer mixer(it.anderson_depth);
  const double attach_limit = -kAttachFraction * sol.config.sonic_radius;
  for (int outer = 1;; ++outer) {
    SquareMap map = build_square_map(sol.config, shock, n1, n2, it.stretch);
    const BvpResult bvp = solve_bvp(sol.config, map, it, psi);
    const double change = detail::c1_change(map, psi, bvp.psi);
    psi = bvp.psi;
    const ShockUpdate upd = update_shock(sol.config, map, psi, shock, it.relax);
    OuterRecord rec{outer, upd.movement, bvp.residual, change};
    sol.residual_history.push_back(rec);
    if (observer) observer(rec);
    if (upd.movement < it.tol_fixed_point && change < it.tol_fixed_point) {
      sol.shock = shock;
      sol.map = std::move(map);
      sol.phi = phi_from_psi(sol.map, sol.config.state2, psi);
      return sol;
    }
    if (outer >= it.max_outer) {
      fail(ErrorKind::NoConvergence, "fixed point not reached after " + std::to_string(outer) +
                                         " outer iterations (movement " + std::to_string(upd.movement) + ")");
    }
    std::vector<double> x(static_cast<std::size_t>(n2) - 1), gx(x.size());
    for (int j = 1; j < n2; ++j) {
      x[static_cast<std::size_t>(j) - 1] = shock.points[static_cast<std::size_t>(j)].x;
      gx[static_cast<std::size_t>(j) - 1] = upd.shock.points[static_cast<std::size_t>(j)].x;
    }
    const auto mixed = mixer.next(x, gx);
    ShockCurve candidate = upd.shock;
    for (int j = 1; j < n2; ++j) candidate.points[static_cast<std::size_t>(j)].x = mixed[static_cast<std::size_t>(j) - 1];
    bool usable = detail::ordered_shock(candidate, attach_limit);
    if (usable) {
      try {
        build_square_map(sol.config, candidate, n1, n2, it.stretch);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::FoldedMesh) throw;
        usable = false;
      }
    }
    if (!usable) {
      candidate = upd.shock;
      mixer.reset();
    }
    shock = candidate;
  }
}

}  // namespace rrefl
