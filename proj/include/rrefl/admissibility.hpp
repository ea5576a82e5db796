#pragma once

// Numerical certification of a computed regular reflection: each check
// evaluates one admissibility condition on the nodes and reports its worst
// margin (positive = satisfied) and where it occurs.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/field.hpp"
#include "rrefl/hash.hpp"
#include "rrefl/shock_relations.hpp"
#include "rrefl/solver.hpp"

namespace rrefl {

struct CheckRecord {
  std::string name;
  std::string condition;
  bool mandatory = true;
  bool pass = false;
  /// Signed margin at the worst node; negative means the inequality is violated.
  double worst_margin = 0.0;
  std::optional<Vec2> location;
  double tolerance = 0.0;
  std::string note;
  std::vector<std::pair<std::string, double>> metrics;
};

struct AdmissibilityOptions {
  /// tol = tol_constant * h^tol_exponent, h the largest grid edge.
  double tol_constant = 10.0;
  double tol_exponent = 1.5;
  /// Nodes skipped next to each end of the shock in strict checks.
  int endpoint_skip = 2;
  std::vector<double> cone_fractions{0.25, 0.5, 0.75};
  /// f''_e must stay below -convexity_floor on the middle of the shock.
  double convexity_floor = 1e-8;
  double middle_fraction = 0.8;
  double far_field_tol = 1e-10;
};

struct AdmissibilityReport {
  std::vector<CheckRecord> checks;
  bool pass = false;
  std::string input_hash;
  double theta_w = 0.0;
  int n1 = 0;
  int n2 = 0;
  double h = 0.0;
  double tolerance = 0.0;

  const CheckRecord* first_failure() const {
    for (const auto& c : checks) {
      if (c.mandatory && !c.pass) return &c;
    }
    return nullptr;
  }
  const CheckRecord* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

inline double grid_tolerance(double h, const AdmissibilityOptions& opt) {
  return opt.tol_constant * std::pow(h, opt.tol_exponent);
}

namespace detail {

struct Worst {
  double margin = std::numeric_limits<double>::infinity();
  std::optional<Vec2> at;
  void update(double m, Vec2 x) {
    if (m < margin) {
      margin = m;
      at = x;
    }
  }
};

struct CheckContext {
  const SolutionField* sol;
  std::vector<FieldSample> samples;
  std::vector<Vec2> dpsi;
  double h;
  double tol;

  Vec2 node(int i, int j) const { return sol->map.node(i, j); }
  const FieldSample& at(int i, int j) const { return samples[sol->map.index(i, j)]; }
};

/// Density and ellipticity margin with vacuum read as zero sound speed.
inline double density_or_vacuum(double grad_sq, double phi, const GasParams& p) {
  const double base = p.enthalpy0() - (p.gamma - 1.0) * (phi + 0.5 * grad_sq);
  return base > 0.0 ? std::pow(base, 1.0 / (p.gamma - 1.0)) : 0.0;
}

inline double margin_or_vacuum(Vec2 grad, double phi, const GasParams& p) {
  const double base = p.enthalpy0() - (p.gamma - 1.0) * phi;
  return base > 0.0 ? ellipticity_margin(grad, phi, p) : -norm(grad);
}

inline CheckContext make_context(const SolutionField& sol, const AdmissibilityOptions& opt) {
  CheckContext c{&sol, node_samples(sol), node_gradients(sol.map, sol.psi()), sol.map.max_edge_length(), 0.0};
  c.tol = grid_tolerance(c.h, opt);
  return c;
}

/// Unit normal of the shock at node j, pointing into Omega.
inline Vec2 shock_normal(const SquareMap& map, int j) {
  const int last = map.n2() - 1;
  const Vec2 t = map.node(0, std::min(j + 1, last)) - map.node(0, std::max(j - 1, 0));
  Vec2 nu = normalized(perp(t));
  if (dot(nu, map.node(1, j) - map.node(0, j)) < 0.0) nu = -nu;
  return nu;
}

/// Three-point second derivative on a non-uniform grid.
inline double second_difference(double x0, double x1, double x2, double y0, double y1, double y2) {
  return 2.0 * ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (x2 - x0);
}

inline void finish(CheckRecord& r, const Worst& w) {
  r.worst_margin = w.margin;
  r.location = w.at;
}

inline CheckRecord ellipticity(const CheckContext& c, const AdmissibilityOptions&) {
  const auto& sol = *c.sol;
  CheckRecord r;
  r.name = "ellipticity";
  r.condition = "c_* - |Dphi| > 0 in the closure of Omega away from the sonic side";
  r.tolerance = c.tol;
  const IterationParams it = effective_params(sol.config, sol.iter);
  const double band = it.cutoff_enabled ? it.cutoff_width * sol.config.sonic_radius : 0.0;
  Worst outside, inside;
  for (int j = 1; j < sol.n2(); ++j) {
    for (int i = 0; i < sol.n1(); ++i) {
      const Vec2 x = c.node(i, j);
      const auto& s = c.at(i, j);
      const double m = margin_or_vacuum(s.grad, s.phi, sol.config.params);
      if (band > 0.0 && sol.config.sonic_distance(x) <= band) {
        inside.update(m, x);
      } else {
        outside.update(m, x);
      }
    }
  }
  r.pass = outside.margin > 0.0 && inside.margin > -c.tol;
  finish(r, inside.margin + c.tol < outside.margin ? inside : outside);
  r.metrics = {{"min_margin_outside_band", outside.margin}, {"min_margin_in_band", inside.margin}, {"band_width", band}};
  r.note = "strict outside the cutoff band, within tolerance inside it";
  return r;
}

inline CheckRecord shock_inequalities(const CheckContext& c, const AdmissibilityOptions& opt) {
  const auto& sol = *c.sol;
  const auto& s1 = sol.config.incident.state1;
  CheckRecord r;
  r.name = "shock_inequalities";
  r.condition = "d_nu phi1 > d_nu phi > 0 on the shock";
  r.tolerance = 0.0;
  Worst gap, normal;
  double entropy = std::numeric_limits<double>::infinity();
  for (int j = opt.endpoint_skip; j <= sol.n2() - 1 - opt.endpoint_skip; ++j) {
    const Vec2 x = c.node(0, j);
    const Vec2 nu = shock_normal(sol.map, j);
    const auto& s = c.at(0, j);
    const double dn = dot(s.grad, nu);
    gap.update(dot(s1.gradient(x), nu) - dn, x);
    normal.update(dn, x);
    entropy = std::min(entropy, density_or_vacuum(norm_sq(s.grad), s.phi, sol.config.params) - sol.config.params.rho1);
  }
  r.pass = gap.margin > 0.0 && normal.margin > 0.0;
  finish(r, gap.margin < normal.margin ? gap : normal);
  r.metrics = {{"min_upstream_gap", gap.margin}, {"min_normal_derivative", normal.margin}, {"min_density_jump", entropy}};
  return r;
}

inline CheckRecord pinching(const CheckContext& c, const AdmissibilityOptions&) {
  const auto& sol = *c.sol;
  const auto& s1 = sol.config.incident.state1;
  const auto& s2 = sol.config.state2;
  CheckRecord r;
  r.name = "pinching";
  r.condition = "phi2 <= phi <= phi1 in Omega";
  r.tolerance = c.tol;
  Worst lower, upper;
  for (int j = 0; j < sol.n2(); ++j) {
    for (int i = 0; i < sol.n1(); ++i) {
      const Vec2 x = c.node(i, j);
      const double phi = c.at(i, j).phi;
      lower.update(phi - s2.potential(x), x);
      upper.update(s1.potential(x) - phi, x);
    }
  }
  r.pass = lower.margin >= -c.tol && upper.margin >= -c.tol;
  finish(r, lower.margin < upper.margin ? lower : upper);
  r.metrics = {{"min_phi_minus_phi2", lower.margin}, {"min_phi1_minus_phi", upper.margin}};
  return r;
}

inline CheckRecord cone_monotonicity(const CheckContext& c, const AdmissibilityOptions&,
                                     const std::vector<Vec2>& interior_dirs, const std::vector<Vec2>& boundary_dirs) {
  const auto& sol = *c.sol;
  const auto& s1 = sol.config.incident.state1;
  CheckRecord r;
  r.name = "cone_monotonicity";
  r.condition = "d_e (phi1 - phi) < 0 in Omega for e inside the cone, <= 0 for its edges";
  r.tolerance = c.tol;
  Worst strict, loose;
  const auto deriv = [&](Vec2 e, int i, int j) { return dot(e, s1.gradient(c.node(i, j)) - c.at(i, j).grad); };
  int k = 0;
  for (const Vec2& e : interior_dirs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 1; j + 1 < sol.n2(); ++j) {
      for (int i = 1; i + 1 < sol.n1(); ++i) {
        const double d = deriv(e, i, j);
        mx = std::max(mx, d);
        strict.update(-d, c.node(i, j));
      }
    }
    r.metrics.emplace_back("max_interior_" + std::to_string(k++), mx);
  }
  k = 0;
  for (const Vec2& e : boundary_dirs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < sol.n2(); ++j) {
      for (int i = 0; i < sol.n1(); ++i) {
        const double d = deriv(e, i, j);
        mx = std::max(mx, d);
        loose.update(c.tol - d, c.node(i, j));
      }
    }
    r.metrics.emplace_back("max_edge_" + std::to_string(k++), mx);
  }
  r.pass = strict.margin > 0.0 && loose.margin >= 0.0;
  finish(r, strict.margin < loose.margin ? strict : loose);
  r.note = "interior directions strict at interior nodes; edge directions within tolerance on the closure";
  return r;
}

inline CheckRecord wedge_monotonicity(const CheckContext& c, const AdmissibilityOptions&) {
  const auto& sol = *c.sol;
  CheckRecord r;
  r.name = "wedge_monotonicity";
  r.condition = "d_nu_w (phi - phi2) <= 0 in Omega";
  r.tolerance = c.tol;
  const Vec2 nw = sol.config.wedge_normal();
  Worst w;
  double mx = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < sol.n2(); ++j) {
    for (int i = 0; i < sol.n1(); ++i) {
      const double d = dot(nw, c.dpsi[sol.map.index(i, j)]);
      mx = std::max(mx, d);
      w.update(c.tol - d, c.node(i, j));
    }
  }
  r.pass = w.margin >= 0.0;
  finish(r, w);
  r.metrics = {{"max_derivative", mx}};
  return r;
}

inline CheckRecord far_field(const SolutionField& sol, const AdmissibilityOptions& opt) {
  const auto& cfg = sol.config;
  const auto& inc = cfg.incident;
  CheckRecord r;
  r.name = "far_field";
  r.condition = "exterior states satisfy the jump conditions across the incident and reflected straight shocks";
  r.tolerance = opt.far_field_tol;
  const auto scaled = [&](const UniformState& a, const UniformState& b, Vec2 x, Vec2 n) {
    const RhResidual res = rh_residual(a, b, x, n, cfg.params);
    const Vec2 g = a.gradient(x);
    const double scale = std::max(1.0, std::abs(density(norm_sq(g), a.potential(x), cfg.params) * dot(g, n)));
    return std::max(std::abs(res.mass_jump) / scale, std::abs(res.potential_jump) / std::max(1.0, std::abs(a.potential(x))));
  };
  double incident = 0.0;
  for (double y : {0.0, 1.0}) incident = std::max(incident, scaled(inc.state0, inc.state1, {inc.xi1_0, y}, {1.0, 0.0}));
  const Vec2 along = -cfg.cone.e_s1;
  const Vec2 far = std::isfinite(cfg.p0.y) && distance(cfg.p0, cfg.p1) > 0.0 ? cfg.p0 : cfg.p1 + cfg.sonic_radius * along;
  double reflected = 0.0;
  for (const Vec2& x : {cfg.p1, 0.5 * (cfg.p1 + far), far}) {
    reflected = std::max(reflected, scaled(inc.state1, cfg.state2, x, perp(along)));
  }
  const double worst = std::max(incident, reflected);
  r.pass = worst < opt.far_field_tol;
  r.worst_margin = opt.far_field_tol - worst;
  r.location = incident >= reflected ? Vec2{inc.xi1_0, 0.0} : cfg.p1;
  r.metrics = {{"incident_residual", incident}, {"reflected_segment_residual", reflected}};
  r.note = "states (0), (1), (2) are closed forms outside Omega";
  return r;
}

/// Jump conditions on the computed shock (diagnostic).
inline CheckRecord shock_jump(const CheckContext& c, const AdmissibilityOptions& opt) {
  const auto& sol = *c.sol;
  const auto& s1 = sol.config.incident.state1;
  const double rho1 = sol.config.params.rho1;
  CheckRecord r;
  r.name = "shock_jump_conditions";
  r.condition = "phi = phi1 and rho d_nu phi = rho1 d_nu phi1 on the computed shock";
  r.mandatory = false;
  r.tolerance = c.tol;
  double pot = 0.0, mass = 0.0;
  Worst w;
  for (int j = opt.endpoint_skip; j <= sol.n2() - 1 - opt.endpoint_skip; ++j) {
    const Vec2 x = c.node(0, j);
    const Vec2 nu = shock_normal(sol.map, j);
    const auto& s = c.at(0, j);
    const double up = rho1 * dot(s1.gradient(x), nu);
    const double down = density_or_vacuum(norm_sq(s.grad), s.phi, sol.config.params) * dot(s.grad, nu);
    const double m = std::abs(down - up) / std::max(1.0, std::abs(up));
    pot = std::max(pot, std::abs(s.phi - s1.potential(x)));
    mass = std::max(mass, m);
    w.update(c.tol - std::max(m, std::abs(s.phi - s1.potential(x))), x);
  }
  r.pass = w.margin >= 0.0;
  finish(r, w);
  r.metrics = {{"max_potential_jump", pot}, {"max_relative_mass_jump", mass}};
  return r;
}

}  // namespace detail

inline CheckRecord check_ellipticity(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  return detail::ellipticity(detail::make_context(sol, opt), opt);
}

inline CheckRecord check_shock_inequalities(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  return detail::shock_inequalities(detail::make_context(sol, opt), opt);
}

inline CheckRecord check_pinching(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  return detail::pinching(detail::make_context(sol, opt), opt);
}

inline std::vector<Vec2> cone_samples(const ConeDirections& cone, const std::vector<double>& fractions) {
  std::vector<Vec2> out;
  for (double f : fractions) out.push_back(cone.sample(f));
  return out;
}

inline CheckRecord check_cone_monotonicity(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  const auto& cone = sol.config.cone;
  return detail::cone_monotonicity(detail::make_context(sol, opt), opt, cone_samples(cone, opt.cone_fractions),
                                   {cone.e_s1, cone.e_xi2});
}

/// Strict monotonicity in caller-chosen directions.
inline CheckRecord check_cone_monotonicity(const SolutionField& sol, const std::vector<Vec2>& directions,
                                           const AdmissibilityOptions& opt = {}) {
  return detail::cone_monotonicity(detail::make_context(sol, opt), opt, directions, {});
}

inline CheckRecord check_wedge_monotonicity(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  return detail::wedge_monotonicity(detail::make_context(sol, opt), opt);
}

/// Graph property, tangent bounds and strict convexity of the shock viewed
/// along each direction. With `flat` set, |f''_e| within tolerance is
/// required instead of strict convexity.
inline CheckRecord check_graph_and_convexity(const ShockCurve& shock, const std::vector<Vec2>& directions,
                                             bool flat = false, const AdmissibilityOptions& opt = {}) {
  const std::size_t n = shock.points.size();
  if (n < 5) fail(ErrorKind::TooFewSamples, "convexity needs at least 5 shock samples, got " + std::to_string(n));
  double h = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) h = std::max(h, distance(shock.points[k], shock.points[k + 1]));
  CheckRecord r;
  r.name = "graph_convexity";
  r.condition = flat ? "shock is a graph and flat" : "shock is a graph with tangents between the end tangents, f''_e < 0";
  r.tolerance = grid_tolerance(h, opt);
  r.pass = true;
  detail::Worst w;
  int verdicts_pass = 0;
  int k = 0;
  for (const Vec2& e : directions) {
    const ShockCurve view = shock.viewed_along(e);
    const auto t = view.T();
    const auto s = view.S();
    const auto slopes = view.slopes();
    bool ok = slopes.has_value();
    double max_f2 = -std::numeric_limits<double>::infinity();
    double max_mid = -std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    if (ok) {
      const double lo = slopes->back() - r.tolerance;
      const double hi = slopes->front() + r.tolerance;
      for (std::size_t q = 0; q < slopes->size(); ++q) {
        const double m = std::min((*slopes)[q] - lo, hi - (*slopes)[q]);
        if (m < 0.0) ok = false;
        w.update(m, shock.points[q]);
      }
      const double t0 = t.front(), len = t.back() - t.front();
      const double margin = 0.5 * (1.0 - opt.middle_fraction) * len;
      for (std::size_t q = 1; q + 1 < n; ++q) {
        const double f2 = detail::second_difference(t[q - 1], t[q], t[q + 1], s[q - 1], s[q], s[q + 1]);
        max_f2 = std::max(max_f2, f2);
        max_abs = std::max(max_abs, std::abs(f2));
        const bool middle = t[q] >= t0 + margin && t[q] <= t0 + len - margin;
        if (middle) max_mid = std::max(max_mid, f2);
        if (flat) {
          w.update(r.tolerance - std::abs(f2), shock.points[q]);
        } else {
          w.update(r.tolerance - f2, shock.points[q]);
          if (middle) w.update(-opt.convexity_floor - f2, shock.points[q]);
        }
      }
      if (flat) {
        ok = ok && max_abs < r.tolerance;
      } else {
        ok = ok && max_f2 <= r.tolerance && max_mid < -opt.convexity_floor;
      }
    } else {
      w.update(-1.0, shock.points.front());
    }
    if (ok) ++verdicts_pass;
    r.metrics.emplace_back("max_f2_" + std::to_string(k), max_f2);
    r.metrics.emplace_back("max_f2_middle_" + std::to_string(k), max_mid);
    ++k;
  }
  r.pass = verdicts_pass == static_cast<int>(directions.size());
  if (verdicts_pass != 0 && !r.pass) r.note = "verdicts disagree across directions";
  if (flat) r.note = "flat shock: flatness asserted instead of strict convexity";
  detail::finish(r, w);
  return r;
}

inline CheckRecord check_graph_and_convexity(const ShockCurve& shock, const AdmissibilityOptions& opt = {}) {
  return check_graph_and_convexity(shock, {shock.direction_e}, false, opt);
}

/// Agreement of sign((phi - phi1)_tau_tau) with -sign(f''_e) on interior
/// shock nodes (diagnostic).
inline CheckRecord check_phi_tau_tau_equivalence(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  const auto c = detail::make_context(sol, opt);
  CheckRecord r;
  r.name = "phi_tau_tau_equivalence";
  r.condition = "(phi - phi1)_tau_tau < 0 exactly where f''_e > 0 on the shock";
  r.mandatory = false;
  r.tolerance = c.tol;
  const auto& s1 = sol.config.incident.state1;
  const auto& pts = sol.shock.points;
  const auto t = sol.shock.T();
  const auto s = sol.shock.S();
  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) arc[k] = arc[k - 1] + distance(pts[k - 1], pts[k]);
  int total = 0, agree = 0, degenerate = 0;
  detail::Worst w;
  for (int j = std::max(1, opt.endpoint_skip); j <= sol.n2() - 1 - std::max(1, opt.endpoint_skip); ++j) {
    const std::size_t a = static_cast<std::size_t>(j) - 1, b = static_cast<std::size_t>(j), d = b + 1;
    const auto rel = [&](int jj) { return c.at(0, jj).phi - s1.potential(c.node(0, jj)); };
    const double phi_ss = detail::second_difference(arc[a], arc[b], arc[d], rel(j - 1), rel(j), rel(j + 1));
    const Vec2 curv{detail::second_difference(arc[a], arc[b], arc[d], pts[a].x, pts[b].x, pts[d].x),
                    detail::second_difference(arc[a], arc[b], arc[d], pts[a].y, pts[b].y, pts[d].y)};
    const double ptt = phi_ss - dot(c.at(0, j).grad - s1.gradient(pts[b]), curv);
    const double f2 = detail::second_difference(t[a], t[b], t[d], s[a], s[b], s[d]);
    ++total;
    if (std::abs(ptt) < opt.convexity_floor && std::abs(f2) < opt.convexity_floor) {
      ++agree;
      ++degenerate;
    } else if ((ptt < 0.0) == (f2 > 0.0)) {
      ++agree;
    } else {
      w.update(-1.0, pts[b]);
    }
  }
  const double fraction = total > 0 ? static_cast<double>(agree) / total : 1.0;
  r.pass = fraction >= 0.95;
  r.worst_margin = fraction - 0.95;
  r.location = w.at;
  r.metrics = {{"agreement_fraction", fraction}, {"degenerate_nodes", static_cast<double>(degenerate)},
               {"nodes", static_cast<double>(total)}};
  if (degenerate == total) r.note = "degenerate: both sides vanish";
  return r;
}

/// Distance from `center` to the tangent line along the shock; records
/// whether it varies monotonically between its endpoint values (diagnostic).
inline CheckRecord check_tangent_distance(const ShockCurve& shock, Vec2 center = {0.0, 0.0},
                                          const AdmissibilityOptions& opt = {}) {
  const auto& pts = shock.points;
  const std::size_t n = pts.size();
  if (n < 3) fail(ErrorKind::TooFewSamples, "tangent distance needs at least 3 shock samples");
  double h = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) h = std::max(h, distance(pts[k], pts[k + 1]));
  CheckRecord r;
  r.name = "tangent_distance";
  r.condition = "distance from the origin to the shock tangent varies monotonically";
  r.mandatory = false;
  r.tolerance = grid_tolerance(h, opt);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 tangent = normalized(pts[std::min(k + 1, n - 1)] - pts[k == 0 ? 0 : k - 1]);
    d[k] = std::abs(cross(tangent, pts[k] - center));
  }
  // Largest drop after a running maximum, largest rise after a running minimum.
  double up = 0.0, down = 0.0, hi = d[0], lo = d[0];
  for (std::size_t k = 1; k < n; ++k) {
    up = std::max(up, hi - d[k]);
    down = std::max(down, d[k] - lo);
    hi = std::max(hi, d[k]);
    lo = std::min(lo, d[k]);
  }
  const bool increasing = up <= r.tolerance;
  const bool decreasing = down <= r.tolerance;
  r.pass = increasing || decreasing;
  r.worst_margin = r.tolerance - std::min(up, down);
  r.metrics = {{"distance_p1", d.front()}, {"distance_p2", d.back()},
               {"min_distance", *std::min_element(d.begin(), d.end())},
               {"max_distance", *std::max_element(d.begin(), d.end())}};
  if (up <= r.tolerance && down <= r.tolerance) r.note = "degenerate: constant distance";
  return r;
}

inline CheckRecord check_far_field(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  return detail::far_field(sol, opt);
}

inline AdmissibilityReport full_report(const SolutionField& sol, const AdmissibilityOptions& opt = {}) {
  const auto c = detail::make_context(sol, opt);
  const auto& cone = sol.config.cone;
  const auto interior = cone_samples(cone, opt.cone_fractions);
  AdmissibilityReport rep;
  rep.input_hash = solution_hash(sol);
  rep.theta_w = sol.theta_w();
  rep.n1 = sol.n1();
  rep.n2 = sol.n2();
  rep.h = c.h;
  rep.tolerance = c.tol;
  rep.checks.push_back(detail::ellipticity(c, opt));
  rep.checks.push_back(detail::shock_inequalities(c, opt));
  rep.checks.push_back(detail::pinching(c, opt));
  rep.checks.push_back(detail::cone_monotonicity(c, opt, interior, {cone.e_s1, cone.e_xi2}));
  rep.checks.push_back(detail::wedge_monotonicity(c, opt));
  rep.checks.push_back(check_graph_and_convexity(sol.shock, interior, sol.config.normal(), opt));
  rep.checks.push_back(detail::far_field(sol, opt));
  rep.checks.push_back(check_phi_tau_tau_equivalence(sol, opt));
  rep.checks.push_back(check_tangent_distance(sol.shock, {0.0, 0.0}, opt));
  rep.checks.push_back(detail::shock_jump(c, opt));
  rep.pass = rep.first_failure() == nullptr;
  return rep;
}

inline nlohmann::ordered_json to_json(const CheckRecord& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["condition"] = c.condition;
  j["mandatory"] = c.mandatory;
  j["pass"] = c.pass;
  j["worst_margin"] = c.worst_margin;
  j["location"] = c.location ? nlohmann::ordered_json::array({c.location->x, c.location->y}) : nlohmann::ordered_json();
  j["tolerance"] = c.tolerance;
  j["note"] = c.note;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c.metrics) m[k] = v;
  j["metrics"] = m;
  return j;
}

inline nlohmann::ordered_json to_json(const AdmissibilityReport& rep) {
  nlohmann::ordered_json j;
  j["verdict"] = rep.pass ? "pass" : "fail";
  j["input_hash"] = rep.input_hash;
  j["theta_w"] = rep.theta_w;
  j["theta_w_deg"] = rep.theta_w * 180.0 / std::numbers::pi;
  j["n1"] = rep.n1;
  j["n2"] = rep.n2;
  j["h"] = rep.h;
  j["tolerance"] = rep.tolerance;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.checks) j["checks"].push_back(to_json(c));
  return j;
}

inline void print_table(std::ostream& os, const AdmissibilityReport& rep) {
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %-10s %-5s %14s %12s  %s\n", "check", "kind", "pass", "worst margin",
                "tolerance", "location");
  os << line;
  for (const auto& c : rep.checks) {
    std::string loc = "-";
    if (c.location) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "(%.5f, %.5f)", c.location->x, c.location->y);
      loc = buf;
    }
    std::snprintf(line, sizeof line, "%-26s %-10s %-5s %14.6e %12.4e  %s\n", c.name.c_str(),
                  c.mandatory ? "mandatory" : "diagnostic", c.pass ? "yes" : "NO", c.worst_margin, c.tolerance,
                  loc.c_str());
    os << line;
  }
  os << "verdict: " << (rep.pass ? "pass" : "fail") << '\n';
}

}  // namespace rrefl
