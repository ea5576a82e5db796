#pragma once

// Geometric skeleton of the regular reflection configuration: the domain
// Lambda, the points P0..P4, the sonic arc, the monotonicity cone and the
// reflected shock as a graph.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/gas.hpp"
#include "rrefl/shock_relations.hpp"
#include "rrefl/vec2.hpp"

namespace rrefl {

/// Lambda = upper half-plane minus the wedge {xi1 > 0, 0 < xi2 < xi1 tan(theta)}.
inline bool in_lambda(Vec2 xi, double theta) {
  if (!(xi.y > 0.0)) return false;
  const double c = is_normal_angle(theta) ? 0.0 : std::cos(theta);
  const double s = is_normal_angle(theta) ? 1.0 : std::sin(theta);
  const bool inside_wedge = xi.x > 0.0 && s * xi.x - c * xi.y > 0.0;
  return !inside_wedge;
}

struct ConeDirections {
  Vec2 e_s1;
  Vec2 e_xi2{0.0, 1.0};
  /// Set when e_s1 = -e_xi2, which happens at theta = pi/2.
  bool degenerate = false;

  /// Unit direction at angular fraction f of the way from e_s1 to e_xi2,
  /// sweeping through (-1, 0).
  Vec2 sample(double f) const {
    double a0 = std::atan2(e_s1.y, e_s1.x);
    if (a0 < 0.0) a0 += 2.0 * std::numbers::pi;
    const double a1 = 0.5 * std::numbers::pi;
    const double a = a0 + f * (a1 - a0);
    return {std::cos(a), std::sin(a)};
  }

  /// Strictly inside the open cone spanned by e_s1 and e_xi2.
  bool contains(Vec2 e) const {
    if (degenerate) return e.x < 0.0;
    return cross(e_s1, e) < 0.0 && cross(e, e_xi2) < 0.0;
  }
};

inline ConeDirections cone_directions(const IncidentData& inc, const UniformState& s2) {
  const Vec2 raw{s2.v, inc.u1 - s2.u};
  const double len = norm(raw);
  if (len == 0.0) fail(ErrorKind::ZeroVector, "direction of S1 is undefined");
  ConeDirections cone;
  cone.e_s1 = -(raw / len);
  cone.degenerate = std::abs(cross(cone.e_s1, cone.e_xi2)) < 1e-14;
  if (cone.degenerate) cone.e_s1 = {0.0, -1.0};
  return cone;
}

inline ConeDirections cone_directions(const GasParams& params, const State2Pair& pair) {
  return cone_directions(incident_state(params), pair.weak);
}

struct ReflectionConfiguration {
  GasParams params;
  IncidentData incident;
  UniformState state2;
  double theta_w = 0.0;
  double mach_p0 = 0.0;
  double sigma = kDefaultSigma;
  Regime regime = Regime::Supersonic;
  Vec2 p0, p1, p2, p3{0.0, 0.0}, p4;
  Vec2 sonic_center;
  double sonic_radius = 0.0;
  ConeDirections cone;

  bool normal() const { return is_normal_angle(theta_w); }
  /// True when the sonic side of the domain is a genuine arc.
  bool has_sonic_arc() const { return regime == Regime::Supersonic; }

  Vec2 wedge_direction() const {
    return normal() ? Vec2{0.0, 1.0} : Vec2{std::cos(theta_w), std::sin(theta_w)};
  }
  /// Outer unit normal of Omega on the wedge, (-sin, cos).
  Vec2 wedge_normal() const { return normal() ? Vec2{-1.0, 0.0} : Vec2{-std::sin(theta_w), std::cos(theta_w)}; }

  double arc_angle(Vec2 p) const { return std::atan2(p.y - sonic_center.y, p.x - sonic_center.x); }

  /// Point on the sonic side at parameter s in [0, 1], from P1 (s = 0) to P4.
  Vec2 sonic_point(double s) const {
    if (!has_sonic_arc()) return p1;
    const double a1 = arc_angle(p1);
    const double a4 = arc_angle(p4);
    const double a = a1 + s * (a4 - a1);
    return sonic_center + sonic_radius * Vec2{std::cos(a), std::sin(a)};
  }

  /// Distance to the sonic side: to the sonic circle (inside) when there is
  /// an arc, otherwise to P0.
  double sonic_distance(Vec2 xi) const {
    if (has_sonic_arc()) return std::max(0.0, sonic_radius - distance(xi, sonic_center));
    return distance(xi, p1);
  }

  /// phi1 - phi2 is linear; its zero set is the line S1.
  double s1_function(Vec2 xi) const {
    const auto& s1 = incident.state1;
    return (s1.u - state2.u) * xi.x + (s1.v - state2.v) * xi.y + (s1.k - state2.k);
  }
};

inline constexpr double kAttachFraction = 1e-3;

inline ReflectionConfiguration build_configuration(const GasParams& params, double theta,
                                                   const State2Pair& pair, double sigma = kDefaultSigma) {
  ReflectionConfiguration cfg;
  cfg.params = params;
  cfg.incident = incident_state(params);
  cfg.state2 = pair.weak;
  cfg.theta_w = theta;
  cfg.mach_p0 = pair.mach_p0_weak;
  cfg.sigma = sigma;
  cfg.regime = classify_mach(pair.mach_p0_weak, sigma);
  cfg.p0 = pair.p0;
  cfg.sonic_center = pair.weak.velocity();
  cfg.sonic_radius = pair.weak.c;
  cfg.cone = cone_directions(cfg.incident, pair.weak);

  const auto& inc = cfg.incident;
  const auto& s2 = cfg.state2;
  // Foot of the straight continuation of S1 on the symmetry axis.
  const double foot = (s2.k - inc.k1) / (inc.u1 - s2.u);
  cfg.p2 = {foot, 0.0};

  if (cfg.has_sonic_arc()) {
    cfg.p4 = cfg.sonic_center + cfg.sonic_radius * cfg.wedge_direction();
    // First intersection of S1 with the sonic circle, walking from P0 along e_S1.
    const Vec2 e = cfg.cone.e_s1;
    Vec2 base = cfg.p0;
    if (cfg.normal()) base = {foot, cfg.sonic_center.y + 2.0 * cfg.sonic_radius};
    const Vec2 d = base - cfg.sonic_center;
    const double b = dot(e, d);
    const double disc = b * b - (norm_sq(d) - cfg.sonic_radius * cfg.sonic_radius);
    if (!(disc > 0.0)) fail(ErrorKind::DegenerateSonicArc, "S1 does not cut the sonic circle");
    const double t = -b - std::sqrt(disc);
    cfg.p1 = base + t * e;
    if (distance(cfg.p1, cfg.p4) < 1e-10 * cfg.sonic_radius) {
      fail(ErrorKind::DegenerateSonicArc, "P1 and P4 coincide");
    }
  } else {
    cfg.p1 = cfg.p0;
    cfg.p4 = cfg.p0;
  }
  if (cfg.p2.x > -kAttachFraction * cfg.sonic_radius) {
    fail(ErrorKind::AttachedShockDetected, "shock foot at xi1 = " + std::to_string(cfg.p2.x));
  }
  return cfg;
}

inline ReflectionConfiguration build_configuration(const GasParams& params, double theta,
                                                   double sigma = kDefaultSigma) {
  return build_configuration(params, theta, state2_solve(params, theta), sigma);
}

/// Reflected shock from P1 to P2 viewed as a graph S = f_e(T) with
/// S = xi . e and T = xi . e_perp, e_perp the counter-clockwise rotation of e.
struct ShockCurve {
  Vec2 direction_e{-1.0, 0.0};
  std::vector<Vec2> points;  // ordered from P1 to P2

  Vec2 e_perp() const { return perp(direction_e); }

  std::vector<double> T() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec2& p : points) out.push_back(dot(p, e_perp()));
    return out;
  }
  std::vector<double> S() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec2& p : points) out.push_back(dot(p, direction_e));
    return out;
  }

  ShockCurve viewed_along(Vec2 e) const { return {normalized(e), points}; }

  Vec2 tangent_p1() const { return normalized(points[1] - points[0]); }
  Vec2 tangent_p2() const { return normalized(points.back() - points[points.size() - 2]); }

  /// Discrete slopes f'_e on each segment; empty if T is not strictly increasing.
  std::optional<std::vector<double>> slopes() const {
    const auto t = T();
    const auto s = S();
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double dt = t[i + 1] - t[i];
      if (!(dt > 0.0)) return std::nullopt;
      out.push_back((s[i + 1] - s[i]) / dt);
    }
    return out;
  }

  double length() const {
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) l += distance(points[i], points[i + 1]);
    return l;
  }
};

/// Shock nodes sit on fixed levels xi2_j = xi2(P1) (1 - sigma_j) of the
/// stretched parameter; the straight segment P1-P2 is the cold start.
inline ShockCurve straight_shock(const ReflectionConfiguration& cfg, const std::vector<double>& levels) {
  ShockCurve sc;
  sc.points.reserve(levels.size());
  for (double lv : levels) sc.points.push_back(cfg.p1 + lv * (cfg.p2 - cfg.p1));
  return sc;
}

/// Slope jump of the shock extended by reflection across the symmetry axis:
/// twice the angle between the last shock segment and the vertical.
inline double mirror_slope_jump(const ShockCurve& shock) {
  const Vec2 t = shock.tangent_p2();
  return 2.0 * std::abs(std::atan2(t.x, -t.y));
}

}  // namespace rrefl
