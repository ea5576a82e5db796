#pragma once

// Constructed inadmissible inputs, each aimed at one check.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "rrefl/admissibility.hpp"

namespace violations {

using namespace rrefl;

/// phi2 + lambda (phi1 - phi2): a uniform state whose velocity is pushed
/// towards state (1) until it is supersonic somewhere in Omega.
inline SolutionField supersonic_uniform(const SolutionField& base, double lambda = 0.5) {
  SolutionField s = base;
  const auto& s1 = base.config.incident.state1;
  const auto& s2 = base.config.state2;
  const auto& nodes = s.map.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s.phi[k] = s2.potential(nodes[k]) + lambda * (s1.potential(nodes[k]) - s2.potential(nodes[k]));
  }
  return s;
}

/// Broad smooth dip of depth `depth` centred at `center`; its gradient stays
/// below depth / radius.
inline SolutionField pinching_dip(const SolutionField& base, double depth, Vec2 center, double radius) {
  SolutionField s = base;
  const auto& nodes = s.map.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s.phi[k] -= depth * std::exp(-norm_sq(nodes[k] - center) / (2.0 * radius * radius));
  }
  return s;
}

/// phi <- 2 phi1 - phi, which reverses both shock inequalities.
inline SolutionField reflected_about_phi1(const SolutionField& base) {
  SolutionField s = base;
  const auto& s1 = base.config.incident.state1;
  const auto& nodes = s.map.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) s.phi[k] = 2.0 * s1.potential(nodes[k]) - s.phi[k];
  return s;
}

/// Shock with an outward bump on its middle third, so f''_e changes sign.
inline ShockCurve bumped_shock(const ShockCurve& base, double height) {
  ShockCurve s = base;
  const std::size_t n = s.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);
    if (x > 1.0 / 3.0 && x < 2.0 / 3.0) {
      const double w = std::sin(3.0 * std::numbers::pi * (x - 1.0 / 3.0));
      s.points[k].x -= height * w * w;
    }
  }
  return s;
}

/// Names of the mandatory checks that fail.
inline std::vector<std::string> failing_mandatory(const AdmissibilityReport& rep) {
  std::vector<std::string> out;
  for (const auto& c : rep.checks) {
    if (c.mandatory && !c.pass) out.push_back(c.name);
  }
  return out;
}

}  // namespace violations
