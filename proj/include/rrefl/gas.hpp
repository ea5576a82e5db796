#pragma once

// Thermodynamic and pseudo-potential algebra for polytropic potential flow
// in self-similar variables, nondimensionalized so that p = rho^gamma / gamma
// and c^2 = rho^(gamma - 1).

#include <cmath>
#include <string>

#include "rrefl/errors.hpp"
#include "rrefl/vec2.hpp"

namespace rrefl {

/// Upstream data of the incident shock: state (0) density rho0, state (1)
/// density rho1, adiabatic exponent gamma, and the Bernoulli constant
/// B0 = (rho0^(gamma-1) - 1) / (gamma - 1).
struct GasParams {
  double rho0 = 1.0;
  double rho1 = 2.0;
  double gamma = 1.4;
  double bernoulli = 0.0;

  /// Validates and builds the parameter set. gamma is restricted to (1, 3]
  /// unless `allow_large_gamma` is set.
  static GasParams make(double rho0, double rho1, double gamma, bool allow_large_gamma = false) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
      fail(ErrorKind::InvalidParameter, "gamma must be > 1, got " + std::to_string(gamma));
    }
    if (gamma > 3.0 && !allow_large_gamma) {
      fail(ErrorKind::InvalidParameter,
           "gamma must lie in (1, 3] (pass the large-gamma override to go beyond), got " +
               std::to_string(gamma));
    }
    if (!(rho0 > 0.0) || !std::isfinite(rho0)) {
      fail(ErrorKind::InvalidParameter, "rho0 must be positive, got " + std::to_string(rho0));
    }
    if (!std::isfinite(rho1)) fail(ErrorKind::InvalidParameter, "rho1 must be finite");
    if (!(rho1 > rho0)) {
      fail(ErrorKind::NoCompression, "rho1 must exceed rho0 (rho0 = " + std::to_string(rho0) +
                                         ", rho1 = " + std::to_string(rho1) + ")");
    }
    GasParams p;
    p.rho0 = rho0;
    p.rho1 = rho1;
    p.gamma = gamma;
    p.bernoulli = (std::pow(rho0, gamma - 1.0) - 1.0) / (gamma - 1.0);
    return p;
  }

  /// rho0^(gamma - 1), the reference enthalpy level.
  double enthalpy0() const { return std::pow(rho0, gamma - 1.0); }
};

/// Constant state with pseudo-potential phi = -|xi|^2/2 + u xi1 + v xi2 + k.
struct UniformState {
  double u = 0.0;
  double v = 0.0;
  double k = 0.0;
  double rho = 1.0;
  double c = 1.0;

  Vec2 velocity() const { return {u, v}; }

  double potential(Vec2 xi) const { return -0.5 * norm_sq(xi) + u * xi.x + v * xi.y + k; }
  Vec2 gradient(Vec2 xi) const { return {u - xi.x, v - xi.y}; }
};

/// Density from the Bernoulli law, rho(|Dphi|^2, phi).
inline double density(double grad_sq, double phi, const GasParams& params) {
  const double gm1 = params.gamma - 1.0;
  const double base = params.enthalpy0() - gm1 * (phi + 0.5 * grad_sq);
  if (!(base >= 0.0)) {
    fail(ErrorKind::VacuumReached, "Bernoulli base is negative (" + std::to_string(base) + ")");
  }
  return std::pow(base, 1.0 / gm1);
}

inline double sound_speed(double rho, const GasParams& params) {
  if (!(rho > 0.0)) fail(ErrorKind::NonpositiveDensity, "density must be positive");
  return std::pow(rho, 0.5 * (params.gamma - 1.0));
}

/// c_star(phi) - |Dphi| where c_star^2 = 2/(gamma+1) (rho0^(gamma-1) - (gamma-1) phi).
/// Positive exactly where the potential flow equation is strictly elliptic.
inline double ellipticity_margin(Vec2 grad, double phi, const GasParams& params) {
  const double base = params.enthalpy0() - (params.gamma - 1.0) * phi;
  if (!(base >= 0.0)) fail(ErrorKind::VacuumReached, "c_star argument is negative");
  return std::sqrt(2.0 / (params.gamma + 1.0) * base) - norm(grad);
}

struct PotentialValue {
  double phi;
  Vec2 grad;
};

inline PotentialValue uniform_potential(const UniformState& state, Vec2 xi) {
  return {state.potential(xi), state.gradient(xi)};
}

/// Builds the uniform state with velocity (u, v) and potential constant k;
/// density follows from the Bernoulli law, which is xi-independent on
/// uniform states since phi + |Dphi|^2/2 = k + (u^2 + v^2)/2.
inline UniformState make_uniform_state(double u, double v, double k, const GasParams& params) {
  UniformState s;
  s.u = u;
  s.v = v;
  s.k = k;
  s.rho = density(u * u + v * v, k, params);
  if (!(s.rho > 0.0)) fail(ErrorKind::VacuumReached, "uniform state has zero density");
  s.c = sound_speed(s.rho, params);
  return s;
}

}  // namespace rrefl
