#pragma once

// High-precision reference evaluations used as independent oracles.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using real = boost::multiprecision::cpp_bin_float_50;

inline real density(real grad_sq, real phi, real rho0, real gamma) {
  const real base = pow(rho0, gamma - 1) - (gamma - 1) * (phi + grad_sq / 2);
  return pow(base, 1 / (gamma - 1));
}

inline real incident_u1(real rho0, real rho1, real gamma) {
  return sqrt(2 * (rho1 - rho0) * (pow(rho1, gamma - 1) - pow(rho0, gamma - 1)) /
              ((gamma - 1) * (rho1 + rho0)));
}

// Incident shock from the jump conditions alone: xi1_0 and k1 follow from mass
// and potential continuity for a trial u1, and u1 is fixed by requiring the
// Bernoulli density of state (1) to equal rho1.
inline real incident_u1_bisection(double rho0, double rho1, double gamma) {
  const real r0 = rho0, r1 = rho1, g = gamma;
  const auto h = [&](const real& u1) {
    const real s = r1 * u1 / (r1 - r0);
    const real k1 = -u1 * s;
    return pow(r0, g - 1) - (g - 1) * (k1 + u1 * u1 / 2) - pow(r1, g - 1);
  };
  real lo = 0, hi = 1;
  while (h(hi) < 0) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const real m = (lo + hi) / 2;
    if (h(m) < 0) lo = m; else hi = m;
  }
  return (lo + hi) / 2;
}

inline double to_double(const real& x) { return x.convert_to<double>(); }

}  // namespace oracle
