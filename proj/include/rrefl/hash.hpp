#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "rrefl/field.hpp"

namespace rrefl {

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Shortest round-trip text of a double ("%.17g").
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Hash of the parameters, angle, grid, shock and nodal potential.
inline std::string solution_hash(const SolutionField& sol) {
  std::string s;
  const auto& p = sol.config.params;
  for (double v : {p.rho0, p.rho1, p.gamma, sol.theta_w()}) s += fmt17(v) + ';';
  s += std::to_string(sol.n1()) + 'x' + std::to_string(sol.n2()) + ';';
  for (const Vec2& q : sol.shock.points) s += fmt17(q.x) + ',' + fmt17(q.y) + ';';
  for (double v : sol.phi) s += fmt17(v) + ';';
  return hex64(fnv1a(s));
}

}  // namespace rrefl
