#pragma once

// Rankine-Hugoniot relations, the incident shock, the reflection-point system
// for state (2) and the transition angles derived from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/gas.hpp"
#include "rrefl/roots.hpp"
#include "rrefl/vec2.hpp"

namespace rrefl {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// True when theta is pi/2 up to a couple of ulps (90 degrees converted to radians).
inline bool is_normal_angle(double theta) { return std::abs(theta - kHalfPi) <= 1e-15; }

struct IncidentData {
  double u1 = 0.0;
  double xi1_0 = 0.0;
  double k1 = 0.0;
  double c1 = 0.0;
  UniformState state0;
  UniformState state1;
};

/// u1 as a function of (rho0, rho1, gamma) from the two jump conditions.
inline double incident_velocity(double rho0, double rho1, double gamma) {
  const double gm1 = gamma - 1.0;
  const double num = 2.0 * (rho1 - rho0) * (std::pow(rho1, gm1) - std::pow(rho0, gm1));
  return std::sqrt(num / (gm1 * (rho1 + rho0)));
}

inline IncidentData incident_state(const GasParams& params) {
  if (!(params.rho1 > params.rho0)) fail(ErrorKind::NoCompression, "rho1 must exceed rho0");
  IncidentData d;
  d.u1 = incident_velocity(params.rho0, params.rho1, params.gamma);
  d.xi1_0 = params.rho1 * d.u1 / (params.rho1 - params.rho0);
  d.k1 = -d.u1 * d.xi1_0;
  d.state0 = make_uniform_state(0.0, 0.0, 0.0, params);
  d.state1 = make_uniform_state(d.u1, 0.0, d.k1, params);
  d.c1 = d.state1.c;
  return d;
}

struct RhResidual {
  double mass_jump = 0.0;
  double potential_jump = 0.0;
};

/// Jumps [rho Dphi . nu] and [phi] (right minus left) at `point`. The
/// potential jump is formed from the linear parts, so the common -|xi|^2/2
/// cancels exactly.
inline RhResidual rh_residual(const UniformState& left, const UniformState& right, Vec2 point,
                              Vec2 normal, const GasParams& params) {
  const auto flux = [&](const UniformState& s) {
    const Vec2 g = s.gradient(point);
    return density(norm_sq(g), s.potential(point), params) * dot(g, normal);
  };
  RhResidual r;
  r.mass_jump = flux(right) - flux(left);
  r.potential_jump = (right.u - left.u) * point.x + (right.v - left.v) * point.y + (right.k - left.k);
  return r;
}

inline bool entropy_satisfied(double upstream_rho, double downstream_rho) {
  if (!(upstream_rho > 0.0) || !(downstream_rho > 0.0)) {
    fail(ErrorKind::NonpositiveDensity, "entropy check needs positive densities");
  }
  return downstream_rho > upstream_rho;
}

struct State2Pair {
  UniformState weak;
  /// Absent only at theta = pi/2, where the strong branch escapes to infinity.
  std::optional<UniformState> strong;
  /// Reflection point; its second coordinate is +inf at theta = pi/2.
  Vec2 p0;
  double mach_p0_weak = 0.0;
  double theta_w = 0.0;
  bool double_root = false;
};

namespace detail {

// The reflection-point system in the scaled unknown w = u2 / cos^2(theta):
// (u2, v2) = w cos(theta) (cos(theta), sin(theta)) and k2 = -w xi1_0 make slip
// and potential continuity at P0 hold identically; the mass condition at P0,
// multiplied by |(u1 - u2, -v2)|, becomes F(w) = 0.
struct ReflectionFunction {
  double rho1, u1, x0, c, s, h0, gm1;

  double density(double w) const {
    const double base = h0 - gm1 * (-w * x0 + 0.5 * w * w * c * c);
    return base > 0.0 ? std::pow(base, 1.0 / gm1) : 0.0;
  }

  double operator()(double w) const {
    return density(w) * (u1 - w) * (w * c * c - x0) - rho1 * (u1 * (u1 - x0) - w * (u1 * c * c - x0));
  }

  double scale(double w) const {
    return rho1 * u1 * (x0 + u1) + std::abs(density(w) * (u1 - w) * (w * c * c - x0));
  }
};

inline ReflectionFunction reflection_function(const GasParams& params, const IncidentData& inc,
                                              double theta) {
  const bool normal = is_normal_angle(theta);
  return {params.rho1, inc.u1,           inc.xi1_0,        normal ? 0.0 : std::cos(theta),
          normal ? 1.0 : std::sin(theta), params.enthalpy0(), params.gamma - 1.0};
}

// Interval of w on which the state behind S1 is denser than state (1).
// The upper end is +inf when cos(theta) = 0.
inline std::optional<std::pair<double, double>> compressive_interval(const ReflectionFunction& f,
                                                                      const GasParams& params) {
  const double delta = (std::pow(params.rho1, f.gm1) - f.h0) / f.gm1;
  const double c2 = f.c * f.c;
  const double disc = f.x0 * f.x0 - 2.0 * c2 * delta;
  if (disc <= 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double lo = 2.0 * delta / (f.x0 + sq);
  const double hi = c2 > 0.0 ? (f.x0 + sq) / c2 : std::numeric_limits<double>::infinity();
  return std::pair{lo, hi};
}

inline constexpr int kScanPoints = 10000;

struct ScanResult {
  std::vector<double> w;
  std::vector<double> f;
  double w_peak = 0.0;
  double f_peak = -std::numeric_limits<double>::infinity();
  double tol = 0.0;
};

inline ScanResult scan(const ReflectionFunction& f, double lo, double hi) {
  ScanResult r;
  const double top = std::isfinite(hi) ? hi : lo * 1e8;
  r.w.resize(kScanPoints + 1);
  r.f.resize(kScanPoints + 1);
  const double log_ratio = std::log(top / lo);
  std::size_t best = 0;
  for (int i = 0; i <= kScanPoints; ++i) {
    double w = lo * std::exp(log_ratio * i / kScanPoints);
    if (i == 0) w = lo;
    if (i == kScanPoints) w = top;
    r.w[i] = w;
    r.f[i] = f(w);
    if (r.f[i] > r.f[best]) best = i;
  }
  if (std::isfinite(hi) && best > 0 && best < static_cast<std::size_t>(kScanPoints)) {
    auto [wp, fp] = roots::golden_max(f, r.w[best - 1], r.w[best + 1]);
    if (fp < r.f[best]) {
      wp = r.w[best];
      fp = r.f[best];
    }
    r.w_peak = wp;
    r.f_peak = fp;
  } else {
    r.w_peak = r.w[best];
    r.f_peak = r.f[best];
  }
  r.tol = 64.0 * std::numeric_limits<double>::epsilon() * f.scale(r.w_peak);
  return r;
}

// Largest value of F on the compressive interval; real roots exist iff it is >= 0.
inline double peak_value(const GasParams& params, const IncidentData& inc, double theta) {
  const auto f = reflection_function(params, inc, theta);
  const auto interval = compressive_interval(f, params);
  if (!interval) return -std::numeric_limits<double>::infinity();
  return scan(f, interval->first, interval->second).f_peak;
}

inline UniformState state_from_w(double w, const ReflectionFunction& f, const GasParams& params) {
  return make_uniform_state(w * f.c * f.c, w * f.c * f.s, -w * f.x0, params);
}

inline double mach_at_p0(double w, const ReflectionFunction& f, const UniformState& s2) {
  if (f.c == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(w * f.c * f.c - f.x0) / (f.c * s2.c);
}

}  // namespace detail

inline double detachment_angle(const GasParams& params);

/// Residuals of slip, potential continuity and mass conservation at P0 for a
/// candidate state (2). At theta = pi/2 the point P0 recedes to infinity and
/// the conditions are evaluated on S1 at the symmetry axis. Each residual is
/// divided by max(1, magnitude of its largest term), so it is absolute for
/// O(1) data and relative for the large strong-branch states near pi/2.
struct State2Residuals {
  double slip = 0.0;
  double potential = 0.0;
  double mass = 0.0;
  double max() const { return std::max({std::abs(slip), std::abs(potential), std::abs(mass)}); }
};

inline State2Residuals state2_residuals(const GasParams& params, const UniformState& s2, double theta) {
  const IncidentData inc = incident_state(params);
  const bool normal = is_normal_angle(theta);
  const double c = normal ? 0.0 : std::cos(theta);
  const double s = normal ? 1.0 : std::sin(theta);
  State2Residuals r;
  r.slip = (s2.v * c - s2.u * s) / std::max({1.0, std::abs(s2.v * c), std::abs(s2.u * s)});
  const Vec2 n_raw{inc.u1 - s2.u, -s2.v};
  const double len = norm(n_raw);
  if (len == 0.0) {
    r.mass = std::numeric_limits<double>::infinity();
    return r;
  }
  const Vec2 n = n_raw / len;
  double xn = 0.0;  // xi . n at the evaluation point
  if (normal) {
    const double xb = (s2.k - inc.k1) / (inc.u1 - s2.u);
    r.potential = 0.0;
    xn = xb * n.x;
  } else {
    const Vec2 p0{inc.xi1_0, inc.xi1_0 * std::tan(theta)};
    const double terms[] = {(inc.u1 - s2.u) * p0.x, s2.v * p0.y, inc.k1, s2.k};
    r.potential = (terms[0] - terms[1] + (terms[2] - terms[3])) /
                  std::max({1.0, std::abs(terms[0]), std::abs(terms[1]), std::abs(terms[2]), std::abs(terms[3])});
    xn = dot(p0, n);
  }
  const double flux2 = s2.rho * (dot(s2.velocity(), n) - xn);
  const double flux1 = params.rho1 * (inc.u1 * n.x - xn);
  r.mass = (flux2 - flux1) / std::max({1.0, std::abs(flux1), std::abs(flux2)});
  return r;
}

/// Solves the reflection-point system at wedge angle theta (radians).
inline State2Pair state2_solve(const GasParams& params, double theta) {
  if (!(theta > 0.0) || theta > kHalfPi + 1e-15) {
    fail(ErrorKind::InvalidParameter, "wedge angle must lie in (0, pi/2]");
  }
  const IncidentData inc = incident_state(params);
  const auto f = detail::reflection_function(params, inc, theta);
  const auto interval = detail::compressive_interval(f, params);
  if (!interval) fail(ErrorKind::DetachedWedgeAngle, "no compressive state behind the reflected shock");
  const auto sc = detail::scan(f, interval->first, interval->second);

  std::vector<std::pair<std::size_t, bool>> changes;  // (index, rising)
  for (std::size_t i = 0; i + 1 < sc.w.size(); ++i) {
    if ((sc.f[i] < 0.0) != (sc.f[i + 1] < 0.0)) changes.push_back({i, sc.f[i] < 0.0});
  }
  const auto root_in = [&](double a, double b) { return roots::bisect(f, a, b, 0.0); };

  State2Pair pair;
  pair.theta_w = theta;
  pair.p0 = f.c == 0.0 ? Vec2{inc.xi1_0, std::numeric_limits<double>::infinity()}
                       : Vec2{inc.xi1_0, inc.xi1_0 * std::tan(theta)};
  double w_weak = 0.0;
  std::optional<double> w_strong;

  if (f.c == 0.0) {
    if (changes.empty()) fail(ErrorKind::BracketingFailure, "no reflected state at pi/2");
    const std::size_t i = changes.front().first;
    w_weak = root_in(sc.w[i], sc.w[i + 1]);
  } else if (changes.size() >= 2) {
    const std::size_t i = changes[0].first;
    const std::size_t j = changes[1].first;
    w_weak = root_in(sc.w[i], sc.w[i + 1]);
    w_strong = root_in(sc.w[j], sc.w[j + 1]);
  } else if (std::abs(sc.f_peak) <= sc.tol) {
    w_weak = sc.w_peak;
    w_strong = sc.w_peak;
    pair.double_root = true;
  } else if (sc.f_peak > 0.0) {
    // Hump narrower than the scan spacing: split at the refined peak.
    const auto it = std::lower_bound(sc.w.begin(), sc.w.end(), sc.w_peak);
    const std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - sc.w.begin(), 1, detail::kScanPoints - 1));
    w_weak = root_in(sc.w[k - 1], sc.w_peak);
    w_strong = root_in(sc.w_peak, sc.w[k + 1]);
  } else {
    fail(ErrorKind::DetachedWedgeAngle,
         "wedge angle " + std::to_string(theta) + " rad is below the detachment angle");
  }

  if (pair.double_root) {
    const double theta_d = detachment_angle(params);
    if (theta > theta_d + 1e-8) {
      fail(ErrorKind::RootSeparationFailure, "weak and strong roots coincide above the detachment angle");
    }
  }

  UniformState a = detail::state_from_w(w_weak, f, params);
  if (w_strong) {
    UniformState b = detail::state_from_w(*w_strong, f, params);
    if (b.rho < a.rho) {
      std::swap(a, b);
      std::swap(w_weak, *w_strong);
    }
    pair.strong = b;
  }
  pair.weak = a;
  pair.mach_p0_weak = detail::mach_at_p0(w_weak, f, a);
  return pair;
}

inline double detachment_angle(const GasParams& params) {
  const IncidentData inc = incident_state(params);
  const auto has_roots = [&](double theta) { return detail::peak_value(params, inc, theta) >= 0.0; };
  const double lo = 0.01;
  const double hi = kHalfPi - 0.01;
  if (has_roots(lo) || !has_roots(hi)) {
    fail(ErrorKind::BracketingFailure, "root existence does not change on (0.01, pi/2 - 0.01)");
  }
  return roots::bisect_predicate(has_roots, lo, hi, 0.0);
}

inline double sonic_angle(const GasParams& params, std::optional<double> theta_d = std::nullopt) {
  const double lo = theta_d ? *theta_d : detachment_angle(params);
  const double hi = kHalfPi;
  const auto g = [&](double theta) { return state2_solve(params, theta).mach_p0_weak - 1.0; };
  if (!(g(lo) < 0.0)) fail(ErrorKind::BracketingFailure, "weak state is not subsonic at detachment");
  return roots::bisect(g, lo, hi - 1e-9, 0.0);
}

/// rho1 at which u1 = c1 for the given (gamma, rho0). For gamma >= 3 the ratio
/// u1/c1 stays below 1 for every rho1 > rho0 and +inf is returned.
inline double critical_density(double gamma, double rho0) {
  if (!(gamma > 1.0) || !(rho0 > 0.0)) fail(ErrorKind::InvalidParameter, "need gamma > 1 and rho0 > 0");
  const auto g = [&](double log_rho1) {
    const double rho1 = std::exp(log_rho1);
    return incident_velocity(rho0, rho1, gamma) / std::pow(rho1, 0.5 * (gamma - 1.0)) - 1.0;
  };
  if (gamma >= 3.0) return std::numeric_limits<double>::infinity();
  const double lo = std::log(rho0) + std::log1p(1e-4);
  double hi = std::log(rho0) + std::log(100.0);
  while (!(g(hi) > 0.0)) {
    hi += std::log(10.0);
    if (hi > std::log(rho0) + 300.0) fail(ErrorKind::BracketingFailure, "u1 - c1 has no sign change");
  }
  if (!(g(lo) < 0.0)) fail(ErrorKind::BracketingFailure, "u1 - c1 is not negative near rho0");
  return std::exp(roots::bisect(g, lo, hi, 0.0));
}

enum class Regime { Supersonic, Sonic, SubsonicNearSonic, SubsonicAwayFromSonic };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Supersonic: return "Supersonic";
    case Regime::Sonic: return "Sonic";
    case Regime::SubsonicNearSonic: return "SubsonicNearSonic";
    case Regime::SubsonicAwayFromSonic: return "SubsonicAwayFromSonic";
  }
  return "Unknown";
}

inline constexpr double kDefaultSigma = 0.1;
inline constexpr double kSonicTolerance = 1e-8;

inline Regime classify_mach(double mach, double sigma = kDefaultSigma) {
  if (std::abs(mach - 1.0) <= kSonicTolerance) return Regime::Sonic;
  if (mach > 1.0) return Regime::Supersonic;
  if (mach >= 1.0 - sigma) return Regime::SubsonicNearSonic;
  return Regime::SubsonicAwayFromSonic;
}

inline Regime classify_regime(const GasParams& params, double theta, double sigma = kDefaultSigma) {
  return classify_mach(state2_solve(params, theta).mach_p0_weak, sigma);
}

struct AngleDiagram {
  double theta_d = 0.0;
  double theta_s = 0.0;
  double rho_c = 0.0;
  bool attachment_possible = false;
};

inline AngleDiagram angle_diagram(const GasParams& params) {
  AngleDiagram d;
  d.theta_d = detachment_angle(params);
  d.theta_s = sonic_angle(params, d.theta_d);
  d.rho_c = critical_density(params.gamma, params.rho0);
  const IncidentData inc = incident_state(params);
  d.attachment_possible = inc.u1 > inc.c1;
  return d;
}

/// The explicit state behind a flat reflected shock off a flat wall: the gas
/// is at rest with density rho_bar > rho1, and the shock sits at xi1 = xi_bar < 0.
struct NormalReflectionState {
  UniformState state;
  double xi_bar = 0.0;
};

inline NormalReflectionState normal_reflection_state(const GasParams& params) {
  const IncidentData inc = incident_state(params);
  const double gm1 = params.gamma - 1.0;
  const double h0 = params.enthalpy0();
  const auto shock_at = [&](double rho) { return -params.rho1 * inc.u1 / (rho - params.rho1); };
  const auto k_of = [&](double rho) { return (h0 - std::pow(rho, gm1)) / gm1; };
  const auto g = [&](double log_excess) {
    const double rho = params.rho1 * (1.0 + std::exp(log_excess));
    return inc.u1 * shock_at(rho) + inc.k1 - k_of(rho);
  };
  const double lo = std::log(1e-12);
  double hi = 0.0;
  while (!(g(hi) > 0.0)) {
    hi += 1.0;
    if (hi > 200.0) fail(ErrorKind::BracketingFailure, "normal reflection density not bracketed");
  }
  if (!(g(lo) < 0.0)) fail(ErrorKind::BracketingFailure, "normal reflection density not bracketed");
  const double rho = params.rho1 * (1.0 + std::exp(roots::bisect(g, lo, hi, 0.0)));
  NormalReflectionState n;
  n.state = make_uniform_state(0.0, 0.0, k_of(rho), params);
  n.xi_bar = shock_at(n.state.rho);
  return n;
}

}  // namespace rrefl
