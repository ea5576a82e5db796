#pragma once

// Distance between two solutions of the family: C^1 distance of the
// potentials on the common part of the domains plus the Hausdorff distance
// of the closed domains.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/field.hpp"

namespace rrefl {

namespace detail {

/// Largest distance from a vertex of `from` to the closed polyline `to`.
inline double directed_hausdorff(const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
  double worst = 0.0;
  for (const Vec2& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < to.size(); ++k) {
      best = std::min(best, point_segment_distance(p, to[k], to[(k + 1) % to.size()]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

struct OverlapDistance {
  double phi = 0.0;
  double grad = 0.0;
  std::size_t count = 0;
};

inline OverlapDistance overlap_distance(const SolutionField& a, const std::vector<FieldSample>& sa,
                                        const SolutionField& b, const std::vector<FieldSample>& sb) {
  OverlapDistance out;
  const auto& nodes = a.map.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto other = interpolate(b, sb, nodes[k]);
    if (!other) continue;
    ++out.count;
    out.phi = std::max(out.phi, std::abs(sa[k].phi - other->phi));
    out.grad = std::max(out.grad, norm(sa[k].grad - other->grad));
  }
  return out;
}

}  // namespace detail

/// Boundary Hausdorff distance between the two domains.
inline double domain_hausdorff(const SolutionField& a, const SolutionField& b) {
  const auto pa = a.map.boundary_polyline();
  const auto pb = b.map.boundary_polyline();
  return std::max(detail::directed_hausdorff(pa, pb), detail::directed_hausdorff(pb, pa));
}

struct FamilyDistance {
  double phi = 0.0;
  double grad = 0.0;
  double hausdorff = 0.0;
  double total() const { return phi + grad + hausdorff; }
};

/// max|phi_a - phi_b| + max|Dphi_a - Dphi_b| over nodes of either grid that lie
/// in the other domain, plus the Hausdorff distance of the domains.
inline FamilyDistance family_distance_parts(const SolutionField& a, const SolutionField& b) {
  const auto sa = node_samples(a);
  const auto sb = node_samples(b);
  const auto ab = detail::overlap_distance(a, sa, b, sb);
  const auto ba = detail::overlap_distance(b, sb, a, sa);
  if (ab.count + ba.count == 0) fail(ErrorKind::EmptyOverlap, "the two domains do not share any grid node");
  return {std::max(ab.phi, ba.phi), std::max(ab.grad, ba.grad), domain_hausdorff(a, b)};
}

inline double c1_family_distance(const SolutionField& a, const SolutionField& b) {
  return family_distance_parts(a, b).total();
}

}  // namespace rrefl
