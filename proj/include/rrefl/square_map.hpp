#pragma once

// Boundary-fitted structured grid on Omega: discrete transfinite (Coons)
// interpolation from the unit square (s, t), with
//   s = 0 : shock (P1 -> P2)      s = 1 : wedge (P4 -> P3)
//   t = 0 : sonic side (P1 -> P4) t = 1 : symmetry axis (P2 -> P3).
// Grid lines in t are stretched towards the sonic side.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/geometry.hpp"
#include "rrefl/vec2.hpp"

namespace rrefl {

inline constexpr double kDefaultStretch = 0.5;

/// sigma(t) = (1 - beta) t + beta t^2; beta = 1 gives spacing proportional to
/// sqrt(distance) from the sonic side but a singular first row.
inline double stretch(double t, double beta) { return (1.0 - beta) * t + beta * t * t; }

inline std::vector<double> stretched_levels(int n, double beta) {
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = stretch(static_cast<double>(j) / (n - 1), beta);
  return out;
}

/// Shock-side levels on the t-grid: fraction of the way from P1 to the axis.
inline std::vector<double> shock_levels(int n2, double beta = kDefaultStretch) { return stretched_levels(n2, beta); }

class SquareMap {
 public:
  SquareMap() = default;

  /// Builds the grid from four boundary polylines sampled on the grid lines.
  /// shock[j], wedge[j] for j < n2 and sonic[i], sym[i] for i < n1, with
  /// matching corners.
  SquareMap(int n1, int n2, std::vector<Vec2> shock, std::vector<Vec2> wedge, std::vector<Vec2> sonic,
            std::vector<Vec2> sym, std::vector<double> t_levels)
      : n1_(n1), n2_(n2), t_(std::move(t_levels)) {
    if (n1 < 3 || n2 < 3) fail(ErrorKind::InvalidParameter, "grid needs at least 3 x 3 nodes");
    s_.resize(n1);
    for (int i = 0; i < n1; ++i) s_[i] = static_cast<double>(i) / (n1 - 1);
    const Vec2 c00 = shock.front(), c01 = shock.back(), c10 = wedge.front(), c11 = wedge.back();
    nodes_.resize(static_cast<std::size_t>(n1) * n2);
    for (int j = 0; j < n2; ++j) {
      const double t = t_[j];
      for (int i = 0; i < n1; ++i) {
        const double s = s_[i];
        Vec2 x = (1 - s) * shock[j] + s * wedge[j] + (1 - t) * sonic[i] + t * sym[i] -
                 ((1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + (1 - s) * t * c01 + s * t * c11);
        if (i == 0) x = shock[j];
        if (i == n1 - 1) x = wedge[j];
        if (j == 0) x = sonic[i];
        if (j == n2 - 1) x = sym[i];
        nodes_[index(i, j)] = x;
      }
    }
    check_orientation();
  }

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n1_ + i; }
  const Vec2& node(int i, int j) const { return nodes_[index(i, j)]; }
  const std::vector<Vec2>& nodes() const { return nodes_; }
  double s(int i) const { return s_[i]; }
  double t(int j) const { return t_[j]; }
  const std::vector<double>& t_levels() const { return t_; }
  /// -1 when the (s, t) frame maps to a clockwise physical frame.
  double orientation() const { return orientation_; }

  /// Bilinear image of local coordinates (a, b) in cell (i, j).
  Vec2 cell_point(int i, int j, double a, double b) const {
    return (1 - a) * (1 - b) * node(i, j) + a * (1 - b) * node(i + 1, j) + (1 - a) * b * node(i, j + 1) +
           a * b * node(i + 1, j + 1);
  }

  /// Forward map of a point of the unit square, bilinear between grid nodes.
  Vec2 map(double s, double t) const {
    const auto [i, a] = locate(s_, s);
    const auto [j, b] = locate(t_, t);
    return cell_point(i, j, a, b);
  }

  struct Located {
    int i, j;
    double a, b;
  };

  /// Cell and local coordinates of a physical point, or nullopt if outside.
  std::optional<Located> find(Vec2 xi, double slack = 1e-10) const {
    if (buckets_.empty()) build_buckets();
    const int bx = std::clamp(static_cast<int>((xi.x - lo_.x) / cell_.x), 0, nb_ - 1);
    const int by = std::clamp(static_cast<int>((xi.y - lo_.y) / cell_.y), 0, nb_ - 1);
    if (xi.x < lo_.x - slack || xi.y < lo_.y - slack || xi.x > hi_.x + slack || xi.y > hi_.y + slack) {
      return std::nullopt;
    }
    std::optional<Located> best;
    double best_excess = std::numeric_limits<double>::infinity();
    for (int c : buckets_[static_cast<std::size_t>(by) * nb_ + bx]) {
      const int i = c % (n1_ - 1);
      const int j = c / (n1_ - 1);
      const auto loc = invert_cell(i, j, xi);
      if (!loc) continue;
      const double excess = std::max({-loc->a, loc->a - 1.0, -loc->b, loc->b - 1.0, 0.0});
      if (excess < best_excess) {
        best_excess = excess;
        best = loc;
      }
      if (excess == 0.0) break;
    }
    if (!best || best_excess > 1e-9) return std::nullopt;
    best->a = std::clamp(best->a, 0.0, 1.0);
    best->b = std::clamp(best->b, 0.0, 1.0);
    return best;
  }

  /// Inverse map to the unit square.
  std::optional<std::pair<double, double>> inverse(Vec2 xi) const {
    const auto loc = find(xi);
    if (!loc) return std::nullopt;
    return std::pair{s_[loc->i] + loc->a * (s_[loc->i + 1] - s_[loc->i]),
                     t_[loc->j] + loc->b * (t_[loc->j + 1] - t_[loc->j])};
  }

  double max_edge_length() const {
    double h = 0.0;
    for (int j = 0; j < n2_; ++j) {
      for (int i = 0; i < n1_; ++i) {
        if (i + 1 < n1_) h = std::max(h, distance(node(i, j), node(i + 1, j)));
        if (j + 1 < n2_) h = std::max(h, distance(node(i, j), node(i, j + 1)));
      }
    }
    return h;
  }

  /// Closed boundary polyline: shock, axis, wedge (reversed), sonic side (reversed).
  std::vector<Vec2> boundary_polyline() const {
    std::vector<Vec2> out;
    for (int j = 0; j < n2_; ++j) out.push_back(node(0, j));
    for (int i = 1; i < n1_; ++i) out.push_back(node(i, n2_ - 1));
    for (int j = n2_ - 2; j >= 0; --j) out.push_back(node(n1_ - 1, j));
    for (int i = n1_ - 2; i > 0; --i) out.push_back(node(i, 0));
    return out;
  }

 private:
  static std::pair<int, double> locate(const std::vector<double>& grid, double x) {
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    int k = static_cast<int>(it - grid.begin()) - 1;
    k = std::clamp(k, 0, static_cast<int>(grid.size()) - 2);
    return {k, (x - grid[k]) / (grid[k + 1] - grid[k])};
  }

  static double shoelace(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    return 0.5 * (cross(a, b) + cross(b, c) + cross(c, d) + cross(d, a));
  }

  void check_orientation() {
    double total = 0.0;
    for (int j = 0; j + 1 < n2_; ++j) {
      for (int i = 0; i + 1 < n1_; ++i) total += cell_area_signed(i, j);
    }
    orientation_ = total < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j + 1 < n2_; ++j) {
      for (int i = 0; i + 1 < n1_; ++i) {
        // All four sub-quads of the median-dual split must keep the orientation.
        for (double a : {0.0, 0.5}) {
          for (double b : {0.0, 0.5}) {
            const double area = orientation_ * shoelace(cell_point(i, j, a, b), cell_point(i, j, a + 0.5, b),
                                                         cell_point(i, j, a + 0.5, b + 0.5),
                                                         cell_point(i, j, a, b + 0.5));
            if (!(area > 0.0)) {
              fail(ErrorKind::FoldedMesh, "cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                              ") has non-positive Jacobian");
            }
          }
        }
      }
    }
  }

  double cell_area_signed(int i, int j) const {
    return shoelace(node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
  }

  std::optional<Located> invert_cell(int i, int j, Vec2 xi) const {
    const Vec2 p00 = node(i, j), p10 = node(i + 1, j), p01 = node(i, j + 1), p11 = node(i + 1, j + 1);
    double a = 0.5, b = 0.5;
    for (int it = 0; it < 50; ++it) {
      const Vec2 x = cell_point(i, j, a, b);
      const Vec2 r = x - xi;
      const Vec2 xa = (1 - b) * (p10 - p00) + b * (p11 - p01);
      const Vec2 xb = (1 - a) * (p01 - p00) + a * (p11 - p10);
      const double det = cross(xa, xb);
      if (det == 0.0) return std::nullopt;
      const double da = cross(r, xb) / det;
      const double db = cross(xa, r) / det;
      a -= da;
      b -= db;
      if (std::abs(da) + std::abs(db) < 1e-15) break;
      if (std::abs(a) > 10.0 || std::abs(b) > 10.0) return std::nullopt;
    }
    if (distance(cell_point(i, j, a, b), xi) > 1e-12 * (1.0 + norm(xi))) return std::nullopt;
    return Located{i, j, a, b};
  }

  void build_buckets() const {
    lo_ = nodes_.front();
    hi_ = nodes_.front();
    for (const Vec2& p : nodes_) {
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
      hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
    }
    nb_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nodes_.size())) / 2));
    cell_ = {std::max((hi_.x - lo_.x) / nb_, 1e-300), std::max((hi_.y - lo_.y) / nb_, 1e-300)};
    buckets_.assign(static_cast<std::size_t>(nb_) * nb_, {});
    const double pad = 1e-9 * (1.0 + std::max(hi_.x - lo_.x, hi_.y - lo_.y));
    for (int j = 0; j + 1 < n2_; ++j) {
      for (int i = 0; i + 1 < n1_; ++i) {
        Vec2 clo = node(i, j), chi = node(i, j);
        for (const Vec2& p : {node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)}) {
          clo = {std::min(clo.x, p.x), std::min(clo.y, p.y)};
          chi = {std::max(chi.x, p.x), std::max(chi.y, p.y)};
        }
        const int x0 = std::clamp(static_cast<int>((clo.x - pad - lo_.x) / cell_.x), 0, nb_ - 1);
        const int x1 = std::clamp(static_cast<int>((chi.x + pad - lo_.x) / cell_.x), 0, nb_ - 1);
        const int y0 = std::clamp(static_cast<int>((clo.y - pad - lo_.y) / cell_.y), 0, nb_ - 1);
        const int y1 = std::clamp(static_cast<int>((chi.y + pad - lo_.y) / cell_.y), 0, nb_ - 1);
        for (int by = y0; by <= y1; ++by) {
          for (int bx = x0; bx <= x1; ++bx) {
            buckets_[static_cast<std::size_t>(by) * nb_ + bx].push_back(j * (n1_ - 1) + i);
          }
        }
      }
    }
  }

  int n1_ = 0;
  int n2_ = 0;
  std::vector<double> s_;
  std::vector<double> t_;
  std::vector<Vec2> nodes_;
  double orientation_ = 1.0;
  mutable std::vector<std::vector<int>> buckets_;
  mutable Vec2 lo_, hi_, cell_;
  mutable int nb_ = 0;
};

/// Grid on Omega for the given configuration and shock. The shock nodes must
/// lie on the t-levels of the grid.
inline SquareMap build_square_map(const ReflectionConfiguration& cfg, const ShockCurve& shock, int n1, int n2,
                                  double beta = kDefaultStretch) {
  if (static_cast<int>(shock.points.size()) != n2) {
    fail(ErrorKind::InvalidParameter, "shock must carry one node per grid row");
  }
  const auto t_levels = stretched_levels(n2, beta);
  std::vector<Vec2> wedge(n2), sonic(n1), sym(n1);
  const Vec2 p2 = shock.points.back();
  for (int j = 0; j < n2; ++j) wedge[j] = cfg.p4 + t_levels[j] * (cfg.p3 - cfg.p4);
  for (int i = 0; i < n1; ++i) {
    const double s = static_cast<double>(i) / (n1 - 1);
    sonic[i] = cfg.sonic_point(s);
    sym[i] = p2 + s * (cfg.p3 - p2);
  }
  sonic.front() = shock.points.front();
  sonic.back() = cfg.p4;
  return SquareMap(n1, n2, shock.points, std::move(wedge), std::move(sonic), std::move(sym), t_levels);
}

}  // namespace rrefl
