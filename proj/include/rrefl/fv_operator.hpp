#pragma once

// Conservative vertex-centred finite volumes for div(rho Dphi) + 2 rho = f on
// a SquareMap. Control volumes are the median duals of the bilinear cells;
// the unknown is psi = phi - phi_ref for a uniform reference state, whose
// gradient is evaluated exactly, so uniform states are reproduced to rounding.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "rrefl/errors.hpp"
#include "rrefl/gas.hpp"
#include "rrefl/square_map.hpp"

namespace rrefl {

enum class Side { Shock, Wedge, Sonic, Symmetry };

/// Boundary and source data of one boundary value problem.
struct BvpProblem {
  UniformState reference;
  /// Dirichlet value of phi on the sonic side (t = 0).
  std::function<double(Vec2)> dirichlet;
  /// Outward flux rho Dphi . n through a boundary piece; n carries the length.
  std::function<double(Side, Vec2 point, Vec2 n)> boundary_flux;
  /// Optional right-hand side f of div(rho Dphi) + 2 rho = f.
  std::function<double(Vec2)> source;
  /// Mach-squared cap m(x); where m < 1 the flux magnitude is continued
  /// linearly beyond the point where |Dphi|^2 = m c^2.
  std::function<double(Vec2)> mach_cap;
};

class FvOperator {
 public:
  FvOperator(const SquareMap& map, const GasParams& params, const BvpProblem& problem)
      : map_(&map), params_(params), problem_(problem) {
    build();
  }

  std::size_t size() const { return map_->size(); }
  const std::vector<double>& volumes() const { return volume_; }
  bool is_dirichlet(std::size_t k) const { return dirichlet_[k]; }

  double reference_phi(Vec2 x) const { return problem_.reference.potential(x); }

  /// Residual (flux out + volume terms) at every node; Dirichlet rows carry
  /// psi - psi_D. Throws VacuumReached if the Bernoulli base goes negative.
  std::vector<double> residual(const std::vector<double>& psi, double* max_mach_sq = nullptr) const {
    std::vector<double> r(size(), 0.0);
    assemble(psi, r, nullptr, max_mach_sq);
    return r;
  }

  /// Residual and Jacobian.
  std::vector<double> linearize(const std::vector<double>& psi, Eigen::SparseMatrix<double>& jac) const {
    std::vector<double> r(size(), 0.0);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(size() * 40);
    assemble(psi, r, &trip, nullptr);
    jac.resize(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    jac.setFromTriplets(trip.begin(), trip.end());
    return r;
  }

  /// Max over free nodes of |R| / volume.
  double scaled_norm(const std::vector<double>& r) const {
    double m = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      m = std::max(m, dirichlet_[k] ? std::abs(r[k]) : std::abs(r[k]) / volume_[k]);
    }
    return m;
  }

  /// Dirichlet values of psi.
  const std::vector<double>& dirichlet_values() const { return psi_d_; }

 private:
  struct Face {
    std::array<int, 2> nodes;  // local corner indices, flux from nodes[0] to nodes[1]
    Vec2 point;
    Vec2 normal;  // length-weighted, pointing from nodes[0] to nodes[1]
    std::array<double, 4> N;
    std::array<Vec2, 4> grad_N;
  };
  struct Sub {
    int corner;
    Vec2 point;
    double area;
    std::array<double, 4> N;
    std::array<Vec2, 4> grad_N;
    double source;
  };
  struct Cell {
    std::array<std::size_t, 4> ids;
    std::array<Face, 4> faces;
    std::array<Sub, 4> subs;
    std::array<double, 4> mach_cap_face;
  };

  static std::array<double, 4> shape(double a, double b) {
    return {(1 - a) * (1 - b), a * (1 - b), (1 - a) * b, a * b};
  }

  std::array<Vec2, 4> shape_grad(int i, int j, double a, double b) const {
    const auto& m = *map_;
    const Vec2 p00 = m.node(i, j), p10 = m.node(i + 1, j), p01 = m.node(i, j + 1), p11 = m.node(i + 1, j + 1);
    const Vec2 xa = (1 - b) * (p10 - p00) + b * (p11 - p01);
    const Vec2 xb = (1 - a) * (p01 - p00) + a * (p11 - p10);
    const double det = cross(xa, xb);
    const std::array<double, 4> na{-(1 - b), (1 - b), -b, b};
    const std::array<double, 4> nb{-(1 - a), -a, (1 - a), a};
    std::array<Vec2, 4> g{};
    for (int k = 0; k < 4; ++k) {
      // J^{-T} (N_a, N_b) with J = [xa xb].
      g[k] = Vec2{xb.y * na[k] - xa.y * nb[k], -xb.x * na[k] + xa.x * nb[k]} / det;
    }
    return g;
  }

  static double shoelace(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    return 0.5 * (cross(a, b) + cross(b, c) + cross(c, d) + cross(d, a));
  }

  void add_boundary(std::size_t id, Side side, Vec2 a, Vec2 b, Vec2 inward_ref) {
    const Vec2 mid = 0.5 * (a + b);
    Vec2 n = perp(b - a);
    if (dot(n, mid - inward_ref) < 0.0) n = -n;
    boundary_rhs_[id] += problem_.boundary_flux(side, mid, n);
  }

  void build() {
    const auto& m = *map_;
    const int n1 = m.n1(), n2 = m.n2();
    volume_.assign(size(), 0.0);
    boundary_rhs_.assign(size(), 0.0);
    dirichlet_.assign(size(), false);
    psi_d_.assign(size(), 0.0);
    for (int i = 0; i < n1; ++i) {
      const std::size_t k = m.index(i, 0);
      dirichlet_[k] = true;
      const Vec2 x = m.node(i, 0);
      psi_d_[k] = problem_.dirichlet(x) - reference_phi(x);
    }
    static constexpr std::array<std::array<double, 2>, 4> corner_ab{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    cells_.clear();
    cells_.reserve(static_cast<std::size_t>(n1 - 1) * (n2 - 1));
    for (int j = 0; j + 1 < n2; ++j) {
      for (int i = 0; i + 1 < n1; ++i) {
        Cell c;
        c.ids = {m.index(i, j), m.index(i + 1, j), m.index(i, j + 1), m.index(i + 1, j + 1)};
        const Vec2 center = m.cell_point(i, j, 0.5, 0.5);
        const std::array<std::array<double, 4>, 4> face_def{{
            {0.5, 0.0, 0.5, 0.5},  // between corners 0 and 1
            {0.5, 0.5, 1.0, 0.5},  // 1 and 3
            {0.5, 0.5, 0.5, 1.0},  // 2 and 3
            {0.0, 0.5, 0.5, 0.5},  // 0 and 2
        }};
        const std::array<std::array<int, 2>, 4> face_nodes{{{0, 1}, {1, 3}, {2, 3}, {0, 2}}};
        for (int f = 0; f < 4; ++f) {
          const auto& d = face_def[f];
          const Vec2 pa = m.cell_point(i, j, d[0], d[1]);
          const Vec2 pb = m.cell_point(i, j, d[2], d[3]);
          const double ma = 0.5 * (d[0] + d[2]), mb = 0.5 * (d[1] + d[3]);
          Face& face = c.faces[f];
          face.nodes = face_nodes[f];
          face.point = m.cell_point(i, j, ma, mb);
          Vec2 n = perp(pb - pa);
          const Vec2 from = m.node(i + static_cast<int>(corner_ab[face.nodes[0]][0]), j + static_cast<int>(corner_ab[face.nodes[0]][1]));
          const Vec2 to = m.node(i + static_cast<int>(corner_ab[face.nodes[1]][0]), j + static_cast<int>(corner_ab[face.nodes[1]][1]));
          if (dot(n, to - from) < 0.0) n = -n;
          face.normal = n;
          face.N = shape(ma, mb);
          face.grad_N = shape_grad(i, j, ma, mb);
          c.mach_cap_face[f] = problem_.mach_cap ? problem_.mach_cap(face.point) : 1e300;
        }
        for (int q = 0; q < 4; ++q) {
          const double a0 = 0.5 * corner_ab[q][0], b0 = 0.5 * corner_ab[q][1];
          Sub& s = c.subs[q];
          s.corner = q;
          s.area = std::abs(shoelace(m.cell_point(i, j, a0, b0), m.cell_point(i, j, a0 + 0.5, b0),
                                     m.cell_point(i, j, a0 + 0.5, b0 + 0.5), m.cell_point(i, j, a0, b0 + 0.5)));
          s.point = m.cell_point(i, j, a0 + 0.25, b0 + 0.25);
          s.N = shape(a0 + 0.25, b0 + 0.25);
          s.grad_N = shape_grad(i, j, a0 + 0.25, b0 + 0.25);
          s.source = problem_.source ? problem_.source(s.point) : 0.0;
          volume_[c.ids[q]] += s.area;
        }
        // Boundary half-edges.
        if (i == 0) {
          const Vec2 mid = m.cell_point(i, j, 0.0, 0.5);
          add_boundary(c.ids[0], Side::Shock, m.node(i, j), mid, center);
          add_boundary(c.ids[2], Side::Shock, mid, m.node(i, j + 1), center);
        }
        if (i + 2 == n1) {
          const Vec2 mid = m.cell_point(i, j, 1.0, 0.5);
          add_boundary(c.ids[1], Side::Wedge, m.node(i + 1, j), mid, center);
          add_boundary(c.ids[3], Side::Wedge, mid, m.node(i + 1, j + 1), center);
        }
        if (j + 2 == n2) {
          const Vec2 mid = m.cell_point(i, j, 0.5, 1.0);
          add_boundary(c.ids[2], Side::Symmetry, m.node(i, j + 1), mid, center);
          add_boundary(c.ids[3], Side::Symmetry, mid, m.node(i + 1, j + 1), center);
        }
        cells_.push_back(c);
      }
    }
  }

  struct Local {
    double phi, rho, c2;
    Vec2 grad;
  };

  Local evaluate(const std::array<double, 4>& N, const std::array<Vec2, 4>& gN, Vec2 x,
                 const std::array<double, 4>& psi) const {
    const auto& ref = problem_.reference;
    Local l;
    l.phi = ref.potential(x);
    l.grad = ref.gradient(x);
    for (int k = 0; k < 4; ++k) {
      l.phi += N[k] * psi[k];
      l.grad += psi[k] * gN[k];
    }
    l.rho = density(norm_sq(l.grad), l.phi, params_);
    l.c2 = std::pow(l.rho, params_.gamma - 1.0);
    return l;
  }

  struct FaceFlux {
    double value;
    Vec2 d_grad;
    double d_phi;
  };

  /// rho Dphi . n, with the flux magnitude continued linearly past the Mach
  /// cap m < 1 so the normal slope stays rho* (1 - m) > 0.
  FaceFlux face_flux(const Local& l, Vec2 n, double cap) const {
    const double gm1 = params_.gamma - 1.0;
    const double q2 = norm_sq(l.grad);
    const double qn = dot(l.grad, n);
    if (cap < 1.0 && q2 > cap * l.c2) {
      const double base = params_.enthalpy0() - gm1 * l.phi;
      const double den = 1.0 + 0.5 * gm1 * cap;
      const double cs2 = base / den;
      const double qs = std::sqrt(cap * cs2);
      const double rs = std::pow(cs2, 1.0 / gm1);
      const double q = std::sqrt(q2);
      const double slope = rs * (1.0 - cap);
      const double amp = rs * qs + slope * (q - qs);
      const double drs = -rs / (cs2 * den);
      const double dqs = -0.5 * cap * gm1 / (den * qs);
      const double damp = drs * (qs + (1.0 - cap) * (q - qs)) + rs * cap * dqs;
      return {amp * qn / q, (slope * qn / q2) * l.grad + amp * (n / q - (qn / (q2 * q)) * l.grad), damp * qn / q};
    }
    const double k = l.rho / l.c2;
    return {l.rho * qn, l.rho * n - (k * qn) * l.grad, -k * qn};
  }

  void assemble(const std::vector<double>& psi, std::vector<double>& r, std::vector<Eigen::Triplet<double>>* trip,
                double* max_mach_sq) const {
    for (std::size_t k = 0; k < size(); ++k) {
      if (dirichlet_[k]) {
        r[k] = psi[k] - psi_d_[k];
        if (trip) trip->emplace_back(static_cast<int>(k), static_cast<int>(k), 1.0);
      } else {
        r[k] = boundary_rhs_[k];
      }
    }
    double mmax = 0.0;
    for (const Cell& c : cells_) {
      const std::array<double, 4> lp{psi[c.ids[0]], psi[c.ids[1]], psi[c.ids[2]], psi[c.ids[3]]};
      for (int f = 0; f < 4; ++f) {
        const Face& face = c.faces[f];
        const Local l = evaluate(face.N, face.grad_N, face.point, lp);
        const FaceFlux ff = face_flux(l, face.normal, c.mach_cap_face[f]);
        const std::size_t a = c.ids[face.nodes[0]], b = c.ids[face.nodes[1]];
        if (!dirichlet_[a]) r[a] += ff.value;
        if (!dirichlet_[b]) r[b] -= ff.value;
        mmax = std::max(mmax, norm_sq(l.grad) / l.c2);
        if (trip) {
          for (int k = 0; k < 4; ++k) {
            const double d = dot(ff.d_grad, face.grad_N[k]) + ff.d_phi * face.N[k];
            add(*trip, a, c.ids[k], d);
            add(*trip, b, c.ids[k], -d);
          }
        }
      }
      for (int q = 0; q < 4; ++q) {
        const Sub& s = c.subs[q];
        const Local l = evaluate(s.N, s.grad_N, s.point, lp);
        const std::size_t a = c.ids[s.corner];
        if (!dirichlet_[a]) r[a] += (2.0 * l.rho - s.source) * s.area;
        if (trip) {
          for (int k = 0; k < 4; ++k) {
            const double d = -2.0 * s.area * l.rho / l.c2 * (s.N[k] + dot(l.grad, s.grad_N[k]));
            add(*trip, a, c.ids[k], d);
          }
        }
      }
    }
    if (max_mach_sq) *max_mach_sq = mmax;
  }

  void add(std::vector<Eigen::Triplet<double>>& trip, std::size_t row, std::size_t col, double v) const {
    if (dirichlet_[row]) return;
    trip.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
  }

  const SquareMap* map_;
  GasParams params_;
  BvpProblem problem_;
  std::vector<Cell> cells_;
  std::vector<double> volume_;
  std::vector<double> boundary_rhs_;
  std::vector<bool> dirichlet_;
  std::vector<double> psi_d_;
};

}  // namespace rrefl
