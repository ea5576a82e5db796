#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rrefl/admissibility.hpp"
#include "rrefl/continuation.hpp"

using namespace rrefl;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const GasParams& base_params() {
  static const GasParams p = GasParams::make(1.0, 2.0, 2.0);
  return p;
}

const SolutionField& converged85() {
  static const SolutionField s = solve_from_normal(base_params(), 85 * kDeg, IterationParams{}, 17, 17, 1 * kDeg);
  return s;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidParameter;
}

}  // namespace

TEST(FixedPoint, NormalReflectionIsReproducedInOneStep) {
  const auto nr = normal_reflection(base_params(), 17, 17);
  const auto sol = fixed_point_solve(base_params(), kHalfPi, IterationParams{}, nr);
  ASSERT_EQ(sol.residual_history.size(), 1u);
  EXPECT_LT(sol.residual_history[0].shock_movement, 1e-14);
  EXPECT_LT(sol.residual_history[0].field_change, 1e-14);
  for (std::size_t k = 0; k < sol.phi.size(); ++k) {
    EXPECT_NEAR(sol.phi[k], sol.config.state2.potential(sol.map.nodes()[k]), 1e-14);
  }
  for (const Vec2& p : sol.shock.points) EXPECT_NEAR(p.x, sol.config.p2.x, 1e-15);
}

TEST(UpdateShock, FlatShockStaysFlat) {
  const auto nr = normal_reflection(base_params(), 9, 13);
  const auto upd = update_shock(nr.config, nr.map, nr.psi(), nr.shock, 0.5);
  EXPECT_LT(upd.movement, 1e-15);
}

TEST(UpdateShock, DisplacedShockIsPulledBack) {
  // phi2 - phi1 is linear, so a full step lands on the straight shock.
  const auto nr = normal_reflection(base_params(), 9, 13);
  ShockCurve moved = nr.shock;
  const double delta = 0.01;
  for (std::size_t j = 1; j < moved.points.size(); ++j) moved.points[j].x -= delta;
  const SquareMap map = build_square_map(nr.config, moved, 9, 13);
  const std::vector<double> zero(map.size(), 0.0);
  const auto full = update_shock(nr.config, map, zero, moved, 1.0);
  for (std::size_t j = 0; j < full.shock.points.size(); ++j) {
    EXPECT_NEAR(full.shock.points[j].x, nr.shock.points[j].x, 1e-12);
    EXPECT_EQ(full.shock.points[j].y, nr.shock.points[j].y);
  }
  EXPECT_NEAR(full.movement, delta, 1e-12);
  const auto half = update_shock(nr.config, map, zero, moved, 0.5);
  for (std::size_t j = 1; j + 1 < half.shock.points.size(); ++j) {
    EXPECT_NEAR(half.shock.points[j].x, nr.shock.points[j].x - 0.5 * delta, 1e-12);
  }
}

TEST(UpdateShock, RejectsDecreasingJump) {
  const auto nr = normal_reflection(base_params(), 9, 13);
  std::vector<double> psi(nr.map.size());
  // Reverse the slope of phi - phi1 along e on the shock side.
  const Vec2 d = nr.config.incident.state1.gradient({0, 0}) - nr.config.state2.gradient({0, 0});
  for (std::size_t k = 0; k < psi.size(); ++k) psi[k] = 2.0 * dot(d, nr.map.nodes()[k]);
  EXPECT_EQ(kind_of([&] { update_shock(nr.config, nr.map, psi, nr.shock, 0.5); }), ErrorKind::GraphPropertyLost);
}

TEST(FixedPoint, ConvergedStateInvariants) {
  const auto& s = converged85();
  const auto& cfg = s.config;
  const auto& s1 = cfg.incident.state1;
  EXPECT_EQ(s.status, "converged");
  EXPECT_LT(s.residual_history.back().shock_movement, s.iter.tol_fixed_point);
  EXPECT_LT(s.residual_history.back().field_change, s.iter.tol_fixed_point);
  const auto samples = node_samples(s);
  for (const auto& f : samples) EXPECT_GT(density(norm_sq(f.grad), f.phi, cfg.params), 0.0);
  for (int i = 0; i < s.n1(); ++i) {
    const Vec2 x = s.map.node(i, 0);
    EXPECT_NEAR(s.phi[s.map.index(i, 0)], cfg.state2.potential(x), 1e-8);
  }
  // The shock sits on the level set phi = phi1 of the computed field.
  for (int j = 1; j + 1 < s.n2(); ++j) {
    const Vec2 x = s.map.node(0, j);
    EXPECT_NEAR(s.phi[s.map.index(0, j)], s1.potential(x), 1e-8);
  }
  EXPECT_EQ(s.shock.points.front().x, cfg.p1.x);
  EXPECT_EQ(s.shock.points.front().y, cfg.p1.y);
  EXPECT_EQ(s.shock.points.back().y, 0.0);
}

TEST(FixedPoint, MassFluxMatchesAcrossShock) {
  const auto& s = converged85();
  const auto& s1 = s.config.incident.state1;
  const auto samples = node_samples(s);
  const double tol = grid_tolerance(s.map.max_edge_length(), AdmissibilityOptions{});
  for (int j : {s.n2() / 4, s.n2() / 2, 3 * s.n2() / 4}) {
    const Vec2 x = s.map.node(0, j);
    const Vec2 t = s.map.node(0, j + 1) - s.map.node(0, j - 1);
    Vec2 nu = normalized(Vec2{t.y, -t.x});
    if (nu.x < 0.0) nu = -1.0 * nu;
    const auto& f = samples[s.map.index(0, j)];
    const double down = density(norm_sq(f.grad), f.phi, s.config.params) * dot(f.grad, nu);
    const double up = s.config.params.rho1 * dot(s1.gradient(x), nu);
    EXPECT_LT(std::abs(down - up), tol) << "j = " << j;
  }
}

TEST(FixedPoint, ConvergesNextToNormalReflection) {
  const auto nr = fixed_point_solve(base_params(), kHalfPi, IterationParams{}, normal_reflection(base_params(), 17, 17));
  const auto s89 = fixed_point_solve(base_params(), 89 * kDeg, IterationParams{}, nr);
  EXPECT_TRUE(full_report(s89).pass);
  const double d = c1_family_distance(nr, s89);
  EXPECT_GT(d, 0.0);
  const auto s88 = fixed_point_solve(base_params(), 88 * kDeg, IterationParams{}, s89);
  EXPECT_LT(d, c1_family_distance(nr, s88));
}

TEST(FixedPoint, HistoryIsRecordedAndShrinks) {
  const auto& h = converged85().residual_history;
  ASSERT_GE(h.size(), 3u);
  for (std::size_t k = 0; k < h.size(); ++k) EXPECT_EQ(h[k].iteration, static_cast<int>(k) + 1);
  EXPECT_LT(h.back().shock_movement, 1e-3 * h.front().shock_movement);
  for (const auto& r : h) EXPECT_LT(r.interior_residual, 1e-8);
}

TEST(FixedPoint, OuterLimitRaisesNoConvergence) {
  IterationParams it;
  it.max_outer = 2;
  const auto nr = normal_reflection(base_params(), 9, 9, it);
  EXPECT_EQ(kind_of([&] { fixed_point_solve(base_params(), 85 * kDeg, it, nr); }), ErrorKind::NoConvergence);
}

TEST(FixedPoint, ObserverSeesEveryIteration) {
  const auto nr = normal_reflection(base_params(), 9, 9);
  int calls = 0;
  const auto s = fixed_point_solve(base_params(), 88 * kDeg, IterationParams{}, nr, 0, 0,
                                   [&](const OuterRecord&) { ++calls; });
  EXPECT_EQ(calls, static_cast<int>(s.residual_history.size()));
}

TEST(Sweep, GridValidation) {
  const IterationParams it;
  EXPECT_EQ(kind_of([&] { continuation_sweep(base_params(), {}, it, 9, 9); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { continuation_sweep(base_params(), {89 * kDeg, 88 * kDeg}, it, 9, 9); }),
            ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { continuation_sweep(base_params(), {kHalfPi, 88 * kDeg, 89 * kDeg}, it, 9, 9); }),
            ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { continuation_sweep(base_params(), {kHalfPi, kHalfPi}, it, 9, 9); }),
            ErrorKind::InvalidParameter);
}

TEST(Sweep, SingleMemberGrid) {
  const auto r = continuation_sweep(base_params(), {kHalfPi}, IterationParams{}, 9, 9);
  EXPECT_TRUE(r.complete());
  EXPECT_EQ(r.family.size(), 1u);
  EXPECT_TRUE(r.distances.empty());
}

TEST(Sweep, StopsAtDetachmentWithPartialFamily) {
  const auto r = continuation_sweep(base_params(), {kHalfPi, 88 * kDeg, 50 * kDeg, 45 * kDeg}, IterationParams{}, 9, 9);
  ASSERT_FALSE(r.complete());
  EXPECT_EQ(*r.stop, ErrorKind::DetachedWedgeAngle);
  EXPECT_EQ(r.family.size(), 2u);
  EXPECT_EQ(r.distances.size(), 1u);
  EXPECT_FALSE(r.message.empty());
}

TEST(Sweep, LargeIncidentDensityEitherCompletesOrReportsAttachment) {
  const double rc = angle_diagram(base_params()).rho_c;
  const GasParams p = GasParams::make(1.0, 2.0 * rc, 2.0);
  const double td = detachment_angle(p);
  std::vector<double> grid;
  for (double d = 90.0; d * kDeg > td; d -= 5.0) grid.push_back(d * kDeg);
  grid.push_back(td + 1e-4);
  const auto r = continuation_sweep(p, grid, IterationParams{}, 13, 13);
  if (!r.complete()) {
    EXPECT_EQ(*r.stop, ErrorKind::AttachedShockDetected) << r.message;
  }
  for (const auto& m : r.family) EXPECT_LT(m.shock.points.back().x, 0.0);
}

TEST(Sweep, DistancesMatchMembers) {
  const auto r = continuation_sweep(base_params(), {kHalfPi, 89 * kDeg, 88 * kDeg}, IterationParams{}, 9, 9);
  ASSERT_TRUE(r.complete());
  ASSERT_EQ(r.distances.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_DOUBLE_EQ(r.distances[k], c1_family_distance(r.family[k], r.family[k + 1]));
  }
}

TEST(SolveFromNormal, ArgumentErrors) {
  const IterationParams it;
  EXPECT_EQ(kind_of([&] { solve_from_normal(base_params(), 85 * kDeg, it, 9, 9, 0.0); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { solve_from_normal(base_params(), 91 * kDeg, it, 9, 9, kDeg); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { solve_from_normal(base_params(), 40 * kDeg, it, 9, 9, kDeg); }),
            ErrorKind::DetachedWedgeAngle);
}

TEST(SolveFromNormal, StepSizeDoesNotChangeTheAnswer) {
  const auto a = solve_from_normal(base_params(), 87 * kDeg, IterationParams{}, 13, 13, 1 * kDeg);
  const auto b = solve_from_normal(base_params(), 87 * kDeg, IterationParams{}, 13, 13, 3 * kDeg);
  EXPECT_LT(c1_family_distance(a, b), 1e-7);
}
