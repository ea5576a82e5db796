#include <gtest/gtest.h>

#include <cmath>

#include "rrefl/family_distance.hpp"
#include "rrefl/solver.hpp"

using namespace rrefl;

namespace {

const GasParams& base_params() {
  static const GasParams p = GasParams::make(1.0, 2.0, 2.0);
  return p;
}

}  // namespace

TEST(FamilyDistance, IdenticalSolutionsAreAtZero) {
  const auto a = normal_reflection(base_params(), 17, 17);
  const auto parts = family_distance_parts(a, a);
  EXPECT_EQ(parts.phi, 0.0);
  EXPECT_EQ(parts.grad, 0.0);
  EXPECT_EQ(parts.hausdorff, 0.0);
  EXPECT_EQ(c1_family_distance(a, a), 0.0);
}

TEST(FamilyDistance, Symmetric) {
  const auto a = normal_reflection(base_params(), 17, 17);
  const auto b = normal_reflection(base_params(), 25, 21);
  EXPECT_DOUBLE_EQ(c1_family_distance(a, b), c1_family_distance(b, a));
}

TEST(FamilyDistance, NormalReflectionUnderRefinementIsSecondOrder) {
  // Same exact state on three grids: only differencing and chord errors remain.
  const auto a = normal_reflection(base_params(), 17, 17);
  const auto b = normal_reflection(base_params(), 33, 33);
  const auto c = normal_reflection(base_params(), 65, 65);
  const auto ab = family_distance_parts(a, b);
  const auto bc = family_distance_parts(b, c);
  EXPECT_LT(ab.phi, 1e-14);
  EXPECT_GT(ab.total(), 0.0);
  EXPECT_LT(ab.total(), 1e-2);
  EXPECT_GT(ab.total() / bc.total(), 3.0);
}

TEST(FamilyDistance, HausdorffOfShiftedDomain) {
  const auto a = normal_reflection(base_params(), 9, 9);
  SolutionField b = a;
  const auto& n = a.map.nodes();
  const int n1 = a.n1(), n2 = a.n2();
  std::vector<Vec2> shock(n2), wedge(n2), sonic(n1), sym(n1);
  const Vec2 shift{0.0, 0.01};
  for (int j = 0; j < n2; ++j) {
    shock[j] = n[a.map.index(0, j)] + shift;
    wedge[j] = n[a.map.index(n1 - 1, j)] + shift;
  }
  for (int i = 0; i < n1; ++i) {
    sonic[i] = n[a.map.index(i, 0)] + shift;
    sym[i] = n[a.map.index(i, n2 - 1)] + shift;
  }
  b.map = SquareMap(n1, n2, shock, wedge, sonic, sym, a.map.t_levels());
  EXPECT_NEAR(domain_hausdorff(a, b), 0.01, 1e-12);
}

TEST(FamilyDistance, DisjointDomains) {
  const auto a = normal_reflection(base_params(), 9, 9);
  SolutionField b = a;
  const int n1 = a.n1(), n2 = a.n2();
  std::vector<Vec2> shock(n2), wedge(n2), sonic(n1), sym(n1);
  for (int j = 0; j < n2; ++j) {
    const double t = a.map.t(j);
    shock[j] = {100.0, 1.0 - t};
    wedge[j] = {101.0, 1.0 - t};
  }
  for (int i = 0; i < n1; ++i) {
    const double s = static_cast<double>(i) / (n1 - 1);
    sonic[i] = {100.0 + s, 1.0};
    sym[i] = {100.0 + s, 0.0};
  }
  b.map = SquareMap(n1, n2, shock, wedge, sonic, sym, a.map.t_levels());
  try {
    c1_family_distance(a, b);
    FAIL() << "expected EmptyOverlap";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyOverlap);
  }
}
