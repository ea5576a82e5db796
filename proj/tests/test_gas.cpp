#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "rrefl/gas.hpp"

using namespace rrefl;

namespace {

GasParams gas(double rho0, double gamma) { return GasParams::make(rho0, 2.0 * rho0, gamma); }

}  // namespace

TEST(GasParams, Validation) {
  EXPECT_THROW(GasParams::make(1.0, 2.0, 0.9), Error);
  EXPECT_THROW(GasParams::make(1.0, 2.0, 3.5), Error);
  EXPECT_NO_THROW(GasParams::make(1.0, 2.0, 3.5, true));
  EXPECT_THROW(GasParams::make(0.0, 2.0, 1.4), Error);
  try {
    GasParams::make(1.0, 1.0, 1.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCompression);
  }
}

TEST(GasParams, BernoulliConstant) {
  for (double rho0 : {0.3, 1.0, 2.5}) {
    for (double gamma : {1.1, 1.4, 2.0, 3.0}) {
      const auto p = GasParams::make(rho0, 2 * rho0, gamma);
      EXPECT_NEAR(std::pow(rho0, gamma - 1), (gamma - 1) * p.bernoulli + 1.0, 1e-15);
    }
  }
}

TEST(Density, Examples) {
  EXPECT_DOUBLE_EQ(density(0.0, 0.0, gas(1.0, 2.0)), 1.0);
  EXPECT_DOUBLE_EQ(density(1.0, 0.0, gas(1.0, 2.0)), 0.5);
  const double ref = oracle::to_double(oracle::density(oracle::real("0.3"), oracle::real("0.1"),
                                                       oracle::real("1.2"), oracle::real("1.4")));
  EXPECT_NEAR(density(0.3, 0.1, gas(1.2, 1.4)), ref, 1e-15);
  EXPECT_NEAR(density(0.3, 0.1, gas(1.2, 1.4)), 0.94024125548336583, 1e-15);
}

TEST(Density, Vacuum) {
  try {
    density(10.0, 0.0, gas(1.0, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VacuumReached);
  }
}

TEST(SoundSpeed, Examples) {
  EXPECT_DOUBLE_EQ(sound_speed(1.0, gas(1.0, 1.4)), 1.0);
  EXPECT_DOUBLE_EQ(sound_speed(4.0, gas(1.0, 3.0)), 4.0);
  const double ref = oracle::to_double(pow(oracle::real(2), oracle::real("0.2")));
  EXPECT_NEAR(sound_speed(2.0, gas(1.0, 1.4)), ref, 1e-15);
  EXPECT_NEAR(ref, 1.1486983549970350, 1e-15);
  EXPECT_THROW(sound_speed(0.0, gas(1.0, 1.4)), Error);
}

TEST(EllipticityMargin, Examples) {
  EXPECT_NEAR(ellipticity_margin({0, 0}, 0.0, gas(1.0, 3.0)), std::sqrt(0.5), 1e-15);
  const auto p = gas(1.0, 2.0);
  const double cstar = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(ellipticity_margin({cstar, 0.0}, 0.0, p), 0.0, 1e-15);
  EXPECT_THROW(ellipticity_margin({0, 0}, 10.0, p), Error);
}

TEST(EllipticityMargin, StateOneAtReflectionPoint) {
  using oracle::real;
  const auto p = GasParams::make(1.0, 2.0, 2.0);
  const real u1 = oracle::incident_u1(1, 2, 2);
  const real x0 = 2 * u1;
  const real pi = boost::math::constants::pi<real>();
  const real y0 = x0 * tan(real(85) * pi / 180);
  const real phi = -(x0 * x0 + y0 * y0) / 2 + u1 * x0 - u1 * x0;
  const real ref = sqrt(real(2) / 3 * (1 - phi)) - sqrt((u1 - x0) * (u1 - x0) + y0 * y0);

  const double u1d = oracle::to_double(u1);
  const UniformState s1 = make_uniform_state(u1d, 0.0, -u1d * 2 * u1d, p);
  const Vec2 xi{2 * u1d, 2 * u1d * std::tan(85.0 * std::numbers::pi / 180.0)};
  const auto pv = uniform_potential(s1, xi);
  EXPECT_NEAR(ellipticity_margin(pv.grad, pv.phi, p), oracle::to_double(ref), 1e-12);
  EXPECT_NEAR(oracle::to_double(ref), -7.8347562298841959, 1e-14);
}

TEST(UniformPotential, Examples) {
  UniformState rest;
  auto a = uniform_potential(rest, {0, 0});
  EXPECT_EQ(a.phi, 0.0);
  EXPECT_EQ(a.grad, (Vec2{0, 0}));
  UniformState s;
  s.u = 1.0;
  auto b = uniform_potential(s, {1, 0});
  EXPECT_DOUBLE_EQ(b.phi, 0.5);
  EXPECT_EQ(b.grad, (Vec2{0, 0}));
}

TEST(UniformPotential, MatchesHighPrecision) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    UniformState s;
    s.u = d(rng);
    s.v = d(rng);
    s.k = d(rng);
    const Vec2 xi{d(rng), d(rng)};
    using oracle::real;
    const real phi = -(real(xi.x) * xi.x + real(xi.y) * xi.y) / 2 + real(s.u) * xi.x + real(s.v) * xi.y + s.k;
    const auto pv = uniform_potential(s, xi);
    EXPECT_NEAR(pv.phi, oracle::to_double(phi), 1e-13);
    EXPECT_EQ(pv.grad.x, s.u - xi.x);
    EXPECT_EQ(pv.grad.y, s.v - xi.y);
  }
}

TEST(UniformState, DensityIsPointIndependent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> vel(-0.5, 0.5);
  std::uniform_real_distribution<double> pt(-2.0, 2.0);
  for (double gamma : {1.4, 2.0, 3.0}) {
    const auto p = GasParams::make(1.0, 2.0, gamma);
    for (int n = 0; n < 20; ++n) {
      const UniformState s = make_uniform_state(vel(rng), vel(rng), 0.4 * vel(rng), p);
      EXPECT_NEAR(s.c * s.c, std::pow(s.rho, gamma - 1), 1e-14);
      for (int i = 0; i < 100; ++i) {
        const auto pv = uniform_potential(s, {pt(rng), pt(rng)});
        EXPECT_NEAR(density(norm_sq(pv.grad), pv.phi, p), s.rho, 1e-12);
      }
    }
  }
}

TEST(Monotonicity, MarginDecreasesInSpeed) {
  const auto p = gas(1.0, 1.4);
  double prev = ellipticity_margin({0, 0}, 0.2, p);
  for (int i = 1; i < 100; ++i) {
    const double m = ellipticity_margin({0.01 * i, 0.0}, 0.2, p);
    EXPECT_LT(m, prev);
    prev = m;
  }
}

TEST(Monotonicity, DensityDecreasesInPhiAndSpeed) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 0.5);
  for (double gamma : {1.4, 2.0, 3.0}) {
    const auto p = gas(1.0, gamma);
    for (int i = 0; i < 200; ++i) {
      const double g = d(rng);
      const double phi = d(rng) - 0.25;
      const double r = density(g, phi, p);
      EXPECT_GT(r, density(g + 1e-3, phi, p));
      EXPECT_GT(r, density(g, phi + 1e-3, p));
    }
  }
}
