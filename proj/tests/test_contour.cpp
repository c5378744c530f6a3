#include <gtest/gtest.h>

#include <cmath>

#include "autorb/contour.hpp"
#include "autorb/errors.hpp"
#include "oracles.hpp"

using autorb::Circle;
using autorb::Complex;
using autorb::ContourConfig;
using autorb::EntireFunction;

TEST(CircleIntegral, SimplePoleAtOrigin) {
  const auto r = autorb::circle_integral([](Complex w) { return 1.0 / w; }, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value - 1.0), 1e-14);
}

TEST(CircleIntegral, CubicHasNoResidue) {
  const auto r = autorb::circle_integral([](Complex w) { return w * w * w; }, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.value), 1e-13);
}

TEST(CircleIntegral, WindingOfOffsetPole) {
  auto g = [](Complex w) { return 1.0 / (w - 3.0); };
  EXPECT_LT(std::abs(autorb::circle_integral(g, 5.0).value - 1.0), 1e-13);
  EXPECT_LT(std::abs(autorb::circle_integral(g, 2.0).value), 1e-13);
}

TEST(CircleIntegral, OffCentreCircle) {
  auto g = [](Complex w) { return 1.0 / (w - Complex(3.0, 1.0)); };
  EXPECT_LT(std::abs(autorb::circle_integral(g, Circle{Complex(3.0, 0.0), 2.0}).value - 1.0), 1e-13);
  EXPECT_LT(std::abs(autorb::circle_integral(g, Circle{Complex(-3.0, 0.0), 2.0}).value), 1e-13);
}

TEST(CircleIntegral, ErrorEstimateShrinksUnderDoubling) {
  // Trapezoid error for 1/(w - 0.99) on the unit circle decays like 0.99^N.
  auto g = [](Complex w) { return 1.0 / (w - 0.99); };
  ContourConfig cfg;
  cfg.nodes_initial = 16;
  cfg.tol_abs = 1e-300;
  cfg.tol_rel = 1e-300;
  std::vector<double> est;
  for (int d = 1; d <= 7; ++d) {
    cfg.max_doublings = d;
    const auto r = autorb::circle_integral(g, 1.0, cfg);
    EXPECT_EQ(r.nodes_used, 16 << d);
    est.push_back(r.est_error);
  }
  for (std::size_t i = 1; i < est.size(); ++i) EXPECT_LT(est[i], est[i - 1]) << "doubling " << i + 1;
}

TEST(CircleIntegral, NotConvergedIsReported) {
  auto g = [](Complex w) { return 1.0 / (w - 0.999999); };
  ContourConfig cfg;
  cfg.nodes_initial = 16;
  cfg.max_doublings = 2;
  EXPECT_FALSE(autorb::circle_integral(g, 1.0, cfg).converged);
}

TEST(CircleIntegral, VectorComponentsShareNodes) {
  auto g = [](Complex w, std::span<Complex> out) {
    out[0] = 1.0 / w;
    out[1] = w / (w - 0.5);
    out[2] = std::exp(w);
  };
  const auto r = autorb::circle_integral(g, 3, Circle{0.0, 1.0});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_LT(std::abs(r[0].value - 1.0), 1e-14);
  EXPECT_LT(std::abs(r[1].value - 0.5), 1e-14);
  EXPECT_LT(std::abs(r[2].value), 1e-14);
}

TEST(ContourConfig, RejectsBadNodeCounts) {
  ContourConfig cfg;
  cfg.nodes_initial = 100;
  EXPECT_THROW(cfg.validate(), autorb::Error);
  cfg.nodes_initial = 8;
  EXPECT_THROW(cfg.validate(), autorb::Error);
  cfg.nodes_initial = 64;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(SafeRadius, ExpKeepsRequestedRadius) {
  EXPECT_EQ(autorb::safe_radius(EntireFunction::exp(), 1.0, 10.0), 10.0);
}

TEST(SafeRadius, QuadraticMovesOffOrbitPoint) {
  const double r = autorb::safe_radius(EntireFunction::quadratic_zz(), 1.0, 2.0);
  EXPECT_NE(r, 2.0);
  EXPECT_LE(std::abs(r - 2.0), 0.05 * 2.0 + 1e-12);
}

TEST(SafeRadius, MonomialWholeOrbitOnCircle) {
  const double r = autorb::safe_radius(EntireFunction::monomial(4), 1.0, 1.0);
  EXPECT_NE(r, 1.0);
  EXPECT_LE(std::abs(r - 1.0), 0.05 + 1e-12);
}

TEST(SafeRadius, ChosenCircleAvoidsOracleOrbit) {
  oracle::Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    const Complex z = rng.disk(3.0);
    const double R = rng.uniform(5.0, 40.0);
    const double r = autorb::safe_radius(EntireFunction::exp(), z, R);
    for (const Complex& p : oracle::exp_orbit(z, 2.0 * R)) EXPECT_GT(std::abs(std::abs(p) - r), 1e-4);
  }
}

TEST(RadiusCandidates, StartAtPreferredAndStayInWindow) {
  const auto c = autorb::radius_candidates(10.0, 9.5, 10.5, 16);
  ASSERT_FALSE(c.empty());
  EXPECT_EQ(c.front(), 10.0);
  for (double r : c) {
    EXPECT_GE(r, 9.5);
    EXPECT_LE(r, 10.5);
  }
}
