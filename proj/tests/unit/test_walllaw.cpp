#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "roughwall/walllaw.hpp"

using namespace roughwall;
using namespace roughwall::walllaw;
using geom::kTwoPi;

namespace {

geom::RoughProfile asymmetric() { return {-0.5, {0.2}, {0.0, 0.1}}; }

linalg::CgOptions tight() {
  linalg::CgOptions o;
  o.tol = 1e-12;
  return o;
}

std::shared_ptr<const cell::CellSolution> default_cell() {
  static const auto c =
      std::make_shared<const cell::CellSolution>(cell::solve_cell(asymmetric(), {}, tight()));
  return c;
}

std::shared_ptr<const corrector::CorrectorSolution> default_xi(bool mirrored) {
  static const auto in = std::make_shared<const corrector::CorrectorSolution>(
      corrector::solve_xi(*default_cell(), asymmetric(), {}, tight()));
  static const auto out = std::make_shared<const corrector::CorrectorSolution>(
      corrector::solve_mirror_xi(*default_cell(), asymmetric(), {}, tight()));
  return mirrored ? out : in;
}

WallLawParams params_for(double eps, const cell::CellSolution& c) {
  return {eps, 1.0, kTwoPi, c.beta_bar(), c.tau_bar()};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(WallLaws, ClosedFormExamples) {
  const WallLawParams p{0.1, 1.0, kTwoPi, 0.5, -0.25};
  EXPECT_EQ(u0(p, {0.3, 0.0}), 0.0);
  EXPECT_EQ(u0(p, {0.3, 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(u0(p, {0.3, 0.5}), 0.125);
  EXPECT_NEAR(u1(p, {0.0, 0.0}), 0.05 / 2.1, 1e-15);
  EXPECT_NEAR(u1(p, {0.0, 0.0}), 0.0238095, 1e-7);
  EXPECT_NEAR(u2(p, {0.0, 0.0}), 0.025, 1e-15);
  for (double x2 : {0.0, 0.3, 0.8}) {
    EXPECT_NEAR(u0(p, {1.0, x2}), u0(p, {5.0, x2}), 0.0);
    EXPECT_NEAR(u1(p, {1.0, x2}), u1(p, {5.0, x2}), 0.0);
  }
  EXPECT_NEAR(u1(p, {0.0, 1.0}), 0.0, 1e-16);
  EXPECT_NEAR(u2(p, {0.0, 1.0}), 0.0, 1e-16);
}

TEST(WallLaws, ZeroEpsilonRecoversSmoothLaw) {
  const WallLawParams p{0.0, 2.0, kTwoPi, 0.47, -0.25};
  for (double x2 = 0.0; x2 <= 1.0; x2 += 0.125) {
    EXPECT_DOUBLE_EQ(u1(p, {0.0, x2}), u0(p, {0.0, x2}));
    EXPECT_DOUBLE_EQ(u2(p, {0.0, x2}), u0(p, {0.0, x2}));
  }
}

TEST(WallLaws, SecondOrderLawIsExactForFlatWall) {
  for (double c : {0.25, 0.5, 0.8}) {
    for (double eps : {0.2, 0.05}) {
      const WallLawParams p{eps, 1.3, kTwoPi, c, -c * c};
      for (double x2 = -eps * c; x2 <= 1.0; x2 += 0.05)
        EXPECT_NEAR(u2(p, {0.0, x2}), -0.65 * (x2 - 1.0) * (x2 + eps * c), 1e-15);
    }
  }
}

TEST(WallLaws, MixedConditionHolds) {
  for (double eps : {0.2, 0.1, 0.025})
    for (double bb : {0.1, 0.47, 0.9}) {
      const WallLawParams p{eps, 1.0, kTwoPi, bb, -0.2};
      EXPECT_LE(std::abs(u1(p, {0.0, 0.0}) - eps * bb * du1_dx2(p, 0.0)), 1e-14);
      EXPECT_DOUBLE_EQ(du1_dx2(p, 0.0), du1_dx2_wall(p));
      EXPECT_DOUBLE_EQ(du2_dx2(p, 0.0), du2_dx2_wall(p));
    }
}

TEST(WallLaws, DerivativesMatchDifferences) {
  const WallLawParams p{0.1, 1.7, kTwoPi, 0.47, -0.25};
  const double h = 1e-5;
  for (double x2 : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(du0_dx2(p, x2), (u0(p, {0, x2 + h}) - u0(p, {0, x2 - h})) / (2 * h), 1e-9);
    EXPECT_NEAR(du1_dx2(p, x2), (u1(p, {0, x2 + h}) - u1(p, {0, x2 - h})) / (2 * h), 1e-9);
    EXPECT_NEAR(du2_dx2(p, x2), (u2(p, {0, x2 + h}) - u2(p, {0, x2 - h})) / (2 * h), 1e-9);
    const double second = (u2(p, {0, x2 + h}) - 2 * u2(p, {0, x2}) + u2(p, {0, x2 - h})) / (h * h);
    EXPECT_NEAR(second, d2u2_dx2(p), 1e-4);
    const double second0 = (u0(p, {0, x2 + h}) - 2 * u0(p, {0, x2}) + u0(p, {0, x2 - h})) / (h * h);
    EXPECT_NEAR(-second0, p.C, 1e-4);
  }
}

TEST(WallLaws, VertexOfSecondOrderLaw) {
  double previous = 2.0;
  for (double eps : {0.05, 0.1, 0.2}) {
    const WallLawParams p{eps, 1.0, kTwoPi, 0.47, -0.25};
    const double vertex = (1.0 + eps * eps * p.tau_bar) / (2.0 * (1.0 + eps * p.beta_bar));
    EXPECT_NEAR(du2_dx2(p, vertex), 0.0, 1e-15);
    EXPECT_GT(u2(p, {0, vertex}), u2(p, {0, vertex + 1e-3}));
    EXPECT_GT(u2(p, {0, vertex}), u2(p, {0, vertex - 1e-3}));
    EXPECT_LT(vertex, previous);
    previous = vertex;
  }
}

TEST(WallLaws, DegenerateDenominator) {
  const WallLawParams p{0.5, 1.0, kTwoPi, -2.0, 0.0};
  EXPECT_THROW(u1(p, {0, 0.5}), DegenerateDenominator);
  EXPECT_THROW(u2(p, {0, 0.5}), DegenerateDenominator);
  EXPECT_THROW(ApproxField(p, Order::First, Mode::Averaged), DegenerateDenominator);
}

TEST(WallLaws, ConsistencyChainIsFirstOrder) {
  std::vector<double> eps{0.2, 0.1, 0.05}, d21, d10;
  for (double e : eps) {
    const WallLawParams p{e, 1.0, kTwoPi, 0.47, -0.25};
    double a = 0, b = 0;
    for (double x2 = 0.0; x2 <= 1.0; x2 += 1.0 / 64) {
      a = std::max(a, std::abs(u2(p, {0, x2}) - u1(p, {0, x2})));
      b = std::max(b, std::abs(u1(p, {0, x2}) - u0(p, {0, x2})));
    }
    d21.push_back(a);
    d10.push_back(b);
  }
  EXPECT_GE(fit_slope(eps, d21), 0.9);
  EXPECT_GE(fit_slope(eps, d10), 0.9);
}

TEST(Extension, ContinuousAndVanishingAtTop) {
  const auto prof = asymmetric();
  const WallLawParams p{0.1, 1.0, kTwoPi, 0.47, -0.25};
  EXPECT_NEAR(u1_extended(p, prof, {0.3, 1.0}), 0.0, 1e-16);
  const double h = 1e-9;
  EXPECT_NEAR(u1_extended(p, prof, {0.3, -h}), u1_extended(p, prof, {0.3, h}), 1e-8);
  EXPECT_DOUBLE_EQ(u1_extended(p, prof, {0.3, 0.4}), u1(p, {0.3, 0.4}));
  // Wall at x1 = 0 sits at ε f(0) = -0.03.
  EXPECT_THROW(u1_extended(p, prof, {0.0, -0.031}), OutOfDomain);
  EXPECT_NO_THROW(u1_extended(p, prof, {0.0, -0.03}));
}

TEST(Composite, FirstOrderVanishesOnRoughWall) {
  const auto c = default_cell();
  for (auto source : {cell::Evaluation::Spectral, cell::Evaluation::CellMesh}) {
    for (double eps : {0.2, 0.1}) {
      const ApproxField a(params_for(eps, *c), Order::First, Mode::FullPeriodic, c, nullptr, nullptr,
                          source);
      for (int j = 0; j < 16 * 3; ++j) {
        const double y1 = kTwoPi * j / 16;
        const Point x{eps * y1, eps * c->profile(y1)};
        EXPECT_NEAR(a.value(x), 0.0, 1e-10) << "y1 = " << y1;
      }
    }
  }
}

TEST(Composite, FlatWallReducesToSmoothLaw) {
  const auto flat = geom::RoughProfile::flat(-0.5);
  const auto c = std::make_shared<const cell::CellSolution>(cell::solve_cell(flat, {}, tight()));
  const auto xi = std::make_shared<const corrector::CorrectorSolution>(
      corrector::solve_xi(*c, flat, {}, tight()));
  const auto xo = std::make_shared<const corrector::CorrectorSolution>(
      corrector::solve_mirror_xi(*c, flat, {}, tight()));
  const auto p = params_for(0.1, *c);
  const ApproxField per(p, Order::First, Mode::FullPeriodic, c);
  const ApproxField neu(p, Order::First, Mode::FullNeumann, c, xi, xo);
  const ApproxField sec(p, Order::Second, Mode::FullPeriodic, c);
  for (const Point x : {Point{0.01, 0.02}, Point{1.3, 0.5}, Point{6.2, -0.04}}) {
    EXPECT_NEAR(per.value(x), u1_extended(p, flat, x), 1e-9);
    EXPECT_NEAR(neu.value(x), u1_extended(p, flat, x), 1e-9);
    if (x.y >= 0.0) EXPECT_NEAR(sec.value(x), u2(p, x), 1e-9);
  }
}

TEST(Composite, PeriodicTailAtTopWall) {
  const auto c = default_cell();
  const auto& eta = c->beta.eta;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const auto p = params_for(eps, *c);
    const ApproxField a(p, Order::First, Mode::FullPeriodic, c);
    double bound = 0.0;
    for (int k = 1; k <= eta.k_max(); ++k) bound += 2.0 * std::abs(eta[k]) * std::exp(-k / eps);
    bound *= eps * du1_dx2_wall(p);
    double worst = 0.0;
    for (int j = 0; j < 64; ++j) {
      const Point x{kTwoPi * j / 64, 1.0};
      worst = std::max(worst, std::abs(a.value(x) - u1(p, x)));
    }
    EXPECT_LE(worst, bound * (1.0 + 1e-9) + 1e-15);
    if (eps <= 0.05) EXPECT_LE(worst, 1e-8);
  }
}

TEST(Composite, NeumannUnfoldsCorrectors) {
  const auto c = default_cell();
  const auto p = params_for(0.1, *c);
  const ApproxField per(p, Order::First, Mode::FullPeriodic, c);
  const ApproxField neu(p, Order::First, Mode::FullNeumann, c, default_xi(false), default_xi(true));
  const Point x{0.0, 0.5};
  const double xi_term = p.epsilon * du1_dx2_wall(p) * corrector::eval_xi(*default_xi(false), {0.0, 5.0});
  EXPECT_NE(xi_term, 0.0);
  EXPECT_NEAR(per.value(x) - neu.value(x), xi_term, 1e-14);
  // Outlet corrector enters at x1 = L through (x1 - L)/ε.
  const Point out{kTwoPi - 0.05, 0.3};
  const double xo = corrector::eval_xi(*default_xi(true), {-0.5, 3.0});
  const double xin = corrector::eval_xi(*default_xi(false), {out.x / 0.1, 3.0});
  EXPECT_NE(xo, 0.0);
  EXPECT_NEAR(per.value(out) - neu.value(out), p.epsilon * du1_dx2_wall(p) * (xo + xin), 1e-12);
  // Far from inlet and outlet both correctors are switched off.
  const auto q = params_for(0.025, *c);
  const ApproxField per_q(q, Order::First, Mode::FullPeriodic, c);
  const ApproxField neu_q(q, Order::First, Mode::FullNeumann, c, default_xi(false), default_xi(true));
  for (const Point y : {Point{3.0, 0.01}, Point{3.3, 0.4}}) {
    EXPECT_EQ(per_q.value(y), neu_q.value(y));
    EXPECT_EQ(per_q.gradient(y).y, neu_q.gradient(y).y);
  }
}

TEST(Composite, GradientMatchesDifferences) {
  const auto c = default_cell();
  const auto p = params_for(0.1, *c);
  const ApproxField first(p, Order::First, Mode::FullPeriodic, c);
  const ApproxField second(p, Order::Second, Mode::FullPeriodic, c);
  const double h = 1e-7;
  for (const Point x : {Point{0.33, 0.2}, Point{2.1, 0.55}}) {
    for (const ApproxField* a : {&first, &second}) {
      const Vec2 g = a->gradient(x);
      EXPECT_NEAR(g.x, (a->value({x.x + h, x.y}) - a->value({x.x - h, x.y})) / (2 * h), 1e-6);
      EXPECT_NEAR(g.y, (a->value({x.x, x.y + h}) - a->value({x.x, x.y - h})) / (2 * h), 1e-6);
    }
  }
}

TEST(Composite, ConstructorRequirements) {
  const auto c = default_cell();
  const auto p = params_for(0.1, *c);
  EXPECT_THROW(ApproxField(p, Order::First, Mode::FullNeumann, c), MissingCorrector);
  EXPECT_THROW(ApproxField(p, Order::First, Mode::FullNeumann, c, default_xi(false)), MissingCorrector);
  EXPECT_THROW(ApproxField(p, Order::First, Mode::FullPeriodic), std::invalid_argument);
  EXPECT_THROW(ApproxField(p, Order::Zeroth, Mode::FullPeriodic, c), std::invalid_argument);
  EXPECT_THROW(ApproxField(p, Order::Second, Mode::FullNeumann, c, default_xi(false), default_xi(true)),
               std::invalid_argument);
  const ApproxField avg(p, Order::Second, Mode::Averaged);
  EXPECT_EQ(avg.value({1.0, 0.4}), u2(p, {1.0, 0.4}));
  EXPECT_EQ(full_bl(avg, {1.0, 0.4}), avg.value({1.0, 0.4}));
}
