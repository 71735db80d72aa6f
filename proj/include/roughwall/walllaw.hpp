#pragma once

/// Averaged wall laws on the smooth channel 0 < x2 < 1 and the composite
/// (full boundary layer) approximations on the rough channel.
///
///   u0 = (C/2) x2 (1 - x2)
///   u1 = -(C/2) (x2² - x2/(1+εβ̄) - εβ̄/(1+εβ̄))                 u1 = εβ̄ ∂u1/∂x2 at x2 = 0
///   u2 = -(C/2) (x2² - x2(1+ε²τ̄)/(1+εβ̄) - ε(β̄-ετ̄)/(1+εβ̄))
///
/// Composites add ε-scaled cell oscillations, β(x/ε) - β̄ (and τ(x/ε) - τ̄),
/// and in the inlet/outlet case the vertical correctors ξ_in, ξ_out.

#include <memory>
#include <stdexcept>

#include "roughwall/cell.hpp"
#include "roughwall/corrector.hpp"
#include "roughwall/geometry.hpp"

namespace roughwall::walllaw {

class DegenerateDenominator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class MissingCorrector : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct WallLawParams {
  double epsilon = 0.1;
  double C = 1.0;
  double L = geom::kTwoPi;
  double beta_bar = 0.0;
  double tau_bar = 0.0;
};

double u0(const WallLawParams& p, Point x);
double u1(const WallLawParams& p, Point x);
double u2(const WallLawParams& p, Point x);

/// ∂u1/∂x2(x1, 0) = (C/2) / (1 + εβ̄).
double du1_dx2_wall(const WallLawParams& p);
/// ∂u2/∂x2(x1, 0) = (C/2)(1 + ε²τ̄) / (1 + εβ̄).
double du2_dx2_wall(const WallLawParams& p);
/// ∂²u2/∂x2² = -C.
double d2u2_dx2(const WallLawParams& p);

double du0_dx2(const WallLawParams& p, double x2);
double du1_dx2(const WallLawParams& p, double x2);
double du2_dx2(const WallLawParams& p, double x2);

/// u1 on the whole rough channel: the closed form above x2 = 0 and its C¹
/// linear continuation (C/2)(x2 + εβ̄)/(1 + εβ̄) in the sublayer, chosen so
/// that the first-order composite vanishes on the rough wall.
/// OutOfDomain below x2 = ε f(x1/ε).
double u1_extended(const WallLawParams& p, const geom::RoughProfile& profile, Point x);

enum class Order { Zeroth, First, Second };
enum class Mode { Averaged, FullPeriodic, FullNeumann };

class ApproxField {
 public:
  ApproxField(WallLawParams params, Order order, Mode mode,
              std::shared_ptr<const cell::CellSolution> cell = nullptr,
              std::shared_ptr<const corrector::CorrectorSolution> xi_in = nullptr,
              std::shared_ptr<const corrector::CorrectorSolution> xi_out = nullptr,
              cell::Evaluation source = cell::Evaluation::Spectral);

  const WallLawParams& params() const { return params_; }
  Order order() const { return order_; }
  Mode mode() const { return mode_; }

  double value(Point x) const;
  Vec2 gradient(Point x) const;

  /// β(x/ε) - β̄ - ξ_in - ξ_out (the last two only in FullNeumann mode).
  double oscillation(Point x) const;

 private:
  double correctors(Point y) const;
  Vec2 corrector_gradient(Point y) const;

  WallLawParams params_;
  Order order_;
  Mode mode_;
  std::shared_ptr<const cell::CellSolution> cell_;
  std::shared_ptr<const corrector::CorrectorSolution> xi_in_;
  std::shared_ptr<const corrector::CorrectorSolution> xi_out_;
  cell::Evaluation source_;
};

double full_bl(const ApproxField& approx, Point x);

}  // namespace roughwall::walllaw
