#include "roughwall/walllaw.hpp"

#include <cmath>
#include <sstream>

namespace roughwall::walllaw {

namespace {

double denominator(const WallLawParams& p) {
  const double d = 1.0 + p.epsilon * p.beta_bar;
  if (!(d > 1e-12)) {
    std::ostringstream os;
    os << "wall law: 1 + ε β̄ = " << d << " is not positive";
    throw DegenerateDenominator(os.str());
  }
  return d;
}

}  // namespace

double u0(const WallLawParams& p, Point x) { return 0.5 * p.C * x.y * (1.0 - x.y); }

double u1(const WallLawParams& p, Point x) {
  const double d = denominator(p);
  const double x2 = x.y;
  return -0.5 * p.C * (x2 * x2 - x2 / d - p.epsilon * p.beta_bar / d);
}

double u2(const WallLawParams& p, Point x) {
  const double d = denominator(p);
  const double e = p.epsilon;
  const double x2 = x.y;
  return -0.5 * p.C *
         (x2 * x2 - x2 * (1.0 + e * e * p.tau_bar) / d - e * (p.beta_bar - e * p.tau_bar) / d);
}

double du1_dx2_wall(const WallLawParams& p) { return 0.5 * p.C / denominator(p); }

double du2_dx2_wall(const WallLawParams& p) {
  return 0.5 * p.C * (1.0 + p.epsilon * p.epsilon * p.tau_bar) / denominator(p);
}

double d2u2_dx2(const WallLawParams& p) { return -p.C; }

double du0_dx2(const WallLawParams& p, double x2) { return 0.5 * p.C * (1.0 - 2.0 * x2); }

double du1_dx2(const WallLawParams& p, double x2) {
  return -0.5 * p.C * (2.0 * x2 - 1.0 / denominator(p));
}

double du2_dx2(const WallLawParams& p, double x2) {
  return -0.5 * p.C * (2.0 * x2 - (1.0 + p.epsilon * p.epsilon * p.tau_bar) / denominator(p));
}

namespace {

double u1_ext_unchecked(const WallLawParams& p, Point x) {
  if (x.y >= 0.0) return u1(p, x);
  return du1_dx2_wall(p) * (x.y + p.epsilon * p.beta_bar);
}

double du1_ext_dx2(const WallLawParams& p, double x2) {
  return x2 >= 0.0 ? du1_dx2(p, x2) : du1_dx2_wall(p);
}

}  // namespace

double u1_extended(const WallLawParams& p, const geom::RoughProfile& profile, Point x) {
  const double wall = p.epsilon * profile(x.x / p.epsilon);
  if (x.y < wall - 1e-12) {
    std::ostringstream os;
    os << "u1_extended: (" << x.x << ", " << x.y << ") lies below the rough wall";
    throw OutOfDomain(os.str());
  }
  return u1_ext_unchecked(p, x);
}

ApproxField::ApproxField(WallLawParams params, Order order, Mode mode,
                         std::shared_ptr<const cell::CellSolution> cell,
                         std::shared_ptr<const corrector::CorrectorSolution> xi_in,
                         std::shared_ptr<const corrector::CorrectorSolution> xi_out,
                         cell::Evaluation source)
    : params_(params),
      order_(order),
      mode_(mode),
      cell_(std::move(cell)),
      xi_in_(std::move(xi_in)),
      xi_out_(std::move(xi_out)),
      source_(source) {
  denominator(params_);
  if (mode_ != Mode::Averaged) {
    if (!cell_) throw std::invalid_argument("ApproxField: composite modes need the cell solution");
    if (order_ == Order::Zeroth) throw std::invalid_argument("ApproxField: no zeroth-order composite");
  }
  if (mode_ == Mode::FullNeumann) {
    if (!xi_in_ || !xi_out_) throw MissingCorrector("ApproxField: Neumann composite needs ξ_in and ξ_out");
    if (order_ != Order::First) {
      throw std::invalid_argument("ApproxField: Neumann composite is first order only");
    }
  }
  if (order_ == Order::Second && mode_ == Mode::FullPeriodic && !cell_->tau) {
    throw std::invalid_argument("ApproxField: second-order composite needs τ");
  }
}

double ApproxField::correctors(Point y) const {
  if (mode_ != Mode::FullNeumann) return 0.0;
  const double L = params_.L / params_.epsilon;
  return corrector::eval_xi(*xi_in_, y) + corrector::eval_xi(*xi_out_, {y.x - L, y.y});
}

Vec2 ApproxField::corrector_gradient(Point y) const {
  if (mode_ != Mode::FullNeumann) return {};
  const double L = params_.L / params_.epsilon;
  return corrector::eval_xi_gradient(*xi_in_, y) +
         corrector::eval_xi_gradient(*xi_out_, {y.x - L, y.y});
}

double ApproxField::oscillation(Point x) const {
  if (mode_ == Mode::Averaged) return 0.0;
  const Point y{x.x / params_.epsilon, x.y / params_.epsilon};
  return cell::beta_at(*cell_, y, source_) - cell_->beta_bar() - correctors(y);
}

double ApproxField::value(Point x) const {
  const WallLawParams& p = params_;
  if (mode_ == Mode::Averaged) {
    switch (order_) {
      case Order::Zeroth: return u0(p, x);
      case Order::First: return u1_ext_unchecked(p, x);
      case Order::Second: return u2(p, x);
    }
  }
  const double e = p.epsilon;
  const Point y{x.x / e, x.y / e};
  if (order_ == Order::First) {
    return u1_ext_unchecked(p, x) + e * du1_dx2_wall(p) * oscillation(x);
  }
  const double beta = cell::beta_at(*cell_, y, source_);
  const double tau = cell::tau_at(*cell_, y, source_);
  return u2(p, x) + e * du2_dx2_wall(p) * (beta - cell_->beta_bar()) +
         0.5 * e * e * d2u2_dx2(p) * (tau - cell_->tau_bar());
}

Vec2 ApproxField::gradient(Point x) const {
  const WallLawParams& p = params_;
  if (mode_ == Mode::Averaged) {
    switch (order_) {
      case Order::Zeroth: return {0.0, du0_dx2(p, x.y)};
      case Order::First: return {0.0, du1_ext_dx2(p, x.y)};
      case Order::Second: return {0.0, du2_dx2(p, x.y)};
    }
  }
  const double e = p.epsilon;
  const Point y{x.x / e, x.y / e};
  // d/dx of g(x/ε) is ε⁻¹ ∇_y g, which cancels the ε prefactor.
  if (order_ == Order::First) {
    const Vec2 osc = cell::beta_gradient_at(*cell_, y, source_) - corrector_gradient(y);
    return Vec2{0.0, du1_ext_dx2(p, x.y)} + du1_dx2_wall(p) * osc;
  }
  return Vec2{0.0, du2_dx2(p, x.y)} + du2_dx2_wall(p) * cell::beta_gradient_at(*cell_, y, source_) +
         (0.5 * e * d2u2_dx2(p)) * cell::tau_gradient_at(*cell_, y, source_);
}

double full_bl(const ApproxField& approx, Point x) { return approx.value(x); }

}  // namespace roughwall::walllaw
