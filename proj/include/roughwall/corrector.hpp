#pragma once

/// Vertical corrector on the rough quarter-plane Π = {y1 > 0, y2 > f(y1)}:
///   -Δξ = 0 in Π,  ∂ξ/∂y1(0, y2) = ∂β/∂y1(0, y2) on E,  ξ = 0 on B,
/// truncated at n_periods roughness periods and height Y with ξ = 0 there.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "roughwall/cell.hpp"
#include "roughwall/fem.hpp"
#include "roughwall/geometry.hpp"

namespace roughwall::corrector {

class InsufficientDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weights of the decay estimates; alpha0 = √2/π.
struct DecayParameters {
  double alpha = 0.4;
  double M = 4.9;
  static constexpr double alpha0 = 0.45015815807855303;

  void validate() const;
  /// -(1 - 1/(2M)): pointwise decay exponent in ρ.
  double radial_bound() const { return -(1.0 - 1.0 / (2.0 * M)); }
  /// -(1 + 2α): decay exponent of ∫|∂ξ/∂y1|² dy1 in y2.
  double line_bound() const { return -(1.0 + 2.0 * alpha); }
};

struct QuarterResolution {
  int n_periods = 10;
  double Y = 20.0;
  int ppp = 16;
  int n2 = 8;
};

struct CorrectorSolution {
  std::shared_ptr<const geom::Mesh> mesh;
  fem::ScalarField xi;
  QuarterResolution truncation;
  /// true: the field is stored on the mirrored quarter-plane and evaluated at
  /// (-y1, y2), i.e. it lives on {y1 < 0}.
  bool mirrored = false;
};

using TraceFunction = std::function<double(double)>;

/// Quarter-plane solve with arbitrary Neumann data ∂ξ/∂y1(0, y2) = g(y2).
CorrectorSolution solve_xi_with_data(const geom::RoughProfile& p, const QuarterResolution& res,
                                     const TraceFunction& g, const linalg::CgOptions& cg = {});

/// ξ with g = neumann_trace_g(cell, ·).
CorrectorSolution solve_xi(const cell::CellSolution& cell, const geom::RoughProfile& p,
                           const QuarterResolution& res, const linalg::CgOptions& cg = {});

/// ξ̃ on {y1 < 0} (outlet corrector), obtained from the profile s -> f(-s) and
/// data -g, then reflected.
CorrectorSolution solve_mirror_xi(const cell::CellSolution& cell, const geom::RoughProfile& p,
                                  const QuarterResolution& res, const linalg::CgOptions& cg = {});

/// Interpolated ξ(y); zero outside the truncated domain.
double eval_xi(const CorrectorSolution& sol, Point y);
Vec2 eval_xi_gradient(const CorrectorSolution& sol, Point y);

/// ‖ξ‖ in H¹ (L² and gradient parts) over the truncated domain.
double h1_norm(const CorrectorSolution& sol);
/// ‖ξ‖_{L²} over the box [0, y1_max] x [wall, y2_max].
double l2_norm_on_box(const CorrectorSolution& sol, double y1_max, double y2_max);

struct ShellSample {
  double rho;
  double max_abs_xi;
};

struct LineSample {
  double y2;
  double int_dxi2;  // ∫ |∂ξ/∂y1|² dy1
};

struct DecayReport {
  std::vector<ShellSample> shells;
  std::vector<LineSample> lines;
  double radial_exponent = 0.0;
  double radial_r2 = 0.0;
  double line_exponent = 0.0;
  double line_r2 = 0.0;
};

inline constexpr double kShellRadii[] = {2.0, 4.0, 8.0, 16.0};
inline constexpr double kLineHeights[] = {2.0, 4.0, 8.0};
/// Below this nodal maximum ξ counts as identically zero (solver noise).
inline constexpr double kNoDecayThreshold = 1e-10;

/// Shell maxima of |ξ| for ρ = √(y1² + (y2+1)²) in [ρ_s/√2, ρ_s√2) and line
/// integrals of |∂ξ/∂y1|², each fitted by a log-log least-squares line.
/// Shells reaching the outer 20% of the domain are dropped. Returns nullopt
/// when ξ vanishes up to kNoDecayThreshold (nothing to fit); throws InsufficientDomain if
/// fewer than three shells remain.
std::optional<DecayReport> decay_report(const CorrectorSolution& sol, const DecayParameters& params);

/// ∫ |∂ξ/∂y1|² dy1 along the horizontal line y2 = c across the domain.
double line_integral_dxi2(const CorrectorSolution& sol, double c);

}  // namespace roughwall::corrector
