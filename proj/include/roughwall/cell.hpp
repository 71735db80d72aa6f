#pragma once

/// Periodic cell problems on the truncated strip {0 < y1 < 2π, f(y1) < y2 < Y}:
///   -Δβ = 0, β = -y2 on the bottom,   -Δτ = 0, τ = -y2² on the bottom,
/// y1-periodic, homogeneous Neumann at y2 = Y. Above the interface both are
/// harmonic extensions Σ η_k e^{i k y1 - |k| y2} of their interface traces.

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "roughwall/fem.hpp"
#include "roughwall/geometry.hpp"
#include "roughwall/linalg.hpp"

namespace roughwall::cell {

using geom::RoughProfile;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CellResolution {
  int ppp = 16;
  int n2 = 8;
  double Y = 10.0;
};

/// Fourier coefficients η_k for k = 0..K_max of a real trace
/// t(y1) = Σ_{|k| ≤ K_max} η_k e^{i k y1}, with η_{-k} = conj(η_k).
class FourierTrace {
 public:
  FourierTrace() = default;
  explicit FourierTrace(std::vector<std::complex<double>> nonnegative);

  int k_max() const { return static_cast<int>(c_.size()) - 1; }
  std::complex<double> operator[](int k) const;
  const std::vector<std::complex<double>>& nonnegative() const { return c_; }

  /// Re Σ η_k e^{i k y1 - |k| y2}; DomainError for y2 < 0.
  double eval(Point y) const;
  /// Gradient of eval (y2 >= 0).
  Vec2 gradient(Point y) const;
  /// Re Σ i k η_k e^{-|k| y2} = ∂/∂y1 of the extension at y1 = 0.
  double dy1_at_origin(double y2) const;

 private:
  std::vector<std::complex<double>> c_;
};

/// Discrete Fourier average η_k = (1/N) Σ_j t_j e^{-i k y_j} of N uniform
/// samples y_j = 2π j / N, for k = 0..k_max.
FourierTrace extract_eta(const std::vector<double>& samples, int k_max);

double eval_beta_spectral(const FourierTrace& eta, Point y);

/// ‖β(·/ε) − β̄‖_{L²(Ω⁰)} from the Fourier coefficients (Parseval).
double oscillation_l2(const FourierTrace& eta, const geom::DomainSpec& spec);

struct CellField {
  fem::ScalarField field;
  double average = 0.0;  // mean of the interface trace
  FourierTrace eta;
};

/// Samples of ∂β/∂y1(0, y2) on the sublayer nodes of the y1 = 0 line.
struct NeumannTraceTable {
  std::vector<double> y2;  // increasing, from f(0) to 0
  std::vector<double> g;
};

struct CellSolution {
  RoughProfile profile;
  CellResolution resolution;
  std::shared_ptr<const geom::Mesh> mesh;
  CellField beta;
  std::optional<CellField> tau;
  NeumannTraceTable g_minus;

  double beta_bar() const { return beta.average; }
  double tau_bar() const;
};

std::shared_ptr<const geom::Mesh> make_cell_mesh(const RoughProfile& p, const CellResolution& res);

/// Harmonic cell field with bottom data `data(y)` on a prebuilt cell mesh.
CellField solve_cell_field(const std::shared_ptr<const geom::Mesh>& mesh, int ppp, int n2,
                           const fem::PointFunction& data, const linalg::CgOptions& cg);

CellField solve_beta(const RoughProfile& p, const CellResolution& res,
                     const linalg::CgOptions& cg = {});
CellField solve_tau(const RoughProfile& p, const CellResolution& res,
                    const linalg::CgOptions& cg = {});

/// β, τ and the Neumann trace table on one shared mesh.
CellSolution solve_cell(const RoughProfile& p, const CellResolution& res,
                        const linalg::CgOptions& cg = {}, bool with_tau = true);

/// Recovered ∂β/∂y1 at the nodes of y1 = 0 below the interface: area-weighted
/// average of the element gradients on both sides of the periodic seam.
NeumannTraceTable recover_g_minus(const fem::ScalarField& beta, int ppp, int n2);

/// g(y2) = ∂β/∂y1(0, y2): spectral above the interface, recovered below.
double neumann_trace_g(const CellSolution& sol, double y2);

enum class Evaluation { Spectral, CellMesh };

/// β(y) anywhere above the wall. Spectral mode uses the series for y2 >= 0;
/// CellMesh mode uses the P1 field wherever the truncated cell covers y.
/// Below the interface the P1 field is always used (y1 wrapped to the cell).
double beta_at(const CellSolution& sol, Point y, Evaluation mode = Evaluation::Spectral);
Vec2 beta_gradient_at(const CellSolution& sol, Point y, Evaluation mode = Evaluation::Spectral);
double tau_at(const CellSolution& sol, Point y, Evaluation mode = Evaluation::Spectral);
Vec2 tau_gradient_at(const CellSolution& sol, Point y, Evaluation mode = Evaluation::Spectral);

/// P1 value / gradient of a cell field at y, wrapping y1 periodically and
/// clamping points between the true wall and its piecewise-linear
/// approximation onto the mesh. OutOfDomain below the wall or above Y.
double eval_cell_mesh(const fem::ScalarField& field, const RoughProfile& p, Point y);
Vec2 eval_cell_mesh_gradient(const fem::ScalarField& field, const RoughProfile& p, Point y);

}  // namespace roughwall::cell
