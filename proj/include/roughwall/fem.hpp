#pragma once

/// P1 finite elements on geometry meshes: assembly of -Δu = source, boundary
/// constraints, nodal fields and error norms over mesh blocks.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "roughwall/geometry.hpp"
#include "roughwall/linalg.hpp"

namespace roughwall::fem {

using geom::BoundaryTag;
using geom::Mesh;

/// A vertex received two different Dirichlet values.
class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Omega0 = upper block (x2 > 0), Sublayer = lower block, Full = both.
enum class Region { Full, Omega0, Sublayer };
enum class NormKind { L2, H1Semi };

using PointFunction = std::function<double(Point)>;
using GradientFunction = std::function<Vec2(Point)>;

struct Constraints {
  std::vector<int> dof_of_vertex;       // -1 for Dirichlet vertices
  std::vector<double> vertex_value;     // Dirichlet value (0 where free)
  int dof_count = 0;
  bool has_dirichlet = false;
};

struct LinearSystem {
  std::shared_ptr<const Mesh> mesh;
  linalg::SparseMatrix A;
  std::vector<double> b;
  std::optional<Constraints> constraints;  // set by apply_bc; A, b are then reduced
};

struct DirichletBC {
  BoundaryTag tag;
  PointFunction value;
};

/// flux = outward normal derivative ∂u/∂n on the tagged edges.
struct NeumannBC {
  BoundaryTag tag;
  PointFunction flux;
};

/// Element stiffness of one triangle (counterclockwise vertices).
std::array<std::array<double, 3>, 3> element_stiffness(Point a, Point b, Point c);

bool in_region(geom::Block block, Region region);

LinearSystem assemble(std::shared_ptr<const Mesh> mesh, double source,
                      Region source_region = Region::Full);

/// Dirichlet by symmetric elimination, Neumann by 2-point Gauss per edge,
/// periodic pairs merged into masters. Dirichlet beats Neumann at shared
/// vertices.
LinearSystem apply_bc(const LinearSystem& sys, const std::vector<DirichletBC>& dirichlet,
                      const std::vector<NeumannBC>& neumann, bool periodic);

class ScalarField {
 public:
  ScalarField(std::shared_ptr<const Mesh> mesh, std::vector<double> values);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int v) const { return values_[static_cast<std::size_t>(v)]; }

  /// Barycentric interpolation; throws OutOfDomain outside the mesh.
  double interpolate(Point p) const;
  std::optional<double> try_interpolate(Point p, double tol = 1e-12) const;
  /// Constant gradient on triangle t.
  Vec2 gradient(int t) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<double> values_;
};

/// Solves a constrained system; throws linalg::BreakdownError when no
/// Dirichlet condition pins the solution (pure Neumann problem).
ScalarField solve(const LinearSystem& sys, const linalg::CgOptions& options = {});

/// Three-point interior quadrature rule on the reference triangle (weights 1/3).
inline constexpr std::array<std::array<double, 2>, 3> kQuadrature{
    {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0}}};

/// ∫ fn over the region.
double integrate(const Mesh& mesh, Region region, const PointFunction& fn);
/// Area of the region.
double region_area(const Mesh& mesh, Region region);

double l2_norm(const Mesh& mesh, Region region, const PointFunction& fn);
/// ‖field − fn‖_L2(region); pass nullptr-like empty fn for ‖field‖.
double l2_error(const ScalarField& field, Region region, const PointFunction& fn);
/// ‖∇field − grad‖_L2(region).
double h1_semi_error(const ScalarField& field, Region region, const GradientFunction& grad);
double norm_on_region(const ScalarField& field, Region region, NormKind kind);

}  // namespace roughwall::fem
