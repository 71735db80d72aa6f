#include "roughwall/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roughwall::fem {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct TriangleGeometry {
  std::array<Point, 3> p;
  double area;
  std::array<double, 3> bx;  // ∂φ_i/∂x = bx[i] / (2 area)
  std::array<double, 3> by;
};

TriangleGeometry triangle_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[idx(t)];
  TriangleGeometry g;
  for (int k = 0; k < 3; ++k) g.p[idx(k)] = mesh.vertices()[idx(tri[idx(k)])];
  for (int k = 0; k < 3; ++k) {
    const Point& q1 = g.p[idx((k + 1) % 3)];
    const Point& q2 = g.p[idx((k + 2) % 3)];
    g.bx[idx(k)] = q1.y - q2.y;
    g.by[idx(k)] = q2.x - q1.x;
  }
  g.area = 0.5 * ((g.p[1].x - g.p[0].x) * (g.p[2].y - g.p[0].y) -
                  (g.p[2].x - g.p[0].x) * (g.p[1].y - g.p[0].y));
  return g;
}

Point map_reference(const TriangleGeometry& g, double s, double t) {
  return (1.0 - s - t) * g.p[0] + s * g.p[1] + t * g.p[2];
}

}  // namespace

std::array<std::array<double, 3>, 3> element_stiffness(Point a, Point b, Point c) {
  const std::array<Point, 3> p{a, b, c};
  std::array<double, 3> bx{};
  std::array<double, 3> by{};
  for (int k = 0; k < 3; ++k) {
    const Point& q1 = p[idx((k + 1) % 3)];
    const Point& q2 = p[idx((k + 2) % 3)];
    bx[idx(k)] = q1.y - q2.y;
    by[idx(k)] = q2.x - q1.x;
  }
  const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  std::array<std::array<double, 3>, 3> K{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      K[idx(i)][idx(j)] = (bx[idx(i)] * bx[idx(j)] + by[idx(i)] * by[idx(j)]) / (4.0 * area);
    }
  }
  return K;
}

bool in_region(geom::Block block, Region region) {
  switch (region) {
    case Region::Full: return true;
    case Region::Omega0: return block == geom::Block::Upper;
    case Region::Sublayer: return block == geom::Block::Lower;
  }
  return false;
}

LinearSystem assemble(std::shared_ptr<const Mesh> mesh, double source, Region source_region) {
  if (!mesh) throw std::invalid_argument("assemble: null mesh");
  const int n = mesh->vertex_count();
  std::vector<linalg::Triplet> triplets;
  triplets.reserve(idx(9 * mesh->triangle_count()));
  std::vector<double> b(idx(n), 0.0);
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const auto& tri = mesh->triangles()[idx(t)];
    const TriangleGeometry g = triangle_geometry(*mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double k = (g.bx[idx(i)] * g.bx[idx(j)] + g.by[idx(i)] * g.by[idx(j)]) / (4.0 * g.area);
        triplets.push_back({tri[idx(i)], tri[idx(j)], k});
      }
    }
    if (source != 0.0 && in_region(mesh->blocks()[idx(t)], source_region)) {
      for (int v : tri) b[idx(v)] += source * g.area / 3.0;
    }
  }
  LinearSystem sys;
  sys.A = linalg::SparseMatrix::from_triplets(n, std::move(triplets));
  sys.b = std::move(b);
  sys.mesh = std::move(mesh);
  return sys;
}

LinearSystem apply_bc(const LinearSystem& sys, const std::vector<DirichletBC>& dirichlet,
                      const std::vector<NeumannBC>& neumann, bool periodic) {
  if (sys.constraints) throw std::logic_error("apply_bc: constraints already applied");
  const Mesh& mesh = *sys.mesh;
  const int n = mesh.vertex_count();

  // Periodic representative of each vertex.
  std::vector<int> rep(idx(n));
  for (int v = 0; v < n; ++v) rep[idx(v)] = v;
  if (periodic) {
    if (mesh.periodic_pairs().empty()) throw std::invalid_argument("apply_bc: mesh has no periodic pairs");
    for (const auto& pp : mesh.periodic_pairs()) rep[idx(pp.slave)] = pp.master;
  }

  // Dirichlet values on representatives.
  std::vector<std::optional<double>> fixed(idx(n));
  for (const auto& bc : dirichlet) {
    for (int v : mesh.tagged_vertices(bc.tag)) {
      const double value = bc.value ? bc.value(mesh.vertices()[idx(v)]) : 0.0;
      auto& slot = fixed[idx(rep[idx(v)])];
      if (slot && std::abs(*slot - value) > 1e-12) {
        std::ostringstream os;
        os << "apply_bc: vertex " << v << " gets Dirichlet values " << *slot << " and " << value;
        throw ConflictError(os.str());
      }
      slot = value;
    }
  }

  Constraints c;
  c.dof_of_vertex.assign(idx(n), -1);
  c.vertex_value.assign(idx(n), 0.0);
  std::vector<int> rep_dof(idx(n), -1);
  for (int v = 0; v < n; ++v) {
    if (rep[idx(v)] != v) continue;
    if (fixed[idx(v)]) {
      c.has_dirichlet = true;
    } else {
      rep_dof[idx(v)] = c.dof_count++;
    }
  }
  for (int v = 0; v < n; ++v) {
    const int r = rep[idx(v)];
    c.dof_of_vertex[idx(v)] = rep_dof[idx(r)];
    if (fixed[idx(r)]) c.vertex_value[idx(v)] = *fixed[idx(r)];
  }

  // Full load including Neumann fluxes.
  std::vector<double> load = sys.b;
  const double gp = 0.5 / std::sqrt(3.0);
  for (const auto& bc : neumann) {
    if (!bc.flux) continue;
    for (const auto& e : mesh.boundary_edges()) {
      if (e.tag != bc.tag) continue;
      const Point a = mesh.vertices()[idx(e.v[0])];
      const Point b = mesh.vertices()[idx(e.v[1])];
      const Vec2 d = b - a;
      const double len = std::sqrt(dot(d, d));
      for (double s : {0.5 - gp, 0.5 + gp}) {
        const double g = bc.flux(a + s * d);
        load[idx(e.v[0])] += 0.5 * len * g * (1.0 - s);
        load[idx(e.v[1])] += 0.5 * len * g * s;
      }
    }
  }

  LinearSystem out;
  out.mesh = sys.mesh;
  out.b.assign(idx(c.dof_count), 0.0);
  std::vector<linalg::Triplet> triplets;
  triplets.reserve(idx(sys.A.nonzeros()));
  const auto& ro = sys.A.row_offsets();
  const auto& ci = sys.A.col_indices();
  const auto& va = sys.A.values();
  for (int i = 0; i < n; ++i) {
    const int di = c.dof_of_vertex[idx(i)];
    if (di < 0) continue;
    out.b[idx(di)] += load[idx(i)];
    for (int k = ro[idx(i)]; k < ro[idx(i) + 1]; ++k) {
      const int j = ci[idx(k)];
      const int dj = c.dof_of_vertex[idx(j)];
      if (dj >= 0) {
        triplets.push_back({di, dj, va[idx(k)]});
      } else {
        out.b[idx(di)] -= va[idx(k)] * c.vertex_value[idx(j)];
      }
    }
  }
  out.A = linalg::SparseMatrix::from_triplets(c.dof_count, std::move(triplets));
  out.constraints = std::move(c);
  return out;
}

ScalarField::ScalarField(std::shared_ptr<const Mesh> mesh, std::vector<double> values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_) throw std::invalid_argument("ScalarField: null mesh");
  if (static_cast<int>(values_.size()) != mesh_->vertex_count()) {
    throw std::invalid_argument("ScalarField: one value per vertex required");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ScalarField: non-finite value");
  }
}

std::optional<double> ScalarField::try_interpolate(Point p, double tol) const {
  const auto loc = mesh_->locate(p, tol);
  if (!loc) return std::nullopt;
  const auto& tri = mesh_->triangles()[idx(loc->triangle)];
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += loc->bary[idx(k)] * values_[idx(tri[idx(k)])];
  return s;
}

double ScalarField::interpolate(Point p) const {
  if (auto v = try_interpolate(p)) return *v;
  std::ostringstream os;
  os << "interpolate: point (" << p.x << ", " << p.y << ") outside the mesh";
  throw OutOfDomain(os.str());
}

Vec2 ScalarField::gradient(int t) const {
  const TriangleGeometry g = triangle_geometry(*mesh_, t);
  const auto& tri = mesh_->triangles()[idx(t)];
  Vec2 grad;
  for (int k = 0; k < 3; ++k) {
    grad.x += g.bx[idx(k)] * values_[idx(tri[idx(k)])];
    grad.y += g.by[idx(k)] * values_[idx(tri[idx(k)])];
  }
  return (0.5 / g.area) * grad;
}

ScalarField solve(const LinearSystem& sys, const linalg::CgOptions& options) {
  if (!sys.constraints) throw std::logic_error("solve: apply_bc first");
  const Constraints& c = *sys.constraints;
  if (!c.has_dirichlet) {
    throw linalg::BreakdownError("solve: no Dirichlet condition, operator is singular");
  }
  const linalg::CgResult res = linalg::cg_solve(sys.A, sys.b, options);
  std::vector<double> values(c.vertex_value);
  for (std::size_t v = 0; v < values.size(); ++v) {
    const int d = c.dof_of_vertex[v];
    if (d >= 0) values[v] = res.x[idx(d)];
  }
  return ScalarField(sys.mesh, std::move(values));
}

double integrate(const Mesh& mesh, Region region, const PointFunction& fn) {
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!in_region(mesh.blocks()[idx(t)], region)) continue;
    const TriangleGeometry g = triangle_geometry(mesh, t);
    double s = 0.0;
    for (const auto& q : kQuadrature) s += fn(map_reference(g, q[0], q[1]));
    total += g.area * s / 3.0;
  }
  return total;
}

double region_area(const Mesh& mesh, Region region) {
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (in_region(mesh.blocks()[idx(t)], region)) total += mesh.signed_area(t);
  }
  return total;
}

double l2_norm(const Mesh& mesh, Region region, const PointFunction& fn) {
  return std::sqrt(integrate(mesh, region, [&](Point p) {
    const double v = fn(p);
    return v * v;
  }));
}

double l2_error(const ScalarField& field, Region region, const PointFunction& fn) {
  const Mesh& mesh = field.mesh();
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!in_region(mesh.blocks()[idx(t)], region)) continue;
    const TriangleGeometry g = triangle_geometry(mesh, t);
    const auto& tri = mesh.triangles()[idx(t)];
    double s = 0.0;
    for (const auto& q : kQuadrature) {
      const double uh = (1.0 - q[0] - q[1]) * field[tri[0]] + q[0] * field[tri[1]] +
                        q[1] * field[tri[2]];
      const double d = uh - (fn ? fn(map_reference(g, q[0], q[1])) : 0.0);
      s += d * d;
    }
    total += g.area * s / 3.0;
  }
  return std::sqrt(total);
}

double h1_semi_error(const ScalarField& field, Region region, const GradientFunction& grad) {
  const Mesh& mesh = field.mesh();
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!in_region(mesh.blocks()[idx(t)], region)) continue;
    const TriangleGeometry g = triangle_geometry(mesh, t);
    const Vec2 gh = field.gradient(t);
    double s = 0.0;
    for (const auto& q : kQuadrature) {
      const Vec2 d = grad ? gh - grad(map_reference(g, q[0], q[1])) : gh;
      s += dot(d, d);
    }
    total += g.area * s / 3.0;
  }
  return std::sqrt(total);
}

double norm_on_region(const ScalarField& field, Region region, NormKind kind) {
  return kind == NormKind::L2 ? l2_error(field, region, nullptr)
                              : h1_semi_error(field, region, nullptr);
}

}  // namespace roughwall::fem
