#include "roughwall/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace roughwall::corrector {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct LineFit {
  double slope;
  double r2;
};

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double cov = sxy - sx * sy / n;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double slope = cov / vx;
  const double r2 = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
  return {slope, r2};
}

}  // namespace

void DecayParameters::validate() const {
  if (!(alpha > 0.0 && alpha < alpha0)) {
    throw std::invalid_argument("DecayParameters: alpha must lie in ]0, √2/π[");
  }
  if (!(M > 0.5 && M < 1.0 / (1.0 - 2.0 * alpha))) {
    throw std::invalid_argument("DecayParameters: M must satisfy 1/2 < M < 1/(1 - 2 alpha)");
  }
}

CorrectorSolution solve_xi_with_data(const geom::RoughProfile& p, const QuarterResolution& res,
                                     const TraceFunction& g, const linalg::CgOptions& cg) {
  auto mesh = std::make_shared<const geom::Mesh>(
      geom::build_quarter_mesh(p, res.n_periods, res.Y, res.ppp, res.n2));
  // Outward normal on E is -e1, so ∂ξ/∂n = -g.
  const auto sys = fem::apply_bc(
      fem::assemble(mesh, 0.0),
      {{geom::BoundaryTag::QuarterB, nullptr}, {geom::BoundaryTag::QuarterFar, nullptr}},
      {{geom::BoundaryTag::QuarterE, [&g](Point y) { return -g(y.y); }}}, false);
  fem::ScalarField xi = fem::solve(sys, cg);
  return CorrectorSolution{mesh, std::move(xi), res, false};
}

CorrectorSolution solve_xi(const cell::CellSolution& cell, const geom::RoughProfile& p,
                           const QuarterResolution& res, const linalg::CgOptions& cg) {
  return solve_xi_with_data(
      p, res, [&cell](double y2) { return cell::neumann_trace_g(cell, y2); }, cg);
}

CorrectorSolution solve_mirror_xi(const cell::CellSolution& cell, const geom::RoughProfile& p,
                                  const QuarterResolution& res, const linalg::CgOptions& cg) {
  CorrectorSolution s = solve_xi_with_data(
      p.mirrored(), res, [&cell](double y2) { return -cell::neumann_trace_g(cell, y2); }, cg);
  s.mirrored = true;
  return s;
}

namespace {

std::optional<geom::Location> locate_xi(const CorrectorSolution& sol, Point y) {
  const Point q{sol.mirrored ? -y.x : y.x, y.y};
  const geom::Mesh& m = *sol.mesh;
  if (q.x < 0.0 || q.x > m.max_x() || q.y > m.max_y()) return std::nullopt;
  return m.locate(q, 1e-10);
}

}  // namespace

double eval_xi(const CorrectorSolution& sol, Point y) {
  const auto loc = locate_xi(sol, y);
  if (!loc) return 0.0;
  const auto& tri = sol.mesh->triangles()[idx(loc->triangle)];
  return loc->bary[0] * sol.xi[tri[0]] + loc->bary[1] * sol.xi[tri[1]] +
         loc->bary[2] * sol.xi[tri[2]];
}

Vec2 eval_xi_gradient(const CorrectorSolution& sol, Point y) {
  const auto loc = locate_xi(sol, y);
  if (!loc) return {};
  Vec2 g = sol.xi.gradient(loc->triangle);
  if (sol.mirrored) g.x = -g.x;
  return g;
}

double h1_norm(const CorrectorSolution& sol) {
  const double l2 = fem::norm_on_region(sol.xi, fem::Region::Full, fem::NormKind::L2);
  const double semi = fem::norm_on_region(sol.xi, fem::Region::Full, fem::NormKind::H1Semi);
  return std::sqrt(l2 * l2 + semi * semi);
}

double l2_norm_on_box(const CorrectorSolution& sol, double y1_max, double y2_max) {
  const geom::Mesh& m = *sol.mesh;
  double total = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles()[idx(t)];
    const Point a = m.vertices()[idx(tri[0])];
    const Point b = m.vertices()[idx(tri[1])];
    const Point c = m.vertices()[idx(tri[2])];
    const double area = m.signed_area(t);
    for (const auto& q : fem::kQuadrature) {
      const double l0 = 1.0 - q[0] - q[1];
      const Point y = l0 * a + q[0] * b + q[1] * c;
      if (y.x > y1_max || y.y > y2_max) continue;
      const double v = l0 * sol.xi[tri[0]] + q[0] * sol.xi[tri[1]] + q[1] * sol.xi[tri[2]];
      total += area * v * v / 3.0;
    }
  }
  return std::sqrt(total);
}

double line_integral_dxi2(const CorrectorSolution& sol, double c) {
  const geom::Mesh& m = *sol.mesh;
  double total = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tri = m.triangles()[idx(t)];
    std::array<Point, 3> p;
    for (int k = 0; k < 3; ++k) p[idx(k)] = m.vertices()[idx(tri[idx(k)])];
    const double lo = std::min({p[0].y, p[1].y, p[2].y});
    const double hi = std::max({p[0].y, p[1].y, p[2].y});
    // Half-open so an edge lying on the line is counted once.
    if (!(lo <= c && c < hi)) continue;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    for (int k = 0; k < 3; ++k) {
      const Point a = p[idx(k)];
      const Point b = p[idx((k + 1) % 3)];
      if (a.y == b.y) {
        if (a.y == c) {
          xmin = std::min({xmin, a.x, b.x});
          xmax = std::max({xmax, a.x, b.x});
        }
        continue;
      }
      const double s = (c - a.y) / (b.y - a.y);
      if (s < 0.0 || s > 1.0) continue;
      const double x = a.x + s * (b.x - a.x);
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
    if (!(xmax > xmin)) continue;
    const double gx = sol.xi.gradient(t).x;
    total += (xmax - xmin) * gx * gx;
  }
  return total;
}

std::optional<DecayReport> decay_report(const CorrectorSolution& sol, const DecayParameters& params) {
  params.validate();
  const geom::Mesh& m = *sol.mesh;
  double max_abs = 0.0;
  for (double v : sol.xi.values()) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs < kNoDecayThreshold) return std::nullopt;

  const double y1_far = m.max_x();
  const double y2_far = m.max_y();
  DecayReport report;
  for (double rho_s : kShellRadii) {
    const double r_in = rho_s / std::sqrt(2.0);
    const double r_out = rho_s * std::sqrt(2.0);
    // Drop shells reaching the outer 20% band next to the truncation boundary.
    if (r_out > 0.8 * y1_far || r_out - 1.0 > 0.8 * y2_far) continue;
    double shell_max = 0.0;
    bool any = false;
    for (int v = 0; v < m.vertex_count(); ++v) {
      const Point y = m.vertices()[idx(v)];
      const double rho = std::hypot(y.x, y.y + 1.0);
      if (rho < r_in || rho >= r_out) continue;
      any = true;
      shell_max = std::max(shell_max, std::abs(sol.xi[v]));
    }
    if (any && shell_max > 0.0) report.shells.push_back({rho_s, shell_max});
  }
  if (report.shells.size() < 3) {
    std::ostringstream os;
    os << "decay_report: only " << report.shells.size() << " usable shells";
    throw InsufficientDomain(os.str());
  }
  for (double c : kLineHeights) {
    if (c > 0.5 * y2_far) continue;
    const double v = line_integral_dxi2(sol, c);
    if (v > 0.0) report.lines.push_back({c, v});
  }

  std::vector<double> x, y;
  for (const auto& s : report.shells) {
    x.push_back(s.rho);
    y.push_back(s.max_abs_xi);
  }
  const LineFit radial = loglog_fit(x, y);
  report.radial_exponent = radial.slope;
  report.radial_r2 = radial.r2;
  x.clear();
  y.clear();
  for (const auto& l : report.lines) {
    x.push_back(l.y2);
    y.push_back(l.int_dxi2);
  }
  if (x.size() >= 2) {
    const LineFit line = loglog_fit(x, y);
    report.line_exponent = line.slope;
    report.line_r2 = line.r2;
  } else {
    report.line_exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace roughwall::corrector
