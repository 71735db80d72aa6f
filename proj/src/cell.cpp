#include "roughwall/cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace roughwall::cell {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

double wrap_period(double y1) {
  double w = y1 - geom::kTwoPi * std::floor(y1 / geom::kTwoPi);
  if (w >= geom::kTwoPi) w -= geom::kTwoPi;
  return w;
}

}  // namespace

FourierTrace::FourierTrace(std::vector<std::complex<double>> nonnegative)
    : c_(std::move(nonnegative)) {
  if (c_.empty()) throw std::invalid_argument("FourierTrace: need at least η_0");
}

std::complex<double> FourierTrace::operator[](int k) const {
  const int a = std::abs(k);
  if (a > k_max()) return {0.0, 0.0};
  return k >= 0 ? c_[idx(a)] : std::conj(c_[idx(a)]);
}

double FourierTrace::eval(Point y) const {
  if (y.y < 0.0) throw DomainError("eval_beta_spectral: y2 must be >= 0");
  double s = c_.empty() ? 0.0 : c_[0].real();
  for (int k = 1; k <= k_max(); ++k) {
    const double decay = std::exp(-k * y.y);
    if (decay == 0.0) break;
    s += 2.0 * decay * (c_[idx(k)] * std::polar(1.0, k * y.x)).real();
  }
  return s;
}

Vec2 FourierTrace::gradient(Point y) const {
  if (y.y < 0.0) throw DomainError("spectral gradient: y2 must be >= 0");
  Vec2 g;
  for (int k = 1; k <= k_max(); ++k) {
    const double decay = std::exp(-k * y.y);
    if (decay == 0.0) break;
    const std::complex<double> term = c_[idx(k)] * std::polar(1.0, k * y.x) * decay;
    g.x += 2.0 * (std::complex<double>(0.0, k) * term).real();
    g.y += -2.0 * k * term.real();
  }
  return g;
}

double FourierTrace::dy1_at_origin(double y2) const { return gradient({0.0, y2}).x; }

FourierTrace extract_eta(const std::vector<double>& samples, int k_max) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) throw std::invalid_argument("extract_eta: no samples");
  if (k_max < 0 || 2 * k_max >= n) throw std::invalid_argument("extract_eta: k_max above Nyquist");
  std::vector<std::complex<double>> c(idx(k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    std::complex<double> s{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      s += samples[idx(j)] * std::polar(1.0, -geom::kTwoPi * k * j / n);
    }
    c[idx(k)] = s / static_cast<double>(n);
  }
  return FourierTrace(std::move(c));
}

double eval_beta_spectral(const FourierTrace& eta, Point y) { return eta.eval(y); }

double oscillation_l2(const FourierTrace& eta, const geom::DomainSpec& spec) {
  geom::validate(spec);
  const double eps = spec.epsilon;
  double s = 0.0;
  for (int k = 1; k <= eta.k_max(); ++k) {
    // ±k contribute equally
    s += 2.0 * std::norm(eta[k]) * eps / (2.0 * k) * (-std::expm1(-2.0 * k / eps));
  }
  return std::sqrt(spec.L * s);
}

double CellSolution::tau_bar() const {
  if (!tau) throw std::logic_error("CellSolution: τ was not solved");
  return tau->average;
}

std::shared_ptr<const geom::Mesh> make_cell_mesh(const RoughProfile& p, const CellResolution& res) {
  return std::make_shared<const geom::Mesh>(geom::build_cell_mesh(p, res.Y, res.ppp, res.n2));
}

CellField solve_cell_field(const std::shared_ptr<const geom::Mesh>& mesh, int ppp, int n2,
                           const fem::PointFunction& data, const linalg::CgOptions& cg) {
  const auto sys = fem::apply_bc(fem::assemble(mesh, 0.0),
                                 {{geom::BoundaryTag::CellBottom, data}}, {}, true);
  fem::ScalarField field = fem::solve(sys, cg);
  const auto& lay = *mesh->layout();
  std::vector<double> trace(idx(ppp));
  for (int i = 0; i < ppp; ++i) trace[idx(i)] = field[lay.vertex(i, n2)];
  double mean = 0.0;
  for (double v : trace) mean += v;
  mean /= ppp;
  FourierTrace eta = extract_eta(trace, ppp / 2 - 1);
  return CellField{std::move(field), mean, std::move(eta)};
}

CellField solve_beta(const RoughProfile& p, const CellResolution& res, const linalg::CgOptions& cg) {
  return solve_cell_field(make_cell_mesh(p, res), res.ppp, res.n2,
                          [](Point y) { return -y.y; }, cg);
}

CellField solve_tau(const RoughProfile& p, const CellResolution& res, const linalg::CgOptions& cg) {
  return solve_cell_field(make_cell_mesh(p, res), res.ppp, res.n2,
                          [](Point y) { return -y.y * y.y; }, cg);
}

NeumannTraceTable recover_g_minus(const fem::ScalarField& beta, int ppp, int n2) {
  const geom::Mesh& mesh = beta.mesh();
  const auto& lay = *mesh.layout();
  std::unordered_map<int, int> level_of;
  for (int j = 0; j <= n2; ++j) {
    level_of[lay.vertex(0, j)] = j;
    level_of[lay.vertex(ppp, j)] = j;
  }
  std::vector<double> sum(idx(n2 + 1), 0.0);
  std::vector<double> weight(idx(n2 + 1), 0.0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[idx(t)];
    for (int v : tri) {
      auto it = level_of.find(v);
      if (it == level_of.end()) continue;
      const double area = mesh.signed_area(t);
      sum[idx(it->second)] += area * beta.gradient(t).x;
      weight[idx(it->second)] += area;
    }
  }
  NeumannTraceTable table;
  for (int j = 0; j <= n2; ++j) {
    table.y2.push_back(mesh.vertices()[idx(lay.vertex(0, j))].y);
    table.g.push_back(sum[idx(j)] / weight[idx(j)]);
  }
  return table;
}

CellSolution solve_cell(const RoughProfile& p, const CellResolution& res, const linalg::CgOptions& cg,
                        bool with_tau) {
  auto mesh = make_cell_mesh(p, res);
  CellField beta = solve_cell_field(mesh, res.ppp, res.n2, [](Point y) { return -y.y; }, cg);
  std::optional<CellField> tau;
  if (with_tau) {
    tau = solve_cell_field(mesh, res.ppp, res.n2, [](Point y) { return -y.y * y.y; }, cg);
  }
  NeumannTraceTable g = recover_g_minus(beta.field, res.ppp, res.n2);
  return CellSolution{p, res, std::move(mesh), std::move(beta), std::move(tau), std::move(g)};
}

double neumann_trace_g(const CellSolution& sol, double y2) {
  if (y2 > 0.0) return sol.beta.eta.dy1_at_origin(y2);
  const auto& t = sol.g_minus;
  if (y2 < t.y2.front() - 1e-12) {
    std::ostringstream os;
    os << "neumann_trace_g: y2 = " << y2 << " below the wall at y1 = 0";
    throw DomainError(os.str());
  }
  if (y2 <= t.y2.front()) return t.g.front();
  const auto it = std::upper_bound(t.y2.begin(), t.y2.end(), y2);
  if (it == t.y2.end()) return t.g.back();
  const std::size_t j = static_cast<std::size_t>(it - t.y2.begin());
  const double s = (y2 - t.y2[j - 1]) / (t.y2[j] - t.y2[j - 1]);
  return (1.0 - s) * t.g[j - 1] + s * t.g[j];
}

namespace {

std::optional<geom::Location> locate_cell(const geom::Mesh& mesh, const RoughProfile& p, Point y) {
  const double y1 = wrap_period(y.x);
  const double Y = mesh.max_y();
  auto outside = [&]() {
    std::ostringstream os;
    os << "cell evaluation at (" << y.x << ", " << y.y << ") outside the cell";
    return OutOfDomain(os.str());
  };
  if (y.y > Y + 1e-12) throw outside();
  if (auto loc = mesh.locate({y1, std::min(y.y, Y)}, 1e-10)) return loc;
  // Between the true wall and its chord: lift onto the mesh bottom.
  if (y.y < p(y1) - 1e-12) throw outside();
  const auto& lay = *mesh.layout();
  const double s = y1 / lay.dx;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, lay.columns - 1);
  const double t = std::clamp(s - i, 0.0, 1.0);
  const double bottom = (1.0 - t) * mesh.vertices()[idx(lay.vertex(i, 0))].y +
                        t * mesh.vertices()[idx(lay.vertex(i + 1, 0))].y;
  return mesh.locate({y1, std::clamp(y.y, bottom, Y)}, 1e-9);
}

}  // namespace

double eval_cell_mesh(const fem::ScalarField& field, const RoughProfile& p, Point y) {
  const auto loc = locate_cell(field.mesh(), p, y);
  if (!loc) throw OutOfDomain("eval_cell_mesh: point not located");
  const auto& tri = field.mesh().triangles()[idx(loc->triangle)];
  return loc->bary[0] * field[tri[0]] + loc->bary[1] * field[tri[1]] + loc->bary[2] * field[tri[2]];
}

Vec2 eval_cell_mesh_gradient(const fem::ScalarField& field, const RoughProfile& p, Point y) {
  const auto loc = locate_cell(field.mesh(), p, y);
  if (!loc) throw OutOfDomain("eval_cell_mesh_gradient: point not located");
  return field.gradient(loc->triangle);
}

namespace {

bool use_mesh(const CellSolution& sol, Point y, Evaluation mode) {
  if (y.y < 0.0) return true;
  return mode == Evaluation::CellMesh && y.y <= sol.resolution.Y;
}

}  // namespace

double beta_at(const CellSolution& sol, Point y, Evaluation mode) {
  if (use_mesh(sol, y, mode)) return eval_cell_mesh(sol.beta.field, sol.profile, y);
  return sol.beta.eta.eval(y);
}

Vec2 beta_gradient_at(const CellSolution& sol, Point y, Evaluation mode) {
  if (use_mesh(sol, y, mode)) return eval_cell_mesh_gradient(sol.beta.field, sol.profile, y);
  return sol.beta.eta.gradient(y);
}

double tau_at(const CellSolution& sol, Point y, Evaluation mode) {
  if (!sol.tau) throw std::logic_error("tau_at: τ was not solved");
  if (use_mesh(sol, y, mode)) return eval_cell_mesh(sol.tau->field, sol.profile, y);
  return sol.tau->eta.eval(y);
}

Vec2 tau_gradient_at(const CellSolution& sol, Point y, Evaluation mode) {
  if (!sol.tau) throw std::logic_error("tau_gradient_at: τ was not solved");
  if (use_mesh(sol, y, mode)) return eval_cell_mesh_gradient(sol.tau->field, sol.profile, y);
  return sol.tau->eta.gradient(y);
}

}  // namespace roughwall::cell
