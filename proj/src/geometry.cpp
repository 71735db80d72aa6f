#include "roughwall/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace roughwall::geom {

RoughProfile::RoughProfile(double mean, std::vector<double> cos_coeffs,
                           std::vector<double> sin_coeffs)
    : mean_(mean), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::isfinite(mean_) || !std::all_of(cos_.begin(), cos_.end(), finite) ||
      !std::all_of(sin_.begin(), sin_.end(), finite)) {
    throw GeometryError("RoughProfile: non-finite coefficient");
  }
  min_value_ = std::numeric_limits<double>::infinity();
  max_value_ = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < kSampleCount; ++s) {
    const double y1 = kTwoPi * s / kSampleCount;
    const double f = (*this)(y1);
    min_value_ = std::min(min_value_, f);
    max_value_ = std::max(max_value_, f);
    max_slope_ = std::max(max_slope_, std::abs(derivative(y1)));
  }
  if (!(min_value_ > -1.0) || !(max_value_ < 0.0)) {
    std::ostringstream os;
    os << "RoughProfile: f must stay in ]-1, 0[, sampled range [" << min_value_
       << ", " << max_value_ << "]";
    throw GeometryError(os.str());
  }
}

double RoughProfile::operator()(double y1) const {
  double f = mean_;
  for (std::size_t j = 0; j < cos_.size(); ++j) {
    f += cos_[j] * std::cos(static_cast<double>(j + 1) * y1);
  }
  for (std::size_t j = 0; j < sin_.size(); ++j) {
    f += sin_[j] * std::sin(static_cast<double>(j + 1) * y1);
  }
  return f;
}

double RoughProfile::derivative(double y1) const {
  double d = 0.0;
  for (std::size_t j = 0; j < cos_.size(); ++j) {
    const double k = static_cast<double>(j + 1);
    d -= k * cos_[j] * std::sin(k * y1);
  }
  for (std::size_t j = 0; j < sin_.size(); ++j) {
    const double k = static_cast<double>(j + 1);
    d += k * sin_[j] * std::cos(k * y1);
  }
  return d;
}

bool RoughProfile::is_flat() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(cos_.begin(), cos_.end(), zero) &&
         std::all_of(sin_.begin(), sin_.end(), zero);
}

RoughProfile RoughProfile::mirrored() const {
  std::vector<double> s = sin_;
  for (double& v : s) v = -v;
  return RoughProfile(mean_, cos_, std::move(s));
}

double eval_profile(const RoughProfile& p, double y1) { return p(y1); }

int DomainSpec::periods() const {
  return static_cast<int>(std::lround(L / (kTwoPi * epsilon)));
}

void validate(const DomainSpec& spec) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
    throw GeometryError("DomainSpec: epsilon must be positive");
  }
  if (!std::isfinite(spec.C)) throw GeometryError("DomainSpec: C must be finite");
  if (!(spec.L > 0.0) || !std::isfinite(spec.L)) {
    throw GeometryError("DomainSpec: L must be positive");
  }
  const double ratio = spec.L / (kTwoPi * spec.epsilon);
  const double nearest = std::round(ratio);
  if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "DomainSpec: L/(2π ε) = " << ratio << " is not a positive integer";
    throw GeometryError(os.str());
  }
}

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::GammaEps: return "GammaEps";
    case BoundaryTag::Gamma0: return "Gamma0";
    case BoundaryTag::Gamma1: return "Gamma1";
    case BoundaryTag::GammaIn: return "GammaIn";
    case BoundaryTag::GammaOut: return "GammaOut";
    case BoundaryTag::CellBottom: return "CellBottom";
    case BoundaryTag::CellTop: return "CellTop";
    case BoundaryTag::QuarterE: return "QuarterE";
    case BoundaryTag::QuarterB: return "QuarterB";
    case BoundaryTag::QuarterFar: return "QuarterFar";
    case BoundaryTag::Interface: return "Interface";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<Block> blocks, std::vector<BoundaryEdge> boundary_edges,
           std::vector<PeriodicPair> periodic_pairs, Vec2 period,
           std::optional<StructuredLayout> layout)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      blocks_(std::move(blocks)),
      edges_(std::move(boundary_edges)),
      pairs_(std::move(periodic_pairs)),
      period_(period),
      layout_(std::move(layout)) {
  if (blocks_.size() != triangles_.size()) {
    throw GeometryError("Mesh: one block tag per triangle required");
  }
  const int nv = vertex_count();
  for (const auto& t : triangles_) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw GeometryError("Mesh: triangle vertex out of range");
    }
  }
  if (vertices_.empty()) throw GeometryError("Mesh: no vertices");
  min_ = max_ = vertices_.front();
  for (const Point& p : vertices_) {
    min_.x = std::min(min_.x, p.x);
    min_.y = std::min(min_.y, p.y);
    max_.x = std::max(max_.x, p.x);
    max_.y = std::max(max_.y, p.y);
  }
}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  const Point a = vertices_[static_cast<std::size_t>(tri[0])];
  const Point b = vertices_[static_cast<std::size_t>(tri[1])];
  const Point c = vertices_[static_cast<std::size_t>(tri[2])];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

std::vector<int> Mesh::tagged_vertices(BoundaryTag tag) const {
  std::vector<int> out;
  for (const auto& e : edges_) {
    if (e.tag == tag) {
      out.push_back(e.v[0]);
      out.push_back(e.v[1]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Location> Mesh::try_triangle(int t, Point p, double tol) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  const Point a = vertices_[static_cast<std::size_t>(tri[0])];
  const Point b = vertices_[static_cast<std::size_t>(tri[1])];
  const Point c = vertices_[static_cast<std::size_t>(tri[2])];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  if (det == 0.0) return std::nullopt;
  const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
  const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
  const double l0 = 1.0 - l1 - l2;
  if (std::min({l0, l1, l2}) < -tol) return std::nullopt;
  std::array<double, 3> bary{std::max(l0, 0.0), std::max(l1, 0.0), std::max(l2, 0.0)};
  const double s = bary[0] + bary[1] + bary[2];
  for (double& v : bary) v /= s;
  return Location{t, bary};
}

std::optional<Location> Mesh::locate(Point p, double tol) const {
  if (layout_) return locate_structured(p, tol);
  return locate_brute_force(p, tol);
}

std::optional<Location> Mesh::locate_brute_force(Point p, double tol) const {
  for (int t = 0; t < triangle_count(); ++t) {
    if (auto loc = try_triangle(t, p, tol)) return loc;
  }
  return std::nullopt;
}

std::optional<Location> Mesh::locate_structured(Point p, double tol) const {
  const StructuredLayout& lay = *layout_;
  const double s = (p.x - lay.x0) / lay.dx;
  if (s < -tol * 10.0 - 1e-12 || s > lay.columns + tol * 10.0 + 1e-12) return std::nullopt;
  const int i0 = std::clamp(static_cast<int>(std::floor(s)), 0, lay.columns - 1);
  for (int i : {i0, i0 - 1, i0 + 1}) {
    if (i < 0 || i >= lay.columns) continue;
    const double t = std::clamp(s - i, 0.0, 1.0);
    auto level = [&](int j) {
      const double ya = vertices_[static_cast<std::size_t>(lay.vertex(i, j))].y;
      const double yb = vertices_[static_cast<std::size_t>(lay.vertex(i + 1, j))].y;
      return (1.0 - t) * ya + t * yb;
    };
    int lo = 0;
    int hi = lay.layers;  // level index
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (level(mid) <= p.y) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    for (int j : {lo, lo - 1, lo + 1}) {
      if (j < 0 || j >= lay.layers) continue;
      for (int half = 0; half < 2; ++half) {
        if (auto loc = try_triangle(lay.triangle(i, j, half), p, tol)) return loc;
      }
    }
  }
  return std::nullopt;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

bool all_degree_two(const std::map<int, int>& degree) {
  return std::all_of(degree.begin(), degree.end(),
                     [](const auto& kv) { return kv.second == 2; });
}

}  // namespace

std::vector<std::string> mesh_defects(const Mesh& mesh) {
  std::vector<std::string> defects;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) {
      defects.push_back("triangle " + std::to_string(t) + " has non-positive area");
      if (defects.size() > 10) return defects;
    }
  }

  std::map<EdgeKey, int> use;
  for (const auto& tri : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) ++use[key(tri[k], tri[(k + 1) % 3])];
  }

  std::set<int> periodic_vertices;
  std::map<int, int> slave_to_master;
  const double scale = std::max({1.0, mesh.max_x() - mesh.min_x(), mesh.max_y() - mesh.min_y()});
  for (const auto& pp : mesh.periodic_pairs()) {
    if (!slave_to_master.emplace(pp.slave, pp.master).second) {
      defects.push_back("periodic slave " + std::to_string(pp.slave) + " paired twice");
    }
    periodic_vertices.insert(pp.master);
    periodic_vertices.insert(pp.slave);
    const Vec2 d = mesh.vertices()[static_cast<std::size_t>(pp.slave)] -
                   mesh.vertices()[static_cast<std::size_t>(pp.master)];
    if (std::abs(d.x - mesh.period().x) > 1e-12 * scale ||
        std::abs(d.y - mesh.period().y) > 1e-12 * scale) {
      defects.push_back("periodic pair " + std::to_string(pp.master) + "/" +
                        std::to_string(pp.slave) + " is not a period translate");
    }
  }
  for (const auto& [slave, master] : slave_to_master) {
    if (slave_to_master.count(master) != 0) {
      defects.push_back("periodic master " + std::to_string(master) + " is also a slave");
    }
  }

  std::map<EdgeKey, int> tag_count;
  std::map<int, int> degree;
  std::map<int, int> degree_identified;
  auto rep = [&](int v) {
    auto it = slave_to_master.find(v);
    return it == slave_to_master.end() ? v : it->second;
  };
  for (const auto& e : mesh.boundary_edges()) {
    const EdgeKey k = key(e.v[0], e.v[1]);
    auto it = use.find(k);
    if (it == use.end()) {
      defects.push_back("tagged edge is not a mesh edge");
      continue;
    }
    if (e.tag == BoundaryTag::Interface) {
      if (it->second != 2) defects.push_back("interface edge is not interior");
      continue;
    }
    if (it->second != 1) {
      defects.push_back(std::string("edge tagged ") + std::string(to_string(e.tag)) +
                        " is interior");
    }
    ++tag_count[k];
    ++degree[e.v[0]];
    ++degree[e.v[1]];
    ++degree_identified[rep(e.v[0])];
    ++degree_identified[rep(e.v[1])];
  }
  for (const auto& [k, count] : tag_count) {
    if (count > 1) defects.push_back("boundary edge carries more than one tag");
  }
  for (const auto& [k, count] : use) {
    if (count == 1 && tag_count.count(k) == 0) {
      const bool periodic_side =
          periodic_vertices.count(k.first) != 0 && periodic_vertices.count(k.second) != 0;
      if (!periodic_side) {
        defects.push_back("untagged boundary edge " + std::to_string(k.first) + "-" +
                          std::to_string(k.second));
      }
    } else if (count > 2) {
      defects.push_back("edge shared by more than two triangles");
    }
  }
  if (!all_degree_two(degree) && !all_degree_two(degree_identified)) {
    defects.push_back("tagged boundary does not form closed loops");
  }
  return defects;
}

// ---------------------------------------------------------------------------
// Builders

std::vector<double> graded_levels(double Y, int n2) {
  if (!(Y > 1.0)) throw GeometryError("graded_levels: Y must exceed 1");
  if (n2 < 1) throw GeometryError("graded_levels: n2 must be positive");
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(n2) * 8);
  for (int j = 0; j <= n2; ++j) levels.push_back(static_cast<double>(j) / n2);
  // Above y2 = 1 the levels sample the fixed map
  //   y(s) = 1 + h0 q (q^{(s-1)/h0} - 1) / (q - 1),  h0 = 1/kGradedBaseLayers,
  // at s = 1 + k/n2. For n2 = kGradedBaseLayers consecutive layers grow by q;
  // finer n2 subdivide those layers, so the whole strip is refined.
  const double q = kGradingRatio;
  const double h0 = 1.0 / kGradedBaseLayers;
  auto map = [&](int k) {
    const double s = static_cast<double>(k) / n2;
    return 1.0 + h0 * q * (std::pow(q, s / h0) - 1.0) / (q - 1.0);
  };
  const double local_ratio = std::pow(q, static_cast<double>(kGradedBaseLayers) / n2);
  for (int k = 1;; ++k) {
    const double next = map(k);
    const double h = next - levels.back();
    if (next >= Y || Y - next < 0.5 * h * local_ratio) {
      levels.push_back(Y);
      break;
    }
    levels.push_back(next);
  }
  return levels;
}

namespace {

struct SideTags {
  BoundaryTag bottom;
  BoundaryTag top;
  std::optional<BoundaryTag> left;
  std::optional<BoundaryTag> right;
};

/// Column-by-level mesh on node columns x_i = x0 + i dx (i = 0..columns).
/// `levels(i)` returns the increasing vertical coordinates of column i.
Mesh build_structured(int columns, double x0, double dx,
                      const std::function<std::vector<double>(int)>& levels,
                      int lower_layers, int pattern_period, const SideTags& tags,
                      bool periodic) {
  StructuredLayout lay;
  lay.columns = columns;
  lay.x0 = x0;
  lay.dx = dx;
  std::vector<Point> vertices;
  for (int i = 0; i <= columns; ++i) {
    const std::vector<double> ys = levels(i);
    if (i == 0) {
      lay.layers = static_cast<int>(ys.size()) - 1;
      vertices.reserve(static_cast<std::size_t>((columns + 1) * (lay.layers + 1)));
    } else if (static_cast<int>(ys.size()) != lay.layers + 1) {
      throw GeometryError("structured mesh: ragged level count");
    }
    for (std::size_t j = 1; j < ys.size(); ++j) {
      if (!(ys[j] > ys[j - 1])) {
        throw GeometryError("structured mesh: degenerate mapping (bottom >= top)");
      }
    }
    const double x = x0 + dx * i;
    for (double y : ys) vertices.push_back({x, y});
  }

  lay.rising.resize(static_cast<std::size_t>(columns));
  for (int i = 0; i < columns; ++i) {
    lay.rising[static_cast<std::size_t>(i)] = (i % pattern_period) < pattern_period / 2 ? 1 : 0;
  }

  std::vector<std::array<int, 3>> triangles;
  std::vector<Block> blocks;
  triangles.reserve(static_cast<std::size_t>(2 * columns * lay.layers));
  blocks.reserve(triangles.capacity());
  for (int i = 0; i < columns; ++i) {
    for (int j = 0; j < lay.layers; ++j) {
      const int a = lay.vertex(i, j);
      const int b = lay.vertex(i + 1, j);
      const int c = lay.vertex(i + 1, j + 1);
      const int d = lay.vertex(i, j + 1);
      if (lay.rising[static_cast<std::size_t>(i)]) {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      } else {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
      const Block blk = j < lower_layers ? Block::Lower : Block::Upper;
      blocks.push_back(blk);
      blocks.push_back(blk);
    }
  }

  std::vector<BoundaryEdge> edges;
  for (int i = 0; i < columns; ++i) {
    edges.push_back({{lay.vertex(i, 0), lay.vertex(i + 1, 0)}, tags.bottom});
  }
  if (tags.right) {
    for (int j = 0; j < lay.layers; ++j) {
      edges.push_back({{lay.vertex(columns, j), lay.vertex(columns, j + 1)}, *tags.right});
    }
  }
  for (int i = columns; i > 0; --i) {
    edges.push_back({{lay.vertex(i, lay.layers), lay.vertex(i - 1, lay.layers)}, tags.top});
  }
  if (tags.left) {
    for (int j = lay.layers; j > 0; --j) {
      edges.push_back({{lay.vertex(0, j), lay.vertex(0, j - 1)}, *tags.left});
    }
  }
  if (lower_layers > 0 && lower_layers < lay.layers) {
    for (int i = 0; i < columns; ++i) {
      edges.push_back({{lay.vertex(i, lower_layers), lay.vertex(i + 1, lower_layers)},
                       BoundaryTag::Interface});
    }
  }

  std::vector<PeriodicPair> pairs;
  Vec2 period{dx * columns, 0.0};
  if (periodic) {
    for (int j = 0; j <= lay.layers; ++j) {
      pairs.push_back({lay.vertex(0, j), lay.vertex(columns, j)});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), std::move(blocks), std::move(edges),
              std::move(pairs), period, std::move(lay));
}

void check_resolution(int ppp, int n2) {
  if (ppp < 8) throw GeometryError("mesh: ppp must be >= 8");
  if (ppp % 2 != 0) throw GeometryError("mesh: ppp must be even");
  if (n2 < 8) throw GeometryError("mesh: n2 must be >= 8");
}

/// Profile value at node column i of a ppp-per-period grid; exact period wrap.
double profile_at_column(const RoughProfile& p, int i, int ppp) {
  return p(kTwoPi * static_cast<double>(i % ppp) / ppp);
}

}  // namespace

Mesh build_rough_mesh(const DomainSpec& spec, int ppp, int n2) {
  validate(spec);
  check_resolution(ppp, n2);
  const int periods = spec.periods();
  const int columns = ppp * periods;
  const double dx = spec.L / columns;
  const int n_top = std::max(1, static_cast<int>(std::lround(n2 / spec.epsilon)));
  const double eps = spec.epsilon;
  auto levels = [&](int i) {
    std::vector<double> ys;
    ys.reserve(static_cast<std::size_t>(n2 + n_top + 1));
    const double bottom = eps * profile_at_column(spec.profile, i, ppp);
    for (int j = 0; j < n2; ++j) ys.push_back(bottom * (1.0 - static_cast<double>(j) / n2));
    for (int j = 0; j <= n_top; ++j) ys.push_back(static_cast<double>(j) / n_top);
    return ys;
  };
  return build_structured(columns, 0.0, dx, levels, n2, ppp,
                          {BoundaryTag::GammaEps, BoundaryTag::Gamma1, BoundaryTag::GammaIn,
                           BoundaryTag::GammaOut},
                          true);
}

Mesh build_smooth_mesh(double L, int nx, int ny, bool periodic) {
  if (!(L > 0.0) || nx < 1 || ny < 1) throw GeometryError("build_smooth_mesh: bad size");
  auto levels = [&](int) {
    std::vector<double> ys;
    for (int j = 0; j <= ny; ++j) ys.push_back(static_cast<double>(j) / ny);
    return ys;
  };
  return build_structured(nx, 0.0, L / nx, levels, 0, std::max(2, nx),
                          {BoundaryTag::Gamma0, BoundaryTag::Gamma1, BoundaryTag::GammaIn,
                           BoundaryTag::GammaOut},
                          periodic);
}

namespace {

std::function<std::vector<double>(int)> cell_levels(const RoughProfile& p, int ppp, int n2,
                                                    const std::vector<double>& upper) {
  return [&p, ppp, n2, upper](int i) {
    std::vector<double> ys;
    ys.reserve(static_cast<std::size_t>(n2) + upper.size());
    const double bottom = profile_at_column(p, i, ppp);
    for (int j = 0; j < n2; ++j) ys.push_back(bottom * (1.0 - static_cast<double>(j) / n2));
    ys.insert(ys.end(), upper.begin(), upper.end());
    return ys;
  };
}

}  // namespace

Mesh build_cell_mesh(const RoughProfile& p, double Y, int ppp, int n2) {
  check_resolution(ppp, n2);
  if (!(Y >= 5.0)) throw GeometryError("build_cell_mesh: Y must be >= 5");
  const std::vector<double> upper = graded_levels(Y, n2);
  return build_structured(ppp, 0.0, kTwoPi / ppp, cell_levels(p, ppp, n2, upper), n2, ppp,
                          {BoundaryTag::CellBottom, BoundaryTag::CellTop, std::nullopt,
                           std::nullopt},
                          true);
}

Mesh build_quarter_mesh(const RoughProfile& p, int n_periods, double Y, int ppp, int n2) {
  check_resolution(ppp, n2);
  if (n_periods < 5) throw GeometryError("build_quarter_mesh: n_periods must be >= 5");
  if (!(Y >= 10.0)) throw GeometryError("build_quarter_mesh: Y must be >= 10");
  const std::vector<double> upper = graded_levels(Y, n2);
  return build_structured(ppp * n_periods, 0.0, kTwoPi / ppp, cell_levels(p, ppp, n2, upper),
                          n2, ppp,
                          {BoundaryTag::QuarterB, BoundaryTag::QuarterFar, BoundaryTag::QuarterE,
                           BoundaryTag::QuarterFar},
                          false);
}

Mesh reflect_x(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  for (Point& p : vertices) p.x = -p.x;
  std::vector<std::array<int, 3>> triangles = mesh.triangles();
  for (auto& t : triangles) std::swap(t[1], t[2]);
  std::vector<PeriodicPair> pairs = mesh.periodic_pairs();
  return Mesh(std::move(vertices), std::move(triangles), mesh.blocks(), mesh.boundary_edges(),
              std::move(pairs), Vec2{-mesh.period().x, mesh.period().y});
}

}  // namespace roughwall::geom
