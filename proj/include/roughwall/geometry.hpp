#pragma once

/// Rough-wall profiles and structured triangle meshes for the four domain
/// families used by the solver: the rough channel, the smooth channel, the
/// periodic cell and the rough quarter-plane.
///
/// Every mesh is built column by column from a list of vertical levels, so the
/// fictitious interface (x2 = 0 or y2 = 0) is always a chain of mesh edges and
/// the lower (sublayer) and upper blocks can be integrated separately.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roughwall {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};
using Point = Vec2;

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a point query falls outside a mesh.
class OutOfDomain : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace geom {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wall shape f on one roughness period [0, 2π):
///   f(y1) = mean + Σ_j cos_coeffs[j-1] cos(j y1) + Σ_j sin_coeffs[j-1] sin(j y1).
/// Construction samples f on 4096 points and rejects profiles leaving ]-1, 0[.
class RoughProfile {
 public:
  RoughProfile(double mean, std::vector<double> cos_coeffs,
               std::vector<double> sin_coeffs);

  static RoughProfile flat(double mean) { return RoughProfile(mean, {}, {}); }

  double operator()(double y1) const;
  double derivative(double y1) const;

  double mean() const { return mean_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }

  double min_value() const { return min_value_; }
  double max_value() const { return max_value_; }
  double max_slope() const { return max_slope_; }
  bool is_flat() const;

  /// Profile s -> f(-s); the bottom of the mirrored quarter-plane.
  RoughProfile mirrored() const;

  static constexpr int kSampleCount = 4096;

 private:
  double mean_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
  double max_slope_ = 0.0;
};

double eval_profile(const RoughProfile& p, double y1);

/// Macroscopic problem data. L / (2π ε) must be a positive integer.
struct DomainSpec {
  double L = kTwoPi;
  double epsilon = 0.1;
  double C = 1.0;
  RoughProfile profile = RoughProfile::flat(-0.5);

  /// Number of roughness periods across the channel.
  int periods() const;
};

void validate(const DomainSpec& spec);

enum class BoundaryTag : std::uint8_t {
  GammaEps,
  Gamma0,
  Gamma1,
  GammaIn,
  GammaOut,
  CellBottom,
  CellTop,
  QuarterE,
  QuarterB,
  QuarterFar,
  Interface,
};

std::string_view to_string(BoundaryTag tag);

/// Lower = rough sublayer (below the interface), Upper = smooth part.
enum class Block : std::uint8_t { Lower, Upper };

struct BoundaryEdge {
  std::array<int, 2> v;
  BoundaryTag tag;
};

struct PeriodicPair {
  int master;
  int slave;
};

/// Column/level numbering of a structured mesh. Vertex (i, j) sits on node
/// column i and level j; quad (i, j) is split into two triangles along a
/// diagonal chosen per column.
struct StructuredLayout {
  int columns = 0;
  int layers = 0;
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<std::uint8_t> rising;  // per column: 1 = diagonal (i,j)-(i+1,j+1)

  int vertex(int i, int j) const { return i * (layers + 1) + j; }
  int triangle(int i, int j, int half) const { return 2 * (i * layers + j) + half; }
};

struct Location {
  int triangle;
  std::array<double, 3> bary;
};

class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<Block> blocks, std::vector<BoundaryEdge> boundary_edges,
       std::vector<PeriodicPair> periodic_pairs, Vec2 period,
       std::optional<StructuredLayout> layout = std::nullopt);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return edges_; }
  const std::vector<PeriodicPair>& periodic_pairs() const { return pairs_; }
  const std::optional<StructuredLayout>& layout() const { return layout_; }
  Vec2 period() const { return period_; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }

  /// Signed area (positive for counterclockwise triangles).
  double signed_area(int t) const;

  /// Sorted, deduplicated vertices touched by edges carrying `tag`.
  std::vector<int> tagged_vertices(BoundaryTag tag) const;

  /// Triangle containing `p` with barycentric coordinates, or nullopt.
  /// Points within `tol` (relative to the local cell size) of the mesh are
  /// snapped inside.
  std::optional<Location> locate(Point p, double tol = 1e-12) const;

  double min_x() const { return min_.x; }
  double max_x() const { return max_.x; }
  double min_y() const { return min_.y; }
  double max_y() const { return max_.y; }

 private:
  std::optional<Location> locate_structured(Point p, double tol) const;
  std::optional<Location> locate_brute_force(Point p, double tol) const;
  std::optional<Location> try_triangle(int t, Point p, double tol) const;

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Block> blocks_;
  std::vector<BoundaryEdge> edges_;
  std::vector<PeriodicPair> pairs_;
  Vec2 period_;
  std::optional<StructuredLayout> layout_;
  Point min_{};
  Point max_{};
};

/// Human-readable list of violated mesh invariants; empty when the mesh is
/// valid (positive areas, tagged boundary closes up, consistent periodic
/// pairs).
std::vector<std::string> mesh_defects(const Mesh& mesh);

/// Levels of the cell/quarter-plane upper block: n2 uniform layers on [0, 1],
/// then geometrically growing layers until `Y`. At n2 = kGradedBaseLayers
/// each layer is `kGradingRatio` times the previous one; larger n2 subdivide
/// the same layers so refinement reaches the top of the strip.
std::vector<double> graded_levels(double Y, int n2);
inline constexpr double kGradingRatio = 1.15;
inline constexpr int kGradedBaseLayers = 8;

/// Rough channel {0 < x1 < L, ε f(x1/ε) < x2 < 1}. The sublayer gets n2
/// layers, the smooth part round(n2/ε) layers, so for integer 1/ε the first n2
/// smooth layers coincide with the cell mesh band 0 < y2 < 1 scaled by ε.
Mesh build_rough_mesh(const DomainSpec& spec, int ppp, int n2);

/// Smooth channel [0, L] x [0, 1] with nx x ny cells (all triangles Upper).
Mesh build_smooth_mesh(double L, int nx, int ny, bool periodic);

/// Truncated cell {0 < y1 < 2π, f(y1) < y2 < Y}, y1-periodic.
Mesh build_cell_mesh(const RoughProfile& p, double Y, int ppp, int n2);

/// Truncated rough quarter-plane {0 < y1 < 2π n_periods, f(y1) < y2 < Y}.
Mesh build_quarter_mesh(const RoughProfile& p, int n_periods, double Y, int ppp,
                        int n2);

/// Reflection x -> -x with orientation restored; drops the structured layout.
Mesh reflect_x(const Mesh& mesh);

}  // namespace geom
}  // namespace roughwall
