#pragma once

#include "yeefem/geometry.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace yeefem {

enum class EdgeTag
{
  Interior,
  Interface, // shared by a triangle and a rectangle
  Left,
  Ball,
  Other
};

std::string_view to_string(EdgeTag tag);
std::optional<EdgeTag> parse_edge_tag(std::string_view name);

/// True for the tags that may only be attached to boundary edges.
constexpr bool is_boundary_tag(EdgeTag tag)
{
  return tag == EdgeTag::Left || tag == EdgeTag::Ball || tag == EdgeTag::Other;
}

enum class ElementKind
{
  Triangle,
  Rectangle
};

/// Global edge, oriented from the smaller to the larger vertex index.
struct Edge
{
  int v0;
  int v1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct BoundaryTagEntry
{
  int v0;
  int v1;
  EdgeTag tag;
};

struct BoundingBox
{
  Vec2 lo;
  Vec2 hi;
};

/// Local edge order on rectangles.
namespace rect_side {
inline constexpr int bottom = 0;
inline constexpr int right = 1;
inline constexpr int top = 2;
inline constexpr int left = 3;
} // namespace rect_side

/// Conforming mesh of counterclockwise triangles and axis-aligned rectangles.
///
/// Elements are numbered triangles first, then rectangles. Triangle local edge k
/// is the edge opposite local vertex k, locally oriented from vertex (k+1)%3 to
/// (k+2)%3. Rectangle corners are stored as (bottom-left, bottom-right,
/// top-right, top-left); local edges are ordered bottom, right, top, left and
/// locally oriented along the positive coordinate axis. Local signs satisfy
/// t_local = sign * t_global.
class HybridMesh
{
public:
  HybridMesh() = default;

  /// Builds edges and tags, then validates; throws InvalidGeometry or
  /// ValidationError on any violated invariant. Rectangle corners may be given
  /// in any counterclockwise rotation.
  static HybridMesh build(std::vector<Vec2> vertices,
                          std::vector<std::array<int, 3>> triangles,
                          std::vector<std::array<int, 4>> rectangles,
                          const std::vector<BoundaryTagEntry>& boundary_tags = {});

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 4>>& rectangles() const { return rectangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_rectangles() const { return static_cast<int>(rectangles_.size()); }
  int num_elements() const { return num_triangles() + num_rectangles(); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  ElementKind element_kind(int element) const
  {
    return element < num_triangles() ? ElementKind::Triangle : ElementKind::Rectangle;
  }
  /// Index into triangles() or rectangles() for the given element id.
  int local_index(int element) const
  {
    return element < num_triangles() ? element : element - num_triangles();
  }

  /// Edge ids of an element in local order (3 or 4 valid entries).
  std::span<const int> element_edges(int element) const;
  std::span<const int> element_signs(int element) const;

  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
  const std::array<int, 3>& triangle_signs(int t) const { return tri_signs_[t]; }
  const std::array<int, 4>& rectangle_edges(int r) const { return rect_edges_[r]; }
  const std::array<int, 4>& rectangle_signs(int r) const { return rect_signs_[r]; }

  std::array<Vec2, 3> triangle_points(int t) const;
  BoundingBox rectangle_box(int r) const;
  Vec2 element_centroid(int element) const;
  double element_area(int element) const;

  EdgeTag edge_tag(int edge) const { return edge_tags_[edge]; }
  /// Element ids adjacent to an edge; the second entry is -1 on the boundary.
  const std::array<int, 2>& edge_elements(int edge) const { return edge_elements_[edge]; }
  bool is_boundary_edge(int edge) const { return edge_elements_[edge][1] < 0; }

  Vec2 edge_midpoint(int edge) const;
  double edge_length(int edge) const;
  /// Unit tangent of the global orientation v0 -> v1.
  Vec2 edge_tangent(int edge) const;

  /// +1 when the global orientation of a boundary edge runs with the domain on
  /// its left (the direction in which n x E = E . t is measured), -1 otherwise.
  int boundary_orientation(int edge) const;

  /// Edge id for an unordered vertex pair, or -1.
  int find_edge(int a, int b) const;

  std::vector<int> edges_with_tag(EdgeTag tag) const;

  friend bool operator==(const HybridMesh&, const HybridMesh&) = default;

private:
  void build_edges();
  void assign_tags(const std::vector<BoundaryTagEntry>& boundary_tags);

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 4>> rectangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<std::array<int, 3>> tri_signs_;
  std::vector<std::array<int, 4>> rect_edges_;
  std::vector<std::array<int, 4>> rect_signs_;
  std::vector<std::array<int, 2>> edge_elements_;
  std::vector<EdgeTag> edge_tags_;
};

struct MeshStatistics
{
  double h_max = 0.0;
  double h_min = 0.0;
  int num_triangles = 0;
  int num_rectangles = 0;
  int num_edges = 0;
  /// min over triangles of inradius / circumradius (0.5 for equilateral); 0 without triangles
  double min_triangle_quality = 0.0;
  /// min over rectangles of short side / long side (1 for squares); 0 without rectangles
  double min_rectangle_aspect = 0.0;
  /// h_max / h_min
  double quasi_uniformity = 0.0;
  double total_area = 0.0;
};

/// Re-checks every geometric and topological invariant; throws on violation.
MeshStatistics validate_mesh(const HybridMesh& mesh);

enum class SplitDirection
{
  Diagonal,     // bottom-left to top-right
  AntiDiagonal, // bottom-right to top-left
  Alternating   // checkerboard of the two
};

HybridMesh build_structured_rect_mesh(int nx, int ny, const BoundingBox& box);
HybridMesh build_structured_tri_mesh(int nx, int ny, const BoundingBox& box,
                                     SplitDirection split = SplitDirection::Diagonal);

/// Rectangles for cell columns [0, nx_rect), triangles for [nx_rect, nx).
HybridMesh build_structured_hybrid_mesh(int nx, int ny, const BoundingBox& box, int nx_rect,
                                        SplitDirection split = SplitDirection::Diagonal);

struct ScatteringMeshInfo
{
  int cells_per_unit_side; // m: subdivisions of each side of length 2
  int circle_segments;
  int radial_layers;
};

/// Rectangles on (0,2)x(-1,1), triangles on ((2,4)x(-1,1)) minus the disk of
/// radius 0.3 about (3,0), approximated by an inscribed polygon. The polygon
/// has 4m segments, where m (even) subdivides each side of length 2 so that
/// the spacing is at most h and 4m >= n_circle.
HybridMesh build_scattering_demo_mesh(double h, int n_circle, ScatteringMeshInfo* info = nullptr);

HybridMesh read_mesh(const std::filesystem::path& path);
HybridMesh parse_mesh(std::string_view text);
void write_mesh(const HybridMesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const HybridMesh& mesh);

} // namespace yeefem
