#include "yeefem/mesh.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <utility>

namespace yeefem {

namespace {

constexpr double kAxisTol = 1e-12;

std::pair<int, int> ordered(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

std::string edge_name(const HybridMesh& mesh, int a, int b)
{
  const auto& p = mesh.vertices()[a];
  const auto& q = mesh.vertices()[b];
  return "(" + std::to_string(a) + "," + std::to_string(b) + ") from (" + std::to_string(p.x) +
         "," + std::to_string(p.y) + ") to (" + std::to_string(q.x) + "," + std::to_string(q.y) +
         ")";
}

/// Rotates a counterclockwise axis-aligned quad so it starts at the
/// bottom-left corner, and checks orientation and axis alignment.
std::array<int, 4> canonical_rectangle(const std::vector<Vec2>& v, std::array<int, 4> r, int id)
{
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (r[i] == r[j])
        throw ValidationError("rectangle " + std::to_string(id) + " repeats vertex " +
                              std::to_string(r[i]) + " (duplicate edge in one element)");

  double area2 = 0.0;
  for (int i = 0; i < 4; ++i)
    area2 += cross(v[r[i]], v[r[(i + 1) % 4]]);
  if (!(area2 > 0.0))
    throw InvalidGeometry("rectangle " + std::to_string(id) + " is inverted or degenerate");

  int start = 0;
  for (int i = 1; i < 4; ++i)
  {
    const auto& p = v[r[i]];
    const auto& q = v[r[start]];
    if (p.x + p.y < q.x + q.y)
      start = i;
  }
  std::rotate(r.begin(), r.begin() + start, r.end());

  const Vec2 bl = v[r[0]], br = v[r[1]], tr = v[r[2]], tl = v[r[3]];
  const double scale = std::max(std::abs(tr.x - bl.x), std::abs(tr.y - bl.y));
  const double tol = kAxisTol * std::max(scale, 1.0);
  const bool aligned = std::abs(br.y - bl.y) <= tol && std::abs(tr.x - br.x) <= tol &&
                       std::abs(tl.y - tr.y) <= tol && std::abs(bl.x - tl.x) <= tol &&
                       br.x - bl.x > tol && tr.y - br.y > tol;
  if (!aligned)
    throw InvalidGeometry("rectangle " + std::to_string(id) + " is not an axis-aligned rectangle");
  return r;
}

double triangle_quality(const std::array<Vec2, 3>& p)
{
  const double a = norm(p[1] - p[2]);
  const double b = norm(p[2] - p[0]);
  const double c = norm(p[0] - p[1]);
  const double area = 0.5 * signed_area2(p[0], p[1], p[2]);
  const double inradius = 2.0 * area / (a + b + c);
  const double circumradius = a * b * c / (4.0 * area);
  return inradius / circumradius;
}

double grid_coord(double lo, double hi, int i, int n) { return lo + (hi - lo) * i / n; }

void check_grid_args(int nx, int ny, const BoundingBox& box)
{
  if (nx < 1 || ny < 1)
    throw InvalidGeometry("structured mesh needs nx, ny >= 1 (got " + std::to_string(nx) + ", " +
                          std::to_string(ny) + ")");
  if (!(box.hi.x > box.lo.x) || !(box.hi.y > box.lo.y))
    throw InvalidGeometry("degenerate bounding box");
}

/// Boundary edges on x = box.lo.x become "left", the rest "other".
std::vector<BoundaryTagEntry> left_tags(int nx, int ny)
{
  std::vector<BoundaryTagEntry> tags;
  for (int j = 0; j < ny; ++j)
    tags.push_back({j * (nx + 1), (j + 1) * (nx + 1), EdgeTag::Left});
  return tags;
}

} // namespace

std::string_view to_string(EdgeTag tag)
{
  switch (tag)
  {
  case EdgeTag::Interior:
    return "interior";
  case EdgeTag::Interface:
    return "interface";
  case EdgeTag::Left:
    return "left";
  case EdgeTag::Ball:
    return "ball";
  case EdgeTag::Other:
    return "other";
  }
  return "unknown";
}

std::optional<EdgeTag> parse_edge_tag(std::string_view name)
{
  for (auto tag : {EdgeTag::Interior, EdgeTag::Interface, EdgeTag::Left, EdgeTag::Ball,
                   EdgeTag::Other})
    if (to_string(tag) == name)
      return tag;
  return std::nullopt;
}

HybridMesh HybridMesh::build(std::vector<Vec2> vertices,
                             std::vector<std::array<int, 3>> triangles,
                             std::vector<std::array<int, 4>> rectangles,
                             const std::vector<BoundaryTagEntry>& boundary_tags)
{
  HybridMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.rectangles_ = std::move(rectangles);

  const int nv = mesh.num_vertices();
  auto check_index = [nv](int i, const char* kind, int id) {
    if (i < 0 || i >= nv)
      throw ValidationError(std::string(kind) + " " + std::to_string(id) +
                            " references missing vertex " + std::to_string(i));
  };
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    auto& tri = mesh.triangles_[t];
    for (int i : tri)
      check_index(i, "triangle", t);
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw ValidationError("triangle " + std::to_string(t) +
                            " repeats a vertex (duplicate edge in one element)");
    if (!(signed_area2(mesh.vertices_[tri[0]], mesh.vertices_[tri[1]], mesh.vertices_[tri[2]]) >
          0.0))
      throw InvalidGeometry("triangle " + std::to_string(t) + " is inverted or degenerate");
  }
  for (int r = 0; r < mesh.num_rectangles(); ++r)
  {
    for (int i : mesh.rectangles_[r])
      check_index(i, "rectangle", r);
    mesh.rectangles_[r] = canonical_rectangle(mesh.vertices_, mesh.rectangles_[r], r);
  }

  mesh.build_edges();
  mesh.assign_tags(boundary_tags);
  validate_mesh(mesh);
  return mesh;
}

void HybridMesh::build_edges()
{
  std::map<std::pair<int, int>, int> index;
  edges_.clear();
  edge_elements_.clear();

  auto add = [&](int a, int b, int element) {
    const auto key = ordered(a, b);
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(edges_.size()));
    if (inserted)
    {
      edges_.push_back({key.first, key.second});
      edge_elements_.push_back({element, -1});
    }
    else
    {
      auto& adj = edge_elements_[it->second];
      if (adj[1] >= 0)
        throw ValidationError("edge " + edge_name(*this, a, b) +
                              " is shared by more than two elements");
      adj[1] = element;
    }
    const int sign = a < b ? 1 : -1;
    return std::pair{it->second, sign};
  };

  tri_edges_.assign(triangles_.size(), {});
  tri_signs_.assign(triangles_.size(), {});
  for (int t = 0; t < num_triangles(); ++t)
  {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k)
    {
      auto [e, s] = add(tri[(k + 1) % 3], tri[(k + 2) % 3], t);
      tri_edges_[t][k] = e;
      tri_signs_[t][k] = s;
    }
  }

  rect_edges_.assign(rectangles_.size(), {});
  rect_signs_.assign(rectangles_.size(), {});
  for (int r = 0; r < num_rectangles(); ++r)
  {
    const auto& c = rectangles_[r];
    const int element = num_triangles() + r;
    // local orientation along +x / +y
    const std::array<std::pair<int, int>, 4> sides = {
      std::pair{c[0], c[1]}, {c[1], c[2]}, {c[3], c[2]}, {c[0], c[3]}};
    for (int k = 0; k < 4; ++k)
    {
      auto [e, s] = add(sides[k].first, sides[k].second, element);
      rect_edges_[r][k] = e;
      rect_signs_[r][k] = s;
    }
  }
}

void HybridMesh::assign_tags(const std::vector<BoundaryTagEntry>& boundary_tags)
{
  edge_tags_.assign(edges_.size(), EdgeTag::Interior);
  for (int e = 0; e < num_edges(); ++e)
  {
    const auto& adj = edge_elements_[e];
    if (adj[1] < 0)
      edge_tags_[e] = EdgeTag::Other;
    else if (element_kind(adj[0]) != element_kind(adj[1]))
      edge_tags_[e] = EdgeTag::Interface;
  }
  std::map<std::pair<int, int>, int> index;
  for (int e = 0; e < num_edges(); ++e)
    index.emplace(std::pair{edges_[e].v0, edges_[e].v1}, e);
  for (const auto& entry : boundary_tags)
  {
    if (!is_boundary_tag(entry.tag))
      throw ValidationError("tag '" + std::string(to_string(entry.tag)) +
                            "' cannot be assigned explicitly");
    const auto it = index.find(ordered(entry.v0, entry.v1));
    const int e = it == index.end() ? -1 : it->second;
    if (e < 0)
      throw ValidationError("boundary tag on (" + std::to_string(entry.v0) + "," +
                            std::to_string(entry.v1) + ") does not name a mesh edge");
    if (!is_boundary_edge(e))
      throw ValidationError("boundary tag on interior edge " +
                            edge_name(*this, entry.v0, entry.v1));
    edge_tags_[e] = entry.tag;
  }
}

std::span<const int> HybridMesh::element_edges(int element) const
{
  if (element_kind(element) == ElementKind::Triangle)
    return tri_edges_[element];
  return rect_edges_[local_index(element)];
}

std::span<const int> HybridMesh::element_signs(int element) const
{
  if (element_kind(element) == ElementKind::Triangle)
    return tri_signs_[element];
  return rect_signs_[local_index(element)];
}

std::array<Vec2, 3> HybridMesh::triangle_points(int t) const
{
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

BoundingBox HybridMesh::rectangle_box(int r) const
{
  const auto& c = rectangles_[r];
  return {vertices_[c[0]], vertices_[c[2]]};
}

Vec2 HybridMesh::element_centroid(int element) const
{
  if (element_kind(element) == ElementKind::Triangle)
  {
    const auto p = triangle_points(element);
    return (1.0 / 3.0) * (p[0] + p[1] + p[2]);
  }
  const auto box = rectangle_box(local_index(element));
  return midpoint(box.lo, box.hi);
}

double HybridMesh::element_area(int element) const
{
  if (element_kind(element) == ElementKind::Triangle)
  {
    const auto p = triangle_points(element);
    return 0.5 * signed_area2(p[0], p[1], p[2]);
  }
  const auto box = rectangle_box(local_index(element));
  return (box.hi.x - box.lo.x) * (box.hi.y - box.lo.y);
}

Vec2 HybridMesh::edge_midpoint(int edge) const
{
  return midpoint(vertices_[edges_[edge].v0], vertices_[edges_[edge].v1]);
}

double HybridMesh::edge_length(int edge) const
{
  return norm(vertices_[edges_[edge].v1] - vertices_[edges_[edge].v0]);
}

Vec2 HybridMesh::edge_tangent(int edge) const
{
  const Vec2 d = vertices_[edges_[edge].v1] - vertices_[edges_[edge].v0];
  return (1.0 / norm(d)) * d;
}

int HybridMesh::boundary_orientation(int edge) const
{
  const int element = edge_elements_[edge][0];
  const auto edges = element_edges(element);
  const auto signs = element_signs(element);
  for (std::size_t k = 0; k < edges.size(); ++k)
  {
    if (edges[k] != edge)
      continue;
    if (element_kind(element) == ElementKind::Triangle)
      return signs[k];
    // counterclockwise traversal runs against +x on the top and +y on the left
    const bool reversed = k == rect_side::top || k == rect_side::left;
    return reversed ? -signs[k] : signs[k];
  }
  return 0;
}

int HybridMesh::find_edge(int a, int b) const
{
  const auto key = ordered(a, b);
  for (int e = 0; e < num_edges(); ++e)
    if (edges_[e].v0 == key.first && edges_[e].v1 == key.second)
      return e;
  return -1;
}

std::vector<int> HybridMesh::edges_with_tag(EdgeTag tag) const
{
  std::vector<int> out;
  for (int e = 0; e < num_edges(); ++e)
    if (edge_tags_[e] == tag)
      out.push_back(e);
  return out;
}

MeshStatistics validate_mesh(const HybridMesh& mesh)
{
  MeshStatistics stats;
  stats.num_triangles = mesh.num_triangles();
  stats.num_rectangles = mesh.num_rectangles();
  stats.num_edges = mesh.num_edges();
  if (mesh.num_elements() == 0)
    throw ValidationError("mesh has no elements");

  const auto& v = mesh.vertices();
  for (const auto& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InvalidGeometry("non-finite vertex coordinate");

  stats.min_triangle_quality = mesh.num_triangles() > 0 ? 1.0 : 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto p = mesh.triangle_points(t);
    if (!(signed_area2(p[0], p[1], p[2]) > 0.0))
      throw InvalidGeometry("triangle " + std::to_string(t) + " is inverted or degenerate");
    stats.min_triangle_quality = std::min(stats.min_triangle_quality, triangle_quality(p));
  }
  stats.min_rectangle_aspect = mesh.num_rectangles() > 0 ? 1.0 : 0.0;
  for (int r = 0; r < mesh.num_rectangles(); ++r)
  {
    canonical_rectangle(v, mesh.rectangles()[r], r);
    const auto box = mesh.rectangle_box(r);
    const double w = box.hi.x - box.lo.x;
    const double h = box.hi.y - box.lo.y;
    stats.min_rectangle_aspect = std::min(stats.min_rectangle_aspect, std::min(w, h) / std::max(w, h));
  }
  for (int k = 0; k < mesh.num_elements(); ++k)
    stats.total_area += mesh.element_area(k);

  stats.h_max = 0.0;
  stats.h_min = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const double len = mesh.edge_length(e);
    stats.h_max = std::max(stats.h_max, len);
    stats.h_min = std::min(stats.h_min, len);
  }
  if (!(stats.h_min > 0.0))
    throw InvalidGeometry("mesh has a zero-length edge");
  stats.quasi_uniformity = stats.h_max / stats.h_min;

  // Tags: boundary edges carry boundary tags, interior edges never do.
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const auto tag = mesh.edge_tag(e);
    if (mesh.is_boundary_edge(e) != is_boundary_tag(tag))
      throw ValidationError("edge " + edge_name(mesh, mesh.edges()[e].v0, mesh.edges()[e].v1) +
                            " has inconsistent tag '" + std::string(to_string(tag)) + "'");
  }

  // Hanging nodes: a vertex strictly inside a boundary edge means two elements
  // meet along a partial edge.
  std::vector<int> by_x(v.size());
  std::iota(by_x.begin(), by_x.end(), 0);
  std::sort(by_x.begin(), by_x.end(), [&](int a, int b) { return v[a].x < v[b].x; });
  const double tol = 1e-10 * stats.h_min;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (!mesh.is_boundary_edge(e))
      continue;
    const auto [a, b] = mesh.edges()[e];
    const Vec2 pa = v[a], pb = v[b];
    const double xlo = std::min(pa.x, pb.x) - tol;
    const double xhi = std::max(pa.x, pb.x) + tol;
    auto it = std::lower_bound(by_x.begin(), by_x.end(), xlo,
                               [&](int i, double x) { return v[i].x < x; });
    const double len = norm(pb - pa);
    for (; it != by_x.end() && v[*it].x <= xhi; ++it)
    {
      const int c = *it;
      if (c == a || c == b)
        continue;
      const Vec2 d = v[c] - pa;
      const double along = dot(d, pb - pa) / len;
      const double off = std::abs(cross(pb - pa, d)) / len;
      if (off <= tol && along > tol && along < len - tol)
        throw ValidationError("hanging node " + std::to_string(c) + " on edge " +
                              edge_name(mesh, a, b) + ": mesh is not conforming");
    }
  }
  return stats;
}

HybridMesh build_structured_rect_mesh(int nx, int ny, const BoundingBox& box)
{
  return build_structured_hybrid_mesh(nx, ny, box, nx);
}

HybridMesh build_structured_tri_mesh(int nx, int ny, const BoundingBox& box, SplitDirection split)
{
  return build_structured_hybrid_mesh(nx, ny, box, 0, split);
}

HybridMesh build_structured_hybrid_mesh(int nx, int ny, const BoundingBox& box, int nx_rect,
                                        SplitDirection split)
{
  check_grid_args(nx, ny, box);
  if (nx_rect < 0 || nx_rect > nx)
    throw InvalidGeometry("rectangle column count out of range");

  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      vertices.push_back({grid_coord(box.lo.x, box.hi.x, i, nx), grid_coord(box.lo.y, box.hi.y, j, ny)});

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 4>> rectangles;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (i < nx_rect)
      {
        rectangles.push_back({a, b, c, d});
        continue;
      }
      const bool diagonal = split == SplitDirection::Diagonal ||
                            (split == SplitDirection::Alternating && (i + j) % 2 == 0);
      if (diagonal)
      {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      }
      else
      {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
    }
  return HybridMesh::build(std::move(vertices), std::move(triangles), std::move(rectangles),
                           left_tags(nx, ny));
}

HybridMesh build_scattering_demo_mesh(double h, int n_circle, ScatteringMeshInfo* info)
{
  constexpr double radius = 0.3;
  constexpr Vec2 center{3.0, 0.0};
  if (!(h > 0.0))
    throw InvalidGeometry("mesh size h must be positive");
  if (h >= radius)
    throw InvalidGeometry("h = " + std::to_string(h) +
                          " is too large to resolve the hole of radius 0.3 (need h < 0.3)");
  if (n_circle < 8)
    throw InvalidGeometry("the hole boundary needs at least 8 segments");

  int m = 2 * static_cast<int>(std::ceil(1.0 / h - 1e-12));
  m = std::max(m, 2 * static_cast<int>(std::ceil(n_circle / 8.0)));
  const int n = 4 * m;

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 4>> rectangles;
  std::vector<BoundaryTagEntry> tags;

  // rectangles on (0,2)x(-1,1)
  auto rect_id = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i)
      vertices.push_back({grid_coord(0.0, 2.0, i, m), grid_coord(-1.0, 1.0, j, m)});
  for (int j = 0; j < m; ++j)
  {
    for (int i = 0; i < m; ++i)
      rectangles.push_back({rect_id(i, j), rect_id(i + 1, j), rect_id(i + 1, j + 1), rect_id(i, j + 1)});
    tags.push_back({rect_id(0, j), rect_id(0, j + 1), EdgeTag::Left});
  }

  // Outer square of the annulus, walked counterclockwise from (4,0) in lattice
  // coordinates (i, j) in [0, m]^2.
  std::vector<std::pair<int, int>> lattice;
  for (int j = m / 2; j < m; ++j)
    lattice.emplace_back(m, j);
  for (int i = m; i > 0; --i)
    lattice.emplace_back(i, m);
  for (int j = m; j > 0; --j)
    lattice.emplace_back(0, j);
  for (int i = 0; i < m; ++i)
    lattice.emplace_back(i, 0);
  for (int j = 0; j < m / 2; ++j)
    lattice.emplace_back(m, j);

  std::vector<Vec2> outer(n);
  std::vector<Vec2> inner(n);
  for (int k = 0; k < n; ++k)
  {
    const auto [i, j] = lattice[k];
    outer[k] = {grid_coord(2.0, 4.0, i, m), grid_coord(-1.0, 1.0, j, m)};
    const double theta = 2.0 * std::numbers::pi * k / n;
    inner[k] = center + radius * Vec2{std::cos(theta), std::sin(theta)};
  }

  // Radial layers graded geometrically from the polygon spacing to the outer spacing.
  const double d_in = 2.0 * radius * std::sin(std::numbers::pi / n);
  const double d_out = 2.0 / m;
  const double gap = 1.0 - radius;
  const int layers = std::max(2, static_cast<int>(std::lround(gap / (0.5 * (d_in + d_out)))));
  const double q = std::pow(d_out / d_in, 1.0 / (layers - 1));
  std::vector<double> s(layers + 1, 0.0);
  for (int l = 0; l < layers; ++l)
    s[l + 1] = s[l] + std::pow(q, l);
  for (auto& x : s)
    x /= s[layers];

  std::vector<std::vector<int>> ring(layers + 1, std::vector<int>(n));
  for (int l = 0; l <= layers; ++l)
    for (int k = 0; k < n; ++k)
    {
      if (l == layers && lattice[k].first == 0)
      {
        ring[l][k] = rect_id(m, lattice[k].second); // shared with the rectangle block
        continue;
      }
      const Vec2 p = l == layers ? outer[k] : (1.0 - s[l]) * inner[k] + s[l] * outer[k];
      ring[l][k] = static_cast<int>(vertices.size());
      vertices.push_back(p);
    }

  for (int l = 0; l < layers; ++l)
    for (int k = 0; k < n; ++k)
    {
      const int kn = (k + 1) % n;
      const int a = ring[l][k], b = ring[l + 1][k], c = ring[l + 1][kn], d = ring[l][kn];
      if (norm(vertices[c] - vertices[a]) <= norm(vertices[d] - vertices[b]))
      {
        triangles.push_back({a, b, c});
        triangles.push_back({a, c, d});
      }
      else
      {
        triangles.push_back({a, b, d});
        triangles.push_back({b, c, d});
      }
    }
  for (int k = 0; k < n; ++k)
    tags.push_back({ring[0][k], ring[0][(k + 1) % n], EdgeTag::Ball});

  if (info)
    *info = {m, n, layers};
  return HybridMesh::build(std::move(vertices), std::move(triangles), std::move(rectangles), tags);
}

} // namespace yeefem
