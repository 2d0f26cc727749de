#include "doctest.h"

#include "yeefem/errors.hpp"
#include "yeefem/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

using namespace yeefem;

namespace {

const BoundingBox unit_box{{0.0, 0.0}, {1.0, 1.0}};

/// Checks the sign convention against geometry: for every element and local
/// edge, sign * global tangent equals the locally oriented tangent.
void check_local_orientation(const HybridMesh& mesh)
{
  const auto& v = mesh.vertices();
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto& tri = mesh.triangles()[t];
    for (int k = 0; k < 3; ++k)
    {
      const Vec2 local = v[tri[(k + 2) % 3]] - v[tri[(k + 1) % 3]];
      const int e = mesh.triangle_edges(t)[k];
      const Vec2 global = v[mesh.edges()[e].v1] - v[mesh.edges()[e].v0];
      CHECK(dot(local, global) * mesh.triangle_signs(t)[k] > 0.0);
    }
  }
  for (int r = 0; r < mesh.num_rectangles(); ++r)
    for (int k = 0; k < 4; ++k)
    {
      const int e = mesh.rectangle_edges(r)[k];
      const Vec2 axis = k % 2 == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
      const Vec2 global = v[mesh.edges()[e].v1] - v[mesh.edges()[e].v0];
      CHECK(dot(axis, global) * mesh.rectangle_signs(r)[k] > 0.0);
    }
}

double polygon_area(int n, double r) { return 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n); }

} // namespace

TEST_CASE("structured rectangle mesh counts")
{
  auto m1 = build_structured_rect_mesh(1, 1, unit_box);
  CHECK(m1.num_rectangles() == 1);
  CHECK(m1.num_edges() == 4);
  CHECK(m1.num_vertices() == 4);

  auto m2 = build_structured_rect_mesh(2, 2, unit_box);
  CHECK(m2.num_rectangles() == 4);
  CHECK(m2.num_edges() == 12);
  CHECK(m2.num_vertices() == 9);

  for (int nx : {1, 3, 5})
    for (int ny : {1, 2, 4})
    {
      auto m = build_structured_rect_mesh(nx, ny, {{-1.0, 2.0}, {3.0, 2.5}});
      CHECK(m.num_edges() == nx * (ny + 1) + ny * (nx + 1));
      check_local_orientation(m);
    }

  CHECK_THROWS_AS(build_structured_rect_mesh(0, 1, unit_box), InvalidGeometry);
  CHECK_THROWS_AS(build_structured_rect_mesh(1, 1, {{0.0, 0.0}, {0.0, 1.0}}), InvalidGeometry);
}

TEST_CASE("structured triangle mesh counts")
{
  auto m1 = build_structured_tri_mesh(1, 1, unit_box);
  CHECK(m1.num_triangles() == 2);
  CHECK(m1.num_edges() == 5);

  for (auto split : {SplitDirection::Diagonal, SplitDirection::AntiDiagonal, SplitDirection::Alternating})
  {
    auto m = build_structured_tri_mesh(2, 2, unit_box, split);
    CHECK(m.num_triangles() == 8);
    CHECK(m.num_edges() == 2 * 3 + 2 * 3 + 4);
    check_local_orientation(m);
  }
  CHECK_THROWS_AS(build_structured_tri_mesh(2, -1, unit_box), InvalidGeometry);
}

TEST_CASE("hybrid unit-square mesh has interface edges")
{
  auto m = build_structured_hybrid_mesh(4, 4, unit_box, 2);
  CHECK(m.num_rectangles() == 8);
  CHECK(m.num_triangles() == 16);
  const auto iface = m.edges_with_tag(EdgeTag::Interface);
  CHECK(iface.size() == 4);
  for (int e : iface)
    CHECK(std::abs(m.edge_midpoint(e).x - 0.5) < 1e-14);
  check_local_orientation(m);
  const auto stats = validate_mesh(m);
  CHECK(std::abs(stats.total_area - 1.0) < 1e-12);
}

TEST_CASE("validate_mesh statistics")
{
  auto rect = build_structured_rect_mesh(4, 4, unit_box);
  auto stats = validate_mesh(rect);
  CHECK(stats.min_rectangle_aspect == doctest::Approx(1.0));
  CHECK(stats.h_max == doctest::Approx(0.25));
  CHECK(stats.h_min == doctest::Approx(0.25));
  CHECK(stats.quasi_uniformity == doctest::Approx(1.0));

  auto tri = build_structured_tri_mesh(3, 5, {{0.0, 0.0}, {3.0, 2.0}});
  stats = validate_mesh(tri);
  CHECK(stats.h_max >= stats.h_min);
  CHECK(stats.h_min > 0.0);
  CHECK(std::abs(stats.total_area - 6.0) < 1e-12 * 6.0);
  CHECK(stats.min_triangle_quality > 0.0);
  CHECK(stats.min_triangle_quality <= 0.5);
}

TEST_CASE("invalid meshes are rejected")
{
  const std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

  SUBCASE("flipped rectangle")
  {
    CHECK_THROWS_AS(HybridMesh::build(square, {}, {{0, 3, 2, 1}}), InvalidGeometry);
  }
  SUBCASE("inverted triangle")
  {
    CHECK_THROWS_AS(HybridMesh::build(square, {{0, 2, 1}}, {}), InvalidGeometry);
  }
  SUBCASE("repeated vertex")
  {
    CHECK_THROWS_AS(HybridMesh::build(square, {}, {{0, 1, 1, 3}}), ValidationError);
  }
  SUBCASE("non axis-aligned quad")
  {
    const std::vector<Vec2> skew{{0, 0}, {1, 0.1}, {1, 1}, {0, 1}};
    CHECK_THROWS_AS(HybridMesh::build(skew, {}, {{0, 1, 2, 3}}), InvalidGeometry);
  }
  SUBCASE("hanging node at the triangle-rectangle interface")
  {
    // rectangle [0,1]^2 next to triangles that split x = 1 at (1, 0.5)
    std::vector<Vec2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 1}, {1, 0.5}};
    std::vector<std::array<int, 3>> tris{{1, 4, 6}, {6, 4, 5}, {6, 5, 2}};
    try
    {
      HybridMesh::build(v, tris, {{0, 1, 2, 3}});
      FAIL("expected a conformity error");
    }
    catch (const ValidationError& e)
    {
      const std::string msg = e.what();
      CHECK(msg.find("hanging node 6") != std::string::npos);
      CHECK(msg.find("edge (1,2)") != std::string::npos);
    }
  }
  SUBCASE("edge shared by three elements")
  {
    std::vector<Vec2> v{{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 2}};
    CHECK_THROWS_AS(HybridMesh::build(v, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}, {}), Error);
  }
  SUBCASE("tag on an interior edge")
  {
    std::vector<Vec2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK_THROWS_AS(HybridMesh::build(v, {{0, 1, 2}, {0, 2, 3}}, {}, {{0, 2, EdgeTag::Ball}}),
                    ValidationError);
  }
}

TEST_CASE("perturbing any interface vertex is detected")
{
  const auto mesh = build_structured_hybrid_mesh(4, 4, unit_box, 2);
  for (int e : mesh.edges_with_tag(EdgeTag::Interface))
    for (int v : {mesh.edges()[e].v0, mesh.edges()[e].v1})
    {
      auto vertices = mesh.vertices();
      vertices[v].x += 1e-3;
      CHECK_THROWS_AS(HybridMesh::build(vertices, mesh.triangles(), mesh.rectangles()), InvalidGeometry);
    }
}

TEST_CASE("interior edges: orientation flips exactly when signs differ")
{
  const auto mesh = build_scattering_demo_mesh(0.2, 16);
  const auto& v = mesh.vertices();
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    if (mesh.is_boundary_edge(e))
      continue;
    std::array<Vec2, 2> local_dir;
    std::array<int, 2> local_sign;
    for (int s = 0; s < 2; ++s)
    {
      const int el = mesh.edge_elements(e)[s];
      const auto edges = mesh.element_edges(el);
      const auto signs = mesh.element_signs(el);
      for (std::size_t k = 0; k < edges.size(); ++k)
        if (edges[k] == e)
        {
          local_sign[s] = signs[k];
          if (mesh.element_kind(el) == ElementKind::Triangle)
          {
            const auto& tri = mesh.triangles()[el];
            local_dir[s] = v[tri[(k + 2) % 3]] - v[tri[(k + 1) % 3]];
          }
          else
          {
            local_dir[s] = k % 2 == 0 ? Vec2{1, 0} : Vec2{0, 1};
          }
        }
    }
    const bool opposite = dot(local_dir[0], local_dir[1]) < 0.0;
    CHECK(opposite == (local_sign[0] != local_sign[1]));
  }
}

TEST_CASE("boundary orientation keeps the domain on the left")
{
  for (const auto& mesh : {build_structured_hybrid_mesh(3, 2, unit_box, 1),
                           build_scattering_demo_mesh(0.25, 8)})
    for (int e = 0; e < mesh.num_edges(); ++e)
    {
      if (!mesh.is_boundary_edge(e))
        continue;
      const Vec2 t = static_cast<double>(mesh.boundary_orientation(e)) * mesh.edge_tangent(e);
      const Vec2 inward = perp(t);
      const Vec2 c = mesh.element_centroid(mesh.edge_elements(e)[0]);
      CHECK(dot(c - mesh.edge_midpoint(e), inward) > 0.0);
    }
}

TEST_CASE("scattering demo mesh")
{
  ScatteringMeshInfo info{};
  const auto mesh = build_scattering_demo_mesh(0.1, 16, &info);
  CHECK(info.cells_per_unit_side == 20);
  CHECK(info.circle_segments == 80);
  const auto stats = validate_mesh(mesh);
  CHECK(stats.quasi_uniformity >= 1.0);
  CHECK(stats.min_triangle_quality > 0.1);
  CHECK(stats.num_rectangles == 400);

  const double area = 8.0 - polygon_area(info.circle_segments, 0.3);
  CHECK(std::abs(stats.total_area - area) <= 1e-12 * area);

  int left = 0, ball = 0, other = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const auto tag = mesh.edge_tag(e);
    const Vec2 a = mesh.vertices()[mesh.edges()[e].v0];
    const Vec2 b = mesh.vertices()[mesh.edges()[e].v1];
    CHECK(mesh.is_boundary_edge(e) == is_boundary_tag(tag));
    switch (tag)
    {
    case EdgeTag::Left:
      ++left;
      CHECK(a.x == 0.0);
      CHECK(b.x == 0.0);
      break;
    case EdgeTag::Ball:
      ++ball;
      CHECK(std::abs(norm(a - Vec2{3, 0}) - 0.3) < 1e-12);
      CHECK(std::abs(norm(b - Vec2{3, 0}) - 0.3) < 1e-12);
      break;
    case EdgeTag::Other:
      ++other;
      break;
    case EdgeTag::Interface:
      CHECK(std::abs(a.x - 2.0) <= 1e-12);
      CHECK(std::abs(b.x - 2.0) <= 1e-12);
      break;
    case EdgeTag::Interior:
      break;
    }
  }
  CHECK(left == 20);
  CHECK(ball == 80);
  // top and bottom of both blocks plus the right side
  CHECK(other == 5 * 20);
  CHECK(mesh.edges_with_tag(EdgeTag::Interface).size() == 20);

  CHECK_THROWS_AS(build_scattering_demo_mesh(0.3, 16), InvalidGeometry);
  CHECK_THROWS_AS(build_scattering_demo_mesh(0.1, 4), InvalidGeometry);

  ScatteringMeshInfo fine{};
  build_scattering_demo_mesh(0.2, 200, &fine);
  CHECK(fine.circle_segments >= 200);
}

TEST_CASE("mesh file round trip")
{
  const auto dir = std::filesystem::temp_directory_path();
  for (const auto& mesh : {build_structured_rect_mesh(2, 2, unit_box),
                           build_structured_hybrid_mesh(4, 3, {{-1, -1}, {1, 0.5}}, 2, SplitDirection::Alternating),
                           build_scattering_demo_mesh(0.25, 12)})
  {
    const auto path = dir / "yeefem_roundtrip.mesh";
    write_mesh(mesh, path);
    const auto back = read_mesh(path);
    CHECK(back == mesh);
    std::filesystem::remove(path);
  }
}

TEST_CASE("mesh parse errors")
{
  SUBCASE("rectangle with three vertices")
  {
    const std::string text = "# comment\n$Vertices\n4\n0 0\n1 0\n1 1\n0 1\n$Rectangles\n1\n0 1 2\n";
    try
    {
      parse_mesh(text);
      FAIL("expected parse error");
    }
    catch (const ParseError& e)
    {
      CHECK(e.line() == 10);
    }
  }
  SUBCASE("duplicate edge in one element")
  {
    const std::string text = "$Vertices\n4\n0 0\n1 0\n1 1\n0 1\n$Rectangles\n1\n0 1 2 1\n";
    CHECK_THROWS_AS(parse_mesh(text), ValidationError);
  }
  SUBCASE("bad number and unknown tag")
  {
    CHECK_THROWS_AS(parse_mesh("$Vertices\n1\n0 x\n"), ParseError);
    CHECK_THROWS_AS(parse_mesh("$Vertices\n3\n0 0\n1 0\n0 1\n$Triangles\n1\n0 1 2\n$BoundaryTags\n1\n0 1 top\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_mesh("$Vertices\n3\n0 0\n1 0\n0 1\n$Triangles\n1\n0 1 7\n"), ParseError);
  }
  SUBCASE("inline comments and explicit tags")
  {
    const auto mesh = parse_mesh(
      "$Vertices\n3 # three\n0 0\n1 0\n0 1\n$Triangles\n1\n0 1 2\n$BoundaryTags\n1\n2 0 left\n");
    CHECK(mesh.edge_tag(mesh.find_edge(0, 2)) == EdgeTag::Left);
    CHECK(mesh.edge_tag(mesh.find_edge(0, 1)) == EdgeTag::Other);
  }
}
