#include "doctest.h"

#include "test_util.hpp"

#include "yeefem/checks.hpp"
#include "yeefem/verification.hpp"

using namespace yeefem;

TEST_CASE("random element generators")
{
  std::mt19937 rng(21);
  for (int i = 0; i < 500; ++i)
  {
    const auto t = random_shape_regular_triangle(rng, 0.3, 2.0);
    CHECK(signed_area2(t[0], t[1], t[2]) > 0.0);
    CHECK(testing::inradius_over_circumradius(t) >= 0.3 - 1e-12);
    const auto b = random_rectangle(rng);
    CHECK(b.hi.x - b.lo.x >= 0.01);
    CHECK(b.hi.y - b.lo.y >= 0.01);
  }
}

TEST_CASE("diagonality and exactness reports")
{
  const auto mesh = family_mesh(MeshFamily::Hybrid, 4);
  const auto d = mass_diagonality(50, 1, &mesh);
  CHECK(d.triangles == 50);
  CHECK(d.rectangles == 50);
  CHECK(d.mesh_elements == mesh.num_elements());
  CHECK(d.passed());
  // local triangle diagonal |K|/(3|e|^2): the ratio min/max is at least (shortest/longest edge)^2
  CHECK(d.min_diagonal > 0.0);
  CHECK(d.min_diagonal <= 1.0);

  const auto e = quadrature_exactness(20);
  CHECK(e.passed());
  CHECK(e.rectangle_y2_error == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("energy drift and growth reports")
{
  const auto mesh = family_mesh(MeshFamily::Hybrid, 8);
  const auto stable = energy_drift(mesh, 300, 0.9);
  CHECK(stable.steps == 300);
  CHECK(stable.initial_energy > 0.0);
  CHECK(stable.relative_drift <= 1e-10);

  const auto unstable = instability_growth(mesh, 2000, 1.2);
  CHECK(unstable.growth > 1e3);
  CHECK(unstable.threshold_step > 0);
  CHECK(unstable.threshold_step <= 2000);

  const auto capped = instability_growth(mesh, 3, 0.9);
  CHECK(capped.steps == 3);
  CHECK(capped.threshold_step == -1);
  CHECK(capped.growth < 2.0);
}
