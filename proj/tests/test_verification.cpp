#include "doctest.h"

#include "yeefem/errors.hpp"
#include "yeefem/verification.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace yeefem;

namespace {

constexpr double pi = std::numbers::pi;

SpaceField at_zero(const SpaceTimeField& f)
{
  return [f](const Vec2& p) { return f(p, 0.0); };
}

} // namespace

TEST_CASE("standing mode")
{
  const auto s = standing_mode_solution();
  const auto r = check_exact_solution(s);
  CHECK(r.pde_residual <= 1e-4);
  CHECK(r.curl_mismatch <= 1e-4);
  CHECK(r.rate_mismatch <= 1e-4);
  CHECK_FALSE(s.f);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i)
  {
    const double a = u(rng), t = u(rng);
    for (const Vec2 p : {Vec2{0, a}, Vec2{1, a}, Vec2{a, 0}, Vec2{a, 1}})
      CHECK(std::abs(s.curl_e(p, t)) <= 1e-13);
    const Vec2 p{u(rng), u(rng)};
    const Vec2 e = s.e(p, t);
    const Vec2 swapped = s.e({p.y, p.x}, t);
    CHECK(swapped.x == doctest::Approx(-e.y));
    CHECK(swapped.y == doctest::Approx(-e.x));
    CHECK(norm(s.dt_e(p, 0.0)) == 0.0);
  }

  SUBCASE("a mistyped frequency is caught before a study runs")
  {
    auto wrong = s;
    wrong.e = [](const Vec2& p, double t) {
      return std::cos(pi * t) * Vec2{pi * std::sin(pi * p.x) * std::cos(pi * p.y), -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
    };
    CHECK(check_exact_solution(wrong).pde_residual > 1.0);
    CHECK_THROWS_AS(convergence_study(wrong, MeshFamily::Rect), Error);
  }
}

TEST_CASE("error norms")
{
  for (auto family : {MeshFamily::Rect, MeshFamily::Tri, MeshFamily::Hybrid})
  {
    const auto mesh = family_mesh(family, 4);
    const auto dofs = build_dof_map(mesh, std::vector<int>{});

    // a field in the discrete space: constant plus rotation
    ExactSolution linear;
    linear.e = [](const Vec2& p, double) { return Vec2{0.5 - p.y, 2.0 + p.x}; };
    linear.dt_e = [](const Vec2&, double) { return Vec2{}; };
    linear.curl_e = [](const Vec2&, double) { return 2.0; };
    FieldState st;
    st.e_curr = project_pi_h(mesh, dofs, at_zero(linear.e));
    st.e_prev = st.e_curr;
    st.dt = 0.1;
    st.n = 3;
    const auto err = l2_errors(mesh, dofs, st, linear);
    CHECK(err.err_E <= 1e-12);
    CHECK(err.err_curl <= 1e-12);
    CHECK(err.err_dtE == 0.0);

    const auto c = project_pi_h(mesh, dofs, [](const Vec2&) { return Vec2{1.5, -0.5}; });
    CHECK(l2_error(mesh, dofs, c, [](const Vec2&) { return Vec2{1.5, -0.5}; }) <= 1e-12);

    // non-zero error agrees with a direct evaluation for a shifted field
    const double shift = l2_error(mesh, dofs, c, [](const Vec2&) { return Vec2{1.5, 0.5}; });
    CHECK(shift == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rates")
{
  CHECK(observed_rate(1.0, 0.5) == doctest::Approx(1.0));
  CHECK(observed_rate(1.0, 0.25) == doctest::Approx(2.0));
  CHECK(std::isnan(observed_rate(0.0, 1.0)));
  RateTable t{{0.1, 0.05, 0.025}, {1.0, 0.4, 0.2}};
  CHECK(t.finest_rate() == doctest::Approx(1.0));
  CHECK(t.min_rate() == doctest::Approx(1.0));
  CHECK(parse_mesh_family("hybrid") == MeshFamily::Hybrid);
  CHECK_THROWS_AS(parse_mesh_family("quad"), ConfigError);
}

TEST_CASE("convergence of the standing mode")
{
  const auto s = standing_mode_solution();
  std::array<ConvergenceReport, 3> reports;
  int i = 0;
  for (auto family : {MeshFamily::Rect, MeshFamily::Tri, MeshFamily::Hybrid})
  {
    auto& rep = reports[i++];
    rep = convergence_study(s, family);
    REQUIRE(rep.levels.size() == 4);
    CHECK(rep.levels[0].cells == 8);
    CHECK_FALSE(rep.non_monotone);
    for (std::size_t l = 1; l < rep.levels.size(); ++l)
    {
      MESSAGE(to_string(family) << " level " << l << ": rate dtE " << rep.rate_dtE(l) << ", curl "
                                << rep.rate_curl(l));
      CHECK(rep.levels[l].h == doctest::Approx(0.5 * rep.levels[l - 1].h));
    }
    CHECK(rep.rate_dtE(3) >= 0.9);
    CHECK(rep.rate_curl(3) >= 0.9);
  }
  // no error jump of the hybrid family against the single-type families
  for (std::size_t l = 0; l < 4; ++l)
  {
    const auto& hyb = reports[2].levels[l];
    for (int k = 0; k < 2; ++k)
    {
      CHECK(hyb.err_curl <= 3.0 * reports[k].levels[l].err_curl);
      CHECK(hyb.err_dtE <= 3.0 * reports[k].levels[l].err_dtE);
    }
  }
}

TEST_CASE("staggered-grid equivalence")
{
  const auto r = yee_equivalence_check(4, 4, 0.25);
  CHECK_FALSE(r.vacuous);
  CHECK(r.interior_dofs == 2 * 4 * 3);
  CHECK(r.samples == 50);
  CHECK(r.max_deviation <= 1e-12);

  CHECK(yee_equivalence_check(8, 8, 0.125).max_deviation <= 1e-12);
  CHECK(yee_equivalence_check(6, 3, 0.3).max_deviation <= 1e-12);

  const auto single = yee_equivalence_check(1, 1, 1.0);
  CHECK(single.vacuous);
  CHECK(single.interior_dofs == 0);

  SUBCASE("moving one grid line breaks the equivalence")
  {
    const int n = 4;
    const double h = 0.25;
    const auto base = build_structured_rect_mesh(n, n, {{0, 0}, {1, 1}});
    auto vertices = base.vertices();
    for (auto& v : vertices)
      if (std::abs(v.x - 2 * h) < 1e-12)
        v.x += 0.3 * h;
    std::vector<BoundaryTagEntry> tags;
    for (int e : base.edges_with_tag(EdgeTag::Left))
      tags.push_back({base.edges()[e].v0, base.edges()[e].v1, EdgeTag::Left});
    const auto moved = HybridMesh::build(vertices, {}, base.rectangles(), tags);
    CHECK(yee_equivalence_check(moved, n, n, h).max_deviation > 1e-3);
  }
}

TEST_CASE("interface reflection")
{
  std::vector<ReflectionResult> results;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32})
  {
    results.push_back(interface_reflection_test(h));
    const auto& r = results.back();
    MESSAGE("h = " << r.h << ": ratio " << r.ratio << ", baseline " << r.baseline);
    CHECK(r.total_energy > 0.0);
    CHECK(r.ratio - r.baseline >= 0.0);
  }
  CHECK(results[1].ratio < results[0].ratio);
  CHECK(results[2].ratio < results[1].ratio);

  ReflectionSetup early;
  early.t_measure = 3.0;
  CHECK_THROWS_AS(interface_reflection_test(0.125, early), Error);
  ReflectionSetup late;
  late.t_measure = 6.5;
  CHECK_THROWS_AS(interface_reflection_test(0.125, late), Error);
}

TEST_CASE("quadrature error functional")
{
  const auto s = standing_mode_solution();
  const auto mesh = family_mesh(MeshFamily::Hybrid, 6);
  const auto dofs = build_dof_map(mesh, std::vector<int>{});
  CHECK(quadrature_error_functional(mesh, dofs, [](const Vec2&) { return Vec2{0.3, -1.1}; }) <= 1e-12);

  const auto e = at_zero(s.e);
  const double base = quadrature_error_functional(mesh, dofs, e);
  const double scaled = quadrature_error_functional(mesh, dofs, [&](const Vec2& p) { return -2.5 * e(p); });
  CHECK(base > 0.0);
  CHECK(scaled == doctest::Approx(2.5 * base).epsilon(1e-14));

  for (auto family : {MeshFamily::Rect, MeshFamily::Tri, MeshFamily::Hybrid})
  {
    const auto table = quadrature_error_rates(e, family);
    MESSAGE(to_string(family) << ": sigma rate " << table.finest_rate() << " (min " << table.min_rate() << ")");
    CHECK(table.min_rate() >= 0.9);
  }
}

TEST_CASE("interpolation rates")
{
  const auto s = standing_mode_solution();
  for (auto family : {MeshFamily::Rect, MeshFamily::Tri, MeshFamily::Hybrid})
  {
    const auto r = interpolation_rates(at_zero(s.e), [&](const Vec2& p) { return s.curl_e(p, 0.0); }, family);
    CHECK(r.pi_h_l2.min_rate() >= 0.9);
    CHECK(r.pi_h_curl.min_rate() >= 0.9);
    CHECK(r.pi0_l2.min_rate() >= 0.9);
  }
}
