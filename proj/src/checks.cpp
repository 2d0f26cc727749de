#include "yeefem/checks.hpp"

#include "yeefem/element.hpp"
#include "yeefem/errors.hpp"
#include "yeefem/quadrature.hpp"
#include "yeefem/timestepping.hpp"
#include "yeefem/verification.hpp"

#include <algorithm>
#include <cmath>

namespace yeefem {

std::array<Vec2, 3> random_shape_regular_triangle(std::mt19937& rng, double min_quality, double scale)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;)
  {
    std::array<Vec2, 3> p{Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)}, Vec2{u(rng), u(rng)}};
    if (signed_area2(p[0], p[1], p[2]) < 0.0)
      std::swap(p[1], p[2]);
    const double a = norm(p[1] - p[2]), b = norm(p[2] - p[0]), c = norm(p[0] - p[1]);
    const double area = 0.5 * signed_area2(p[0], p[1], p[2]);
    const double quality = area > 0.0 ? 8.0 * area * area / ((a + b + c) * a * b * c) : 0.0;
    if (quality < min_quality)
      continue;
    const Vec2 shift{5.0 * u(rng), 5.0 * u(rng)};
    for (auto& q : p)
      q = scale * (q + shift);
    return p;
  }
}

BoundingBox random_rectangle(std::mt19937& rng)
{
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> side(0.01, 3.0);
  const Vec2 lo{u(rng), u(rng)};
  return {lo, lo + Vec2{side(rng), side(rng)}};
}

namespace {

template <std::size_t N>
void record(DiagonalityReport& r, const LocalMatrix<N>& m)
{
  double max_diag = 0.0, min_diag = INFINITY, off = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
    {
      if (i == j)
      {
        max_diag = std::max(max_diag, m[i][i]);
        min_diag = std::min(min_diag, m[i][i]);
      }
      else
        off = std::max(off, std::abs(m[i][j]));
    }
  const double off_ratio = max_diag > 0.0 ? off / max_diag : INFINITY;
  const double diag_ratio = max_diag > 0.0 ? min_diag / max_diag : 0.0;
  const bool first = r.triangles + r.rectangles + r.mesh_elements == 0;
  r.worst_off_diagonal = std::max(r.worst_off_diagonal, off_ratio);
  r.min_diagonal = first ? diag_ratio : std::min(r.min_diagonal, diag_ratio);
}

struct StandingModeSystem
{
  DiagonalOperator m;
  SparseOperator k;
  std::vector<double> e0;
};

StandingModeSystem standing_mode_system(const HybridMesh& mesh)
{
  const auto dofs = build_dof_map(mesh, std::vector<int>{});
  const auto s = standing_mode_solution();
  return {assemble_mass(mesh, dofs), assemble_stiffness(mesh, dofs),
          project_pi_h(mesh, dofs, [&](const Vec2& p) { return s.e(p, 0.0); })};
}

double max_abs(const std::vector<double>& v)
{
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

} // namespace

DiagonalityReport mass_diagonality(int samples, unsigned seed, const HybridMesh* mesh)
{
  DiagonalityReport r;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  for (int i = 0; i < samples; ++i)
  {
    record(r, lumped_mass_matrix(TriangleBasis(random_shape_regular_triangle(rng, 0.2, scale(rng)))));
    ++r.triangles;
  }
  for (int i = 0; i < samples; ++i)
  {
    record(r, lumped_mass_matrix(RectangleBasis(random_rectangle(rng))));
    ++r.rectangles;
  }
  if (mesh)
    for (int el = 0; el < mesh->num_elements(); ++el)
    {
      const auto basis = ElementBasis::of(*mesh, el);
      if (const auto* t = basis.triangle())
        record(r, lumped_mass_matrix(*t));
      else
        record(r, lumped_mass_matrix(*basis.rectangle()));
      ++r.mesh_elements;
    }
  return r;
}

ExactnessReport quadrature_exactness(int samples, unsigned seed)
{
  ExactnessReport r;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<Vec2, 3>> triangles{{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}};
  std::vector<BoundingBox> boxes{{{0, 0}, {1, 1}}};
  for (int i = 0; i < samples; ++i)
  {
    // shape-regular triangles scaled into the unit square
    auto t = random_shape_regular_triangle(rng, 0.2, 1.0);
    Vec2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
    for (const auto& p : t)
    {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double s = std::max(hi.x - lo.x, hi.y - lo.y);
    for (auto& p : t)
      p = (1.0 / s) * (p - lo);
    triangles.push_back(t);

    const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    if (x0 != x1 && y0 != y1)
      boxes.push_back({{std::min(x0, x1), std::min(y0, y1)}, {std::max(x0, x1), std::max(y0, y1)}});
  }
  for (const auto& t : triangles)
    for (int degree = 0; degree <= 2; ++degree)
      r.triangle_error = std::max(r.triangle_error, check_quadrature_exactness(t, degree));
  for (const auto& b : boxes)
    for (int degree = 0; degree <= 1; ++degree)
      r.rectangle_error = std::max(r.rectangle_error, check_quadrature_exactness(b, degree));

  // the lumped rule for the first component samples y = 0 and y = 1 only
  const auto rule = lumping_rule(BoundingBox{{0, 0}, {1, 1}});
  double q = 0.0;
  for (const auto& p : rule.first)
    q += p.weight * p.point.y * p.point.y;
  r.rectangle_y2_error = std::abs(q - monomial_integral(BoundingBox{{0, 0}, {1, 1}}, 0, 2));
  return r;
}

EnergyReport energy_drift(const HybridMesh& mesh, long steps, double safety)
{
  const auto sys = standing_mode_system(mesh);
  const auto eig = estimate_max_eigenvalue(sys.m, sys.k);
  EnergyReport r;
  r.dt = cfl_timestep(eig.lambda, safety);
  const std::vector<double> zero(sys.e0.size(), 0.0);
  auto st = leapfrog_init(sys.e0, zero, r.dt, sys.m, sys.k, {});
  r.initial_energy = discrete_energy(st, sys.m, sys.k);
  while (st.n < steps)
  {
    leapfrog_step(st, sys.m, sys.k);
    const double e = discrete_energy(st, sys.m, sys.k);
    r.relative_drift = std::max(r.relative_drift, std::abs(e - r.initial_energy) / r.initial_energy);
  }
  r.steps = st.n;
  return r;
}

GrowthReport instability_growth(const HybridMesh& mesh, long max_steps, double safety, double threshold)
{
  const auto sys = standing_mode_system(mesh);
  const auto eig = estimate_max_eigenvalue(sys.m, sys.k);
  const double dt = cfl_timestep(eig.lambda, safety);
  const std::vector<double> zero(sys.e0.size(), 0.0);
  const double start = max_abs(sys.e0);
  GrowthReport r{1};
  auto st = leapfrog_init(sys.e0, zero, dt, sys.m, sys.k, {});
  try
  {
    while (st.n < max_steps)
    {
      leapfrog_step(st, sys.m, sys.k);
      r.steps = st.n;
      r.growth = max_abs(st.e_curr) / start;
      if (r.growth > threshold)
      {
        r.threshold_step = st.n;
        break;
      }
    }
  }
  catch (const BlowUpError& e)
  {
    r.overflowed = true;
    r.steps = e.step();
    r.growth = INFINITY;
    r.threshold_step = e.step();
  }
  return r;
}

} // namespace yeefem
