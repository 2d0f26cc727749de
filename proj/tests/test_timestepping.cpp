#include "doctest.h"

#include "yeefem/errors.hpp"
#include "yeefem/timestepping.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace yeefem;

namespace {

const BoundingBox unit_square{{0, 0}, {1, 1}};
constexpr double pi = std::numbers::pi;

struct System
{
  HybridMesh mesh;
  DofMap dofs;
  DiagonalOperator m;
  SparseOperator k;
};

System make_system(HybridMesh mesh, std::vector<int> essential = {})
{
  auto dofs = build_dof_map(mesh, essential);
  auto m = assemble_mass(mesh, dofs);
  auto k = assemble_stiffness(mesh, dofs);
  return {std::move(mesh), std::move(dofs), std::move(m), std::move(k)};
}

Eigen::MatrixXd dense(const SparseOperator& op)
{
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(op.size(), op.size());
  for (int r = 0; r < op.size(); ++r)
    for (int p = op.row_offsets()[r]; p < op.row_offsets()[r + 1]; ++p)
      d(r, op.columns()[p]) = op.values()[p];
  return d;
}

/// Eigenvalues of M^{-1} K through the symmetric form M^{-1/2} K M^{-1/2}.
Eigen::VectorXd dense_spectrum(const DiagonalOperator& m, const SparseOperator& k)
{
  Eigen::VectorXd s(m.size());
  for (int i = 0; i < m.size(); ++i)
    s(i) = 1.0 / std::sqrt(m[i]);
  const Eigen::MatrixXd a = s.asDiagonal() * dense(k) * s.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
}

std::vector<double> random_vector(std::mt19937& rng, int n)
{
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v)
    x = g(rng);
  return v;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

Vec2 standing_mode(const Vec2& p)
{
  return {pi * std::sin(pi * p.x) * std::cos(pi * p.y), -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
}

} // namespace

TEST_CASE("maximum eigenvalue estimate")
{
  SUBCASE("K = 0")
  {
    const auto est = estimate_max_eigenvalue(DiagonalOperator({1.0, 2.0, 3.0}), SparseOperator::from_triplets(3, {}));
    CHECK(est.lambda == 0.0);
    CHECK(est.converged);
  }
  SUBCASE("single unit square against a dense eigensolve")
  {
    const auto s = make_system(build_structured_rect_mesh(1, 1, unit_square));
    const auto est = estimate_max_eigenvalue(s.m, s.k);
    CHECK(est.converged);
    CHECK(est.lambda == doctest::Approx(dense_spectrum(s.m, s.k).maxCoeff()).epsilon(1e-6));
  }
  SUBCASE("uniform rectangle grid is close to 8 / h^2")
  {
    const int n = 8;
    const double h = 1.0 / n;
    const auto s = make_system(build_structured_rect_mesh(n, n, unit_square));
    const double dense_max = dense_spectrum(s.m, s.k).maxCoeff();
    const auto est = estimate_max_eigenvalue(s.m, s.k);
    CHECK(est.converged);
    CHECK(est.lambda == doctest::Approx(dense_max).epsilon(1e-3));
    CHECK(dense_max <= 8.0 / (h * h) * (1.0 + 1e-12));
    CHECK(dense_max >= 0.95 * 8.0 / (h * h));
  }
  SUBCASE("hybrid mesh")
  {
    const auto s = make_system(build_structured_hybrid_mesh(6, 6, unit_square, 3));
    const double dense_max = dense_spectrum(s.m, s.k).maxCoeff();
    const auto est = estimate_max_eigenvalue(s.m, s.k);
    CHECK(est.lambda <= dense_max * (1.0 + 1e-12));
    CHECK(est.lambda == doctest::Approx(dense_max).epsilon(1e-3));
  }
}

TEST_CASE("cfl time step")
{
  CHECK(cfl_timestep(4.0, 1.0) == 1.0);
  CHECK(cfl_timestep(4.0, 0.5) == 0.5);
  CHECK_THROWS_AS(cfl_timestep(0.0, 1.0), Error);
  CHECK_THROWS_AS(cfl_timestep(-1.0, 1.0), Error);
}

TEST_CASE("leapfrog start and step")
{
  const auto s = make_system(build_structured_hybrid_mesh(3, 3, unit_square, 1));
  const int n = s.dofs.num_dofs();
  const std::vector<double> zero(n, 0.0);

  SUBCASE("equilibrium and zero data")
  {
    // a discrete gradient is in the kernel of K
    std::vector<double> phi(s.mesh.num_vertices());
    for (int v = 0; v < s.mesh.num_vertices(); ++v)
      phi[v] = std::sin(3.0 * s.mesh.vertices()[v].x) + s.mesh.vertices()[v].y;
    const auto g = discrete_gradient(s.mesh, s.dofs, phi);
    const auto st = leapfrog_init(g, zero, 0.01, s.m, s.k, {});
    CHECK(rel_diff(st.e_curr, st.e_prev) < 1e-12);

    auto z = leapfrog_init(zero, zero, 0.01, s.m, s.k, zero);
    for (int i = 0; i < 50; ++i)
      leapfrog_step(z, s.m, s.k);
    CHECK(z.n == 51);
    CHECK(z.t() == doctest::Approx(0.51));
    CHECK(std::all_of(z.e_curr.begin(), z.e_curr.end(), [](double x) { return x == 0.0; }));
    CHECK(discrete_energy(z, s.m, s.k) == 0.0);
  }

  SUBCASE("Taylor start error is third order in dt")
  {
    std::mt19937 rng(3);
    const auto e0 = random_vector(rng, n);
    const auto e1 = random_vector(rng, n);
    // exact semi-discrete solution through the eigendecomposition of M^{-1/2} K M^{-1/2}
    Eigen::VectorXd sq(n), isq(n);
    for (int i = 0; i < n; ++i)
    {
      sq(i) = std::sqrt(s.m[i]);
      isq(i) = 1.0 / sq(i);
    }
    const Eigen::MatrixXd a = isq.asDiagonal() * dense(s.k) * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    auto exact = [&](double t) {
      const Eigen::VectorXd y0 = sq.asDiagonal() * Eigen::Map<const Eigen::VectorXd>(e0.data(), n);
      const Eigen::VectorXd y1 = sq.asDiagonal() * Eigen::Map<const Eigen::VectorXd>(e1.data(), n);
      Eigen::VectorXd c0 = eig.eigenvectors().transpose() * y0;
      Eigen::VectorXd c1 = eig.eigenvectors().transpose() * y1;
      for (int i = 0; i < n; ++i)
      {
        const double w = std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
        c0(i) = c0(i) * std::cos(w * t) + (w > 1e-12 ? c1(i) * std::sin(w * t) / w : c1(i) * t);
      }
      return Eigen::VectorXd(isq.asDiagonal() * (eig.eigenvectors() * c0));
    };
    double previous = 0.0;
    for (double dt : {2e-3, 1e-3, 5e-4})
    {
      const auto st = leapfrog_init(e0, e1, dt, s.m, s.k, {});
      const Eigen::VectorXd err = Eigen::Map<const Eigen::VectorXd>(st.e_curr.data(), n) - exact(dt);
      if (previous > 0.0)
      {
        const double order = std::log2(previous / err.norm());
        MESSAGE("Taylor start order " << order);
        CHECK(order == doctest::Approx(3.0).epsilon(0.05));
      }
      previous = err.norm();
    }
  }

  SUBCASE("one step equals the dense computation on a 12-DOF mesh")
  {
    const auto r = make_system(build_structured_rect_mesh(2, 2, unit_square));
    REQUIRE(r.dofs.num_dofs() == 12);
    std::mt19937 rng(4);
    FieldState st;
    st.e_prev = random_vector(rng, 12);
    st.e_curr = random_vector(rng, 12);
    st.dt = 0.07;
    st.n = 5;
    const auto f = random_vector(rng, 12);
    const Eigen::Map<const Eigen::VectorXd> ec(st.e_curr.data(), 12), ep(st.e_prev.data(), 12), fv(f.data(), 12);
    Eigen::VectorXd minv(12);
    for (int i = 0; i < 12; ++i)
      minv(i) = 1.0 / r.m[i];
    const Eigen::VectorXd expected =
      2.0 * ec - ep + st.dt * st.dt * (minv.asDiagonal() * (fv - dense(r.k) * ec));
    leapfrog_step(st, r.m, r.k, f);
    CHECK(st.n == 6);
    std::vector<double> ev(expected.data(), expected.data() + 12);
    CHECK(rel_diff(st.e_curr, ev) <= 1e-14);
  }

  SUBCASE("non-finite values raise a blow-up error with the step index")
  {
    FieldState st = leapfrog_init(zero, zero, 0.01, s.m, s.k, {});
    st.e_curr[0] = std::numeric_limits<double>::infinity();
    try
    {
      leapfrog_step(st, s.m, s.k);
      FAIL("expected a blow-up error");
    }
    catch (const BlowUpError& e)
    {
      CHECK(e.step() == 2);
    }
  }
}

TEST_CASE("energy, reversibility, linearity")
{
  const auto s = make_system(build_structured_hybrid_mesh(6, 6, unit_square, 3));
  const int n = s.dofs.num_dofs();
  const double lambda = estimate_max_eigenvalue(s.m, s.k).lambda;
  const auto e0 = project_pi_h(s.mesh, s.dofs, standing_mode);
  const std::vector<double> zero(n, 0.0);

  SUBCASE("conserved at safety 0.9")
  {
    FieldState st = leapfrog_init(e0, zero, cfl_timestep(lambda, 0.9), s.m, s.k, {});
    const double start = discrete_energy(st, s.m, s.k);
    CHECK(start > 0.0);
    double drift = 0.0;
    for (int i = 0; i < 2000; ++i)
    {
      leapfrog_step(st, s.m, s.k);
      drift = std::max(drift, std::abs(discrete_energy(st, s.m, s.k) - start) / start);
    }
    CHECK(drift <= 1e-10);
  }

  SUBCASE("exponential growth at safety 1.2")
  {
    std::mt19937 rng(9);
    FieldState st = leapfrog_init(random_vector(rng, n), zero, cfl_timestep(lambda, 1.2), s.m, s.k, {});
    double max_abs = 0.0;
    for (double x : st.e_curr)
      max_abs = std::max(max_abs, std::abs(x));
    double grown = 0.0;
    for (int i = 0; i < 200; ++i)
      leapfrog_step(st, s.m, s.k);
    for (double x : st.e_curr)
      grown = std::max(grown, std::abs(x));
    CHECK(grown > 1e3 * max_abs);
  }

  SUBCASE("time reversibility")
  {
    std::mt19937 rng(10);
    const auto start = random_vector(rng, n);
    FieldState st = leapfrog_init(start, random_vector(rng, n), cfl_timestep(lambda, 0.9), s.m, s.k, {});
    const auto first = st.e_curr;
    for (int i = 0; i < 300; ++i)
      leapfrog_step(st, s.m, s.k);
    FieldState back;
    back.e_prev = st.e_curr;
    back.e_curr = st.e_prev;
    back.dt = -st.dt;
    for (int i = 0; i < 300; ++i)
      leapfrog_step(back, s.m, s.k);
    CHECK(rel_diff(back.e_curr, start) <= 1e-10);
    CHECK(rel_diff(back.e_prev, first) <= 1e-10);
  }

  SUBCASE("linearity")
  {
    std::mt19937 rng(11);
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i)
      c[i] = 2.0 * a[i] - 0.5 * b[i];
    const double dt = cfl_timestep(lambda, 0.9);
    auto sa = leapfrog_init(a, zero, dt, s.m, s.k, {});
    auto sb = leapfrog_init(b, zero, dt, s.m, s.k, {});
    auto sc = leapfrog_init(c, zero, dt, s.m, s.k, {});
    for (int i = 0; i < 200; ++i)
    {
      leapfrog_step(sa, s.m, s.k);
      leapfrog_step(sb, s.m, s.k);
      leapfrog_step(sc, s.m, s.k);
    }
    std::vector<double> combo(n);
    for (int i = 0; i < n; ++i)
      combo[i] = 2.0 * sa.e_curr[i] - 0.5 * sb.e_curr[i];
    CHECK(rel_diff(sc.e_curr, combo) <= 1e-12);
  }
}

TEST_CASE("run_simulation bookkeeping")
{
  const auto mesh = build_structured_rect_mesh(4, 4, unit_square);
  const auto dofs = build_dof_map(mesh, std::vector<int>{});

  TimeConfig cfg;
  cfg.initial_field = standing_mode;
  cfg.t_end = 0.0;
  cfg.output_interval = 0.1;
  int count = 0;
  auto summary = run_simulation(mesh, dofs, cfg, [&](const Snapshot& snap) {
    CHECK(snap.state.n == 0);
    ++count;
  });
  CHECK(summary.steps == 0);
  CHECK(count == 1);

  cfg.t_end = 1.0;
  cfg.dt = 0.01;
  cfg.output_interval = 0.1;
  const int fine = run_simulation(mesh, dofs, cfg).snapshots;
  cfg.output_interval = 0.2;
  const int coarse = run_simulation(mesh, dofs, cfg).snapshots;
  CHECK(std::abs(fine - 2 * coarse) <= 2);
  CHECK(fine == 11);

  cfg.dt.reset();
  cfg.output_interval = 0.0;
  cfg.output_times = {0.23, 0.5};
  std::vector<double> times;
  summary = run_simulation(mesh, dofs, cfg, [&](const Snapshot& snap) {
    CHECK(std::abs(snap.state.t() - snap.requested_time) <= 0.5 * snap.state.dt + 1e-12);
    times.push_back(snap.state.t());
  });
  CHECK(times.size() == 2);
  CHECK(summary.steps * summary.dt == doctest::Approx(1.0));
  CHECK(summary.dt <= cfl_timestep(summary.lambda_max, 0.9));
  CHECK(std::abs(summary.final_energy - summary.initial_energy) <= 1e-10 * summary.initial_energy);
}
