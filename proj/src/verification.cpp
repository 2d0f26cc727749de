#include "yeefem/verification.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace yeefem {

namespace {

constexpr double pi = std::numbers::pi;

template <class Integrand>
double integrate_over_mesh(const HybridMesh& mesh, int degree, Integrand integrand)
{
  double sum = 0.0;
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto basis = ElementBasis::of(mesh, el);
    for (const auto& q : basis.quadrature(degree))
      sum += q.weight * integrand(el, basis, q.point);
  }
  return sum;
}

struct LocalEval
{
  Vec2 value;
  double curl;
};

LocalEval evaluate(const ElementBasis& basis, const std::array<double, DofMap::max_local>& local,
                   const Vec2& p)
{
  const auto v = basis.values(p);
  const auto c = basis.curls(p);
  LocalEval out{{}, 0.0};
  for (int a = 0; a < basis.size(); ++a)
  {
    out.value = out.value + local[a] * v[a];
    out.curl += local[a] * c[a];
  }
  return out;
}

double norm_sq(const Vec2& v) { return dot(v, v); }

} // namespace

ExactSolution standing_mode_solution()
{
  const double w = std::sqrt(2.0) * pi;
  ExactSolution s;
  s.name = "standing_mode";
  s.e = [w](const Vec2& p, double t) {
    const double c = std::cos(w * t);
    return Vec2{c * pi * std::sin(pi * p.x) * std::cos(pi * p.y), -c * pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
  };
  s.dt_e = [w](const Vec2& p, double t) {
    const double c = -w * std::sin(w * t);
    return Vec2{c * pi * std::sin(pi * p.x) * std::cos(pi * p.y), -c * pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
  };
  s.curl_e = [w](const Vec2& p, double t) {
    return 2.0 * pi * pi * std::cos(w * t) * std::sin(pi * p.x) * std::sin(pi * p.y);
  };
  return s;
}

ResidualReport check_exact_solution(const ExactSolution& exact, int samples, double step, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double d = step;
  ResidualReport report;
  auto fd_curl = [&](const Vec2& p, double t) {
    const Vec2 xp = exact.e(p + Vec2{d, 0}, t), xm = exact.e(p - Vec2{d, 0}, t);
    const Vec2 yp = exact.e(p + Vec2{0, d}, t), ym = exact.e(p - Vec2{0, d}, t);
    return (xp.y - xm.y) / (2 * d) - (yp.x - ym.x) / (2 * d);
  };
  for (int i = 0; i < samples; ++i)
  {
    const Vec2 p{u(rng), u(rng)};
    const double t = u(rng);
    const Vec2 e_tt = (1.0 / (d * d)) * (exact.e(p, t + d) - 2.0 * exact.e(p, t) + exact.e(p, t - d));
    // curl of the scalar curl: (d_y c, -d_x c)
    const double cyp = exact.curl_e(p + Vec2{0, d}, t), cym = exact.curl_e(p - Vec2{0, d}, t);
    const double cxp = exact.curl_e(p + Vec2{d, 0}, t), cxm = exact.curl_e(p - Vec2{d, 0}, t);
    const Vec2 curl_curl{(cyp - cym) / (2 * d), -(cxp - cxm) / (2 * d)};
    const Vec2 f = exact.f ? exact.f(p, t) : Vec2{};
    report.pde_residual = std::max(report.pde_residual, norm(e_tt + curl_curl - f));
    report.curl_mismatch = std::max(report.curl_mismatch, std::abs(exact.curl_e(p, t) - fd_curl(p, t)));
    const Vec2 e_t = (0.5 / d) * (exact.e(p, t + d) - exact.e(p, t - d));
    report.rate_mismatch = std::max(report.rate_mismatch, norm(exact.dt_e(p, t) - e_t));
  }
  return report;
}

FieldErrors l2_errors(const HybridMesh& mesh, const DofMap& dofs, const FieldState& state,
                      const ExactSolution& exact, int degree)
{
  const double t = state.t();
  const double t_half = t - 0.5 * state.dt;
  std::vector<double> rate(state.e_curr.size());
  for (std::size_t i = 0; i < rate.size(); ++i)
    rate[i] = (state.e_curr[i] - state.e_prev[i]) / state.dt;

  double e2 = 0.0, c2 = 0.0, r2 = 0.0;
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto basis = ElementBasis::of(mesh, el);
    const auto local_e = gather(dofs, state.e_curr, el);
    const auto local_r = gather(dofs, rate, el);
    for (const auto& q : basis.quadrature(degree))
    {
      const auto fe = evaluate(basis, local_e, q.point);
      const auto fr = evaluate(basis, local_r, q.point);
      e2 += q.weight * norm_sq(fe.value - exact.e(q.point, t));
      c2 += q.weight * std::pow(fe.curl - exact.curl_e(q.point, t), 2);
      r2 += q.weight * norm_sq(fr.value - exact.dt_e(q.point, t_half));
    }
  }
  return {std::sqrt(r2), std::sqrt(e2), std::sqrt(c2)};
}

double l2_error(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                const SpaceField& exact, int degree)
{
  std::vector<std::array<double, DofMap::max_local>> locals(mesh.num_elements());
  for (int el = 0; el < mesh.num_elements(); ++el)
    locals[el] = gather(dofs, coeffs, el);
  return std::sqrt(integrate_over_mesh(mesh, degree, [&](int el, const ElementBasis& b, const Vec2& p) {
    return norm_sq(evaluate(b, locals[el], p).value - exact(p));
  }));
}

double curl_error(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                  const std::function<double(const Vec2&)>& exact_curl, int degree)
{
  std::vector<std::array<double, DofMap::max_local>> locals(mesh.num_elements());
  for (int el = 0; el < mesh.num_elements(); ++el)
    locals[el] = gather(dofs, coeffs, el);
  return std::sqrt(integrate_over_mesh(mesh, degree, [&](int el, const ElementBasis& b, const Vec2& p) {
    return std::pow(evaluate(b, locals[el], p).curl - exact_curl(p), 2);
  }));
}

double l2_error_piecewise_constant(const HybridMesh& mesh, const std::vector<Vec2>& values,
                                   const SpaceField& exact, int degree)
{
  return std::sqrt(integrate_over_mesh(mesh, degree, [&](int el, const ElementBasis&, const Vec2& p) {
    return norm_sq(values[el] - exact(p));
  }));
}

std::string to_string(MeshFamily family)
{
  switch (family)
  {
  case MeshFamily::Rect:
    return "rect";
  case MeshFamily::Tri:
    return "tri";
  case MeshFamily::Hybrid:
    return "hybrid";
  }
  return "?";
}

MeshFamily parse_mesh_family(const std::string& name)
{
  if (name == "rect")
    return MeshFamily::Rect;
  if (name == "tri")
    return MeshFamily::Tri;
  if (name == "hybrid")
    return MeshFamily::Hybrid;
  throw ConfigError("unknown mesh family '" + name + "' (expected rect, tri or hybrid)");
}

HybridMesh family_mesh(MeshFamily family, int n)
{
  const BoundingBox box{{0, 0}, {1, 1}};
  switch (family)
  {
  case MeshFamily::Rect:
    return build_structured_rect_mesh(n, n, box);
  case MeshFamily::Tri:
    return build_structured_tri_mesh(n, n, box, SplitDirection::Alternating);
  case MeshFamily::Hybrid:
    return build_structured_hybrid_mesh(n, n, box, n / 2, SplitDirection::Alternating);
  }
  throw Error("unknown mesh family");
}

double observed_rate(double coarse, double fine)
{
  if (!(coarse > 0.0) || !(fine > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

double ConvergenceReport::rate_dtE(std::size_t i) const
{
  return observed_rate(levels.at(i - 1).err_dtE, levels.at(i).err_dtE);
}

double ConvergenceReport::rate_curl(std::size_t i) const
{
  return observed_rate(levels.at(i - 1).err_curl, levels.at(i).err_curl);
}

ConvergenceReport convergence_study(const ExactSolution& exact, MeshFamily family,
                                    const ConvergenceOptions& options)
{
  if (options.levels < 2)
    throw Error("a convergence study needs at least two levels");
  const auto residual = check_exact_solution(exact);
  if (residual.pde_residual > 1e-4 || residual.curl_mismatch > 1e-4 || residual.rate_mismatch > 1e-4)
    throw Error("exact solution '" + exact.name + "' fails its finite-difference residual check (pde " +
                std::to_string(residual.pde_residual) + ", curl " + std::to_string(residual.curl_mismatch) +
                ", rate " + std::to_string(residual.rate_mismatch) + ")");

  ConvergenceReport report;
  report.solution = exact.name;
  report.family = family;
  for (int l = 0; l < options.levels; ++l)
  {
    const int n = options.base_cells << l;
    const auto mesh = family_mesh(family, n);
    const auto dofs = build_dof_map(mesh, std::vector<int>{});

    TimeConfig cfg;
    cfg.t_end = options.t_end;
    cfg.cfl_safety = options.cfl_safety;
    cfg.output_interval = options.t_end / options.samples_in_time;
    cfg.initial_field = [&](const Vec2& p) { return exact.e(p, 0.0); };
    cfg.initial_rate = [&](const Vec2& p) { return exact.dt_e(p, 0.0); };
    if (exact.f)
      cfg.source = exact.f;

    ConvergenceLevel level;
    level.level = l;
    level.cells = n;
    level.h = validate_mesh(mesh).h_max;
    const auto summary = run_simulation(mesh, dofs, cfg, [&](const Snapshot& snap) {
      if (snap.state.n == 0)
        return;
      const auto err = l2_errors(mesh, dofs, snap.state, exact);
      level.err_dtE = std::max(level.err_dtE, err.err_dtE);
      level.err_curl = std::max(level.err_curl, err.err_curl);
    });
    level.steps = summary.steps;
    level.dt = summary.dt;
    if (!report.levels.empty())
    {
      const auto& prev = report.levels.back();
      if (!(level.err_dtE < prev.err_dtE) || !(level.err_curl < prev.err_curl))
        report.non_monotone = true;
    }
    report.levels.push_back(level);
  }
  return report;
}

YeeCheckResult yee_equivalence_check(const HybridMesh& mesh, int nx, int ny, double h, int samples,
                                     unsigned seed)
{
  YeeCheckResult result;
  result.samples = samples;
  const auto dofs = build_dof_map(mesh, std::vector<int>{});
  const auto m = assemble_mass(mesh, dofs);
  const auto k = assemble_stiffness(mesh, dofs);

  // lattice bookkeeping from edge midpoints: horizontal edges (i, j) at ((i+1/2)h, jh),
  // vertical edges (i, j) at (ih, (j+1/2)h); sign maps the mesh orientation to +x / +y
  std::vector<int> hx_edge((nx) * (ny + 1), -1), vy_edge((nx + 1) * ny, -1);
  std::vector<double> hx_sign(hx_edge.size()), vy_sign(vy_edge.size());
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const Vec2 mid = mesh.edge_midpoint(e);
    const Vec2 t = mesh.edge_tangent(e);
    if (std::abs(t.x) > std::abs(t.y))
    {
      const int i = static_cast<int>(std::lround(mid.x / h - 0.5));
      const int j = static_cast<int>(std::lround(mid.y / h));
      hx_edge.at(j * nx + i) = e;
      hx_sign.at(j * nx + i) = t.x > 0 ? 1.0 : -1.0;
    }
    else
    {
      const int i = static_cast<int>(std::lround(mid.x / h));
      const int j = static_cast<int>(std::lround(mid.y / h - 0.5));
      vy_edge.at(j * (nx + 1) + i) = e;
      vy_sign.at(j * (nx + 1) + i) = t.y > 0 ? 1.0 : -1.0;
    }
  }

  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(dofs.num_dofs()), kv(dofs.num_dofs());
  std::vector<double> cell_h(nx * ny);
  for (int s = 0; s < samples; ++s)
  {
    for (auto& x : v)
      x = g(rng);
    k.apply(v, kv);

    auto ex = [&](int i, int j) { return hx_sign[j * nx + i] * v[hx_edge[j * nx + i]]; };
    auto ey = [&](int i, int j) { return vy_sign[j * (nx + 1) + i] * v[vy_edge[j * (nx + 1) + i]]; };
    // H at cell centres: circulation over the cell divided by its area
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        cell_h[j * nx + i] = (ex(i, j) + ey(i + 1, j) - ex(i, j + 1) - ey(i, j)) / (h * h);

    double worst = 0.0, scale = 0.0;
    int interior = 0;
    // E_x moments on interior horizontal edges: h * dH/dy
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
      {
        const double yee = h * (cell_h[j * nx + i] - cell_h[(j - 1) * nx + i]) / h;
        const int e = hx_edge[j * nx + i];
        const double fem = hx_sign[j * nx + i] * kv[e] / m[e];
        worst = std::max(worst, std::abs(fem - yee));
        scale = std::max(scale, std::abs(yee));
        ++interior;
      }
    // E_y moments on interior vertical edges: -h * dH/dx
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i)
      {
        const double yee = -h * (cell_h[j * nx + i] - cell_h[j * nx + i - 1]) / h;
        const int e = vy_edge[j * (nx + 1) + i];
        const double fem = vy_sign[j * (nx + 1) + i] * kv[e] / m[e];
        worst = std::max(worst, std::abs(fem - yee));
        scale = std::max(scale, std::abs(yee));
        ++interior;
      }
    result.interior_dofs = interior;
    if (interior > 0)
      result.max_deviation = std::max(result.max_deviation, worst / scale);
  }
  result.vacuous = result.interior_dofs == 0;
  return result;
}

YeeCheckResult yee_equivalence_check(int nx, int ny, double h, int samples, unsigned seed)
{
  const auto mesh = build_structured_rect_mesh(nx, ny, {{0, 0}, {nx * h, ny * h}});
  return yee_equivalence_check(mesh, nx, ny, h, samples, seed);
}

ReflectionResult interface_reflection_test(double h, const ReflectionSetup& s)
{
  const double tail = s.t_center + 3.0 * s.t_width;
  const double front = std::max(0.0, s.t_center - 3.0 * s.t_width);
  if (tail + s.interface_x > s.t_measure)
    throw Error("reflection window: the pulse tail reaches the interface at t = " +
                std::to_string(tail + s.interface_x) + ", after the measurement time " +
                std::to_string(s.t_measure));
  if (front + 2.0 * s.length - s.interface_x <= s.t_measure)
    throw Error("reflection window: the far-wall echo is back at the interface before t = " +
                std::to_string(s.t_measure));
  if (front + 3.0 * s.interface_x <= s.t_measure)
    throw Error("reflection window: waves reflected at the interface return to it before t = " +
                std::to_string(s.t_measure));

  const int nx = static_cast<int>(std::lround(s.length / h));
  const int ny = std::max(1, static_cast<int>(std::lround(s.height / h)));
  const int nx_rect = static_cast<int>(std::lround(s.interface_x / h));
  const BoundingBox box{{0, 0}, {s.length, s.height}};

  auto measure = [&](const HybridMesh& mesh, double* total) {
    // perfectly conducting walls everywhere except the far end
    std::vector<int> essential;
    for (int e = 0; e < mesh.num_edges(); ++e)
      if (mesh.is_boundary_edge(e) && mesh.edge_midpoint(e).x < s.length - 1e-9 * s.length)
        essential.push_back(e);
    const auto dofs = build_dof_map(mesh, essential);

    TimeConfig cfg;
    cfg.t_end = s.t_measure;
    cfg.cfl_safety = s.cfl_safety;
    cfg.output_times = {s.t_measure};
    cfg.boundary = [&s](const Vec2&, EdgeTag tag, double t) {
      if (tag != EdgeTag::Left)
        return 0.0;
      const double tau = (t - s.t_center) / s.t_width;
      return std::sin(s.omega * (t - s.t_center)) * std::exp(-tau * tau);
    };
    double left = 0.0, all = 0.0;
    run_simulation(mesh, dofs, cfg, [&](const Snapshot& snap) {
      const auto& st = snap.state;
      std::vector<double> rate(st.e_curr.size());
      for (std::size_t i = 0; i < rate.size(); ++i)
        rate[i] = (st.e_curr[i] - st.e_prev[i]) / st.dt;
      for (int el = 0; el < mesh.num_elements(); ++el)
      {
        const auto basis = ElementBasis::of(mesh, el);
        const auto le = gather(dofs, st.e_curr, el);
        const auto lr = gather(dofs, rate, el);
        double density = 0.0;
        for (const auto& q : basis.quadrature(4))
          density += q.weight * 0.5 *
                     (norm_sq(evaluate(basis, lr, q.point).value) + std::pow(evaluate(basis, le, q.point).curl, 2));
        all += density;
        if (mesh.element_centroid(el).x < s.interface_x)
          left += density;
      }
    });
    *total = all;
    return left / all;
  };

  ReflectionResult r;
  r.h = s.length / nx;
  r.ratio = measure(build_structured_hybrid_mesh(nx, ny, box, nx_rect, SplitDirection::Alternating),
                    &r.total_energy);
  double baseline_total = 0.0;
  r.baseline = measure(build_structured_rect_mesh(nx, ny, box), &baseline_total);
  r.t_measured = s.t_measure;
  return r;
}

double quadrature_error_functional(const HybridMesh& mesh, const DofMap& dofs, const SpaceField& e,
                                   int samples, unsigned seed)
{
  const auto lumped = assemble_mass(mesh, dofs);
  const auto exact = assemble_mass_matrix(mesh, dofs, MassKind::Exact);
  const auto u = project_pi_h(mesh, dofs, e);
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  const int n = dofs.num_dofs();
  std::vector<double> phi(n), mphi(n);
  double sum_sq = 0.0;
  for (int s = 0; s < samples; ++s)
  {
    for (auto& x : phi)
      x = g(rng);
    exact.apply(phi, mphi);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i)
      norm2 += phi[i] * mphi[i];
    const double scale = 1.0 / std::sqrt(norm2);
    double sigma = 0.0;
    for (int i = 0; i < n; ++i)
      sigma += u[i] * (lumped[i] * phi[i] - mphi[i]) * scale;
    sum_sq += sigma * sigma;
  }
  return std::sqrt(sum_sq / samples);
}

double RateTable::finest_rate() const
{
  const std::size_t n = errors.size();
  return n < 2 ? std::numeric_limits<double>::quiet_NaN() : observed_rate(errors[n - 2], errors[n - 1]);
}

double RateTable::min_rate() const
{
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < errors.size(); ++i)
  {
    const double r = observed_rate(errors[i - 1], errors[i]);
    if (std::isnan(r))
      return r;
    worst = std::min(worst, r);
  }
  return worst;
}

RateTable quadrature_error_rates(const SpaceField& e, MeshFamily family, int levels, int base_cells)
{
  RateTable table;
  for (int l = 0; l < levels; ++l)
  {
    const auto mesh = family_mesh(family, base_cells << l);
    const auto dofs = build_dof_map(mesh, std::vector<int>{});
    table.h.push_back(validate_mesh(mesh).h_max);
    table.errors.push_back(quadrature_error_functional(mesh, dofs, e));
  }
  return table;
}

InterpolationRates interpolation_rates(const SpaceField& e, const std::function<double(const Vec2&)>& curl_e,
                                       MeshFamily family, int levels, int base_cells)
{
  InterpolationRates rates;
  for (int l = 0; l < levels; ++l)
  {
    const auto mesh = family_mesh(family, base_cells << l);
    const auto dofs = build_dof_map(mesh, std::vector<int>{});
    const double h = validate_mesh(mesh).h_max;
    const auto pi_h = project_pi_h(mesh, dofs, e);
    rates.pi_h_l2.h.push_back(h);
    rates.pi_h_l2.errors.push_back(l2_error(mesh, dofs, pi_h, e));
    rates.pi_h_curl.h.push_back(h);
    rates.pi_h_curl.errors.push_back(curl_error(mesh, dofs, pi_h, curl_e));
    rates.pi0_l2.h.push_back(h);
    rates.pi0_l2.errors.push_back(l2_error_piecewise_constant(mesh, project_pi0(mesh, e), e));
  }
  return rates;
}

} // namespace yeefem
