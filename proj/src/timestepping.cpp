#include "yeefem/timestepping.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

namespace yeefem {

EigenEstimate estimate_max_eigenvalue(const DiagonalOperator& m, const SparseOperator& k,
                                      int max_iterations, double tol)
{
  const int n = m.size();
  std::vector<double> inv_sqrt(n);
  for (int i = 0; i < n; ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(m[i]);

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> x(n), y(n), z(n);
  for (auto& xi : x)
    xi = u(rng) * (rng() % 2 ? 1.0 : -1.0);

  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double vi : v)
      s += vi * vi;
    s = std::sqrt(s);
    if (s > 0.0)
      for (auto& vi : v)
        vi /= s;
    return s;
  };
  normalize(x);

  EigenEstimate est;
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it)
  {
    for (int i = 0; i < n; ++i)
      z[i] = inv_sqrt[i] * x[i];
    k.apply(z, y);
    double rq = 0.0;
    for (int i = 0; i < n; ++i)
    {
      y[i] *= inv_sqrt[i];
      rq += x[i] * y[i];
    }
    est.lambda = rq;
    est.iterations = it;
    if (normalize(y) == 0.0)
    {
      est.lambda = 0.0;
      est.converged = true;
      return est;
    }
    if (it > 1 && std::abs(rq - previous) < tol * std::abs(rq))
    {
      est.converged = true;
      return est;
    }
    previous = rq;
    x.swap(y);
  }
  return est;
}

double cfl_timestep(double lambda_max, double safety)
{
  if (!(lambda_max > 0.0))
    throw Error("the CFL time step needs a positive eigenvalue estimate, got " + std::to_string(lambda_max));
  if (!(safety > 0.0))
    throw Error("the CFL safety factor must be positive");
  return safety * 2.0 / std::sqrt(lambda_max);
}

FieldState leapfrog_init(std::span<const double> e0, std::span<const double> e1, double dt,
                         const DiagonalOperator& m, const SparseOperator& k, std::span<const double> f0,
                         const BoundaryUpdate& bc, double t0)
{
  const std::size_t n = e0.size();
  FieldState s;
  s.dt = dt;
  s.t0 = t0;
  s.n = 1;
  s.e_prev.assign(e0.begin(), e0.end());
  std::vector<double> ke = k.apply(e0);
  s.e_curr.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double f = f0.empty() ? 0.0 : f0[i];
    s.e_curr[i] = e0[i] + dt * e1[i] + 0.5 * dt * dt * (f - ke[i]) / m[i];
  }
  if (bc)
    bc(s.t(), s.e_curr);
  return s;
}

void leapfrog_step(FieldState& state, const DiagonalOperator& m, const SparseOperator& k,
                   std::span<const double> f, const BoundaryUpdate& bc)
{
  const std::size_t n = state.e_curr.size();
  const double dt2 = state.dt * state.dt;
  std::vector<double> next = k.apply(state.e_curr);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double fi = f.empty() ? 0.0 : f[i];
    next[i] = 2.0 * state.e_curr[i] - state.e_prev[i] + dt2 * (fi - next[i]) / m[i];
  }
  ++state.n;
  if (bc)
    bc(state.t(), next);
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(next[i]))
      throw BlowUpError("non-finite coefficient at step " + std::to_string(state.n) + " (t = " +
                          std::to_string(state.t()) + ")",
                        state.n);
  state.e_prev.swap(state.e_curr);
  state.e_curr.swap(next);
}

double discrete_energy(const FieldState& state, const DiagonalOperator& m, const SparseOperator& k)
{
  const std::size_t n = state.e_curr.size();
  const std::vector<double> ke = k.apply(state.e_curr);
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    const double v = (state.e_curr[i] - state.e_prev[i]) / state.dt;
    kinetic += m[i] * v * v;
    potential += ke[i] * state.e_prev[i];
  }
  return 0.5 * (kinetic + potential);
}

RunSummary run_simulation(const HybridMesh& mesh, const DofMap& dofs, const TimeConfig& config,
                          const SnapshotSink& sink)
{
  if (!(config.t_end >= 0.0))
    throw Error("t_end must be non-negative");
  const auto m = assemble_mass(mesh, dofs);
  const auto k = assemble_stiffness(mesh, dofs);

  RunSummary summary;
  double dt;
  if (config.dt)
  {
    if (!(*config.dt > 0.0))
      throw Error("dt must be positive");
    dt = *config.dt;
  }
  else
  {
    const auto est = estimate_max_eigenvalue(m, k);
    summary.lambda_max = est.lambda;
    summary.lambda_converged = est.converged;
    dt = cfl_timestep(est.lambda, config.cfl_safety);
  }
  const long steps = config.t_end > 0.0 ? static_cast<long>(std::ceil(config.t_end / dt - 1e-9)) : 0;
  if (steps > 0)
    dt = config.t_end / static_cast<double>(steps);
  summary.dt = dt;
  summary.steps = steps;

  // requested output times snapped to the nearest step
  std::multimap<long, double> outputs;
  auto request = [&](double t) {
    if (t < -1e-12 || t > config.t_end + 1e-12)
      return;
    const long step = steps > 0 ? std::clamp(std::lround(t / dt), 0L, steps) : 0L;
    outputs.emplace(step, t);
  };
  if (config.output_interval > 0.0)
    for (long j = 0; static_cast<double>(j) * config.output_interval <= config.t_end + 1e-12; ++j)
      request(static_cast<double>(j) * config.output_interval);
  for (double t : config.output_times)
    request(t);

  const int n = dofs.num_dofs();
  std::vector<double> e0(n, 0.0), e1(n, 0.0);
  if (config.initial_field)
    e0 = project_pi_h(mesh, dofs, config.initial_field);
  if (config.initial_rate)
    e1 = project_pi_h(mesh, dofs, config.initial_rate);

  BoundaryUpdate bc = [&](double t, std::span<double> coeffs) {
    if (config.boundary)
      apply_essential_bc(mesh, dofs, config.boundary, t, coeffs);
    else
      for (int d : dofs.dirichlet_dofs())
        coeffs[d] = 0.0;
  };
  bc(0.0, e0);

  auto load = [&](double t) {
    return config.source ? assemble_load(mesh, dofs, config.source, t) : std::vector<double>{};
  };

  // one snapshot per distinct step, labelled with the first time requested for it
  auto emit = [&](const FieldState& s) {
    const auto it = outputs.find(s.n);
    if (it == outputs.end())
      return;
    if (sink)
      sink(Snapshot{it->second, s});
    ++summary.snapshots;
  };
  auto track_max = [&](const std::vector<double>& v) {
    for (double x : v)
      summary.max_abs = std::max(summary.max_abs, std::abs(x));
  };

  // step 0 with the backward Taylor level as the previous state
  {
    FieldState s0 = leapfrog_init(e0, e1, -dt, m, k, load(0.0));
    s0.e_prev.swap(s0.e_curr);
    s0.e_curr = e0;
    s0.dt = dt;
    s0.n = 0;
    track_max(e0);
    emit(s0);
    if (steps == 0)
    {
      summary.initial_energy = summary.final_energy = discrete_energy(s0, m, k);
      return summary;
    }
  }

  FieldState state = leapfrog_init(e0, e1, dt, m, k, load(0.0), bc);
  summary.initial_energy = discrete_energy(state, m, k);
  track_max(state.e_curr);
  emit(state);
  while (state.n < steps)
  {
    leapfrog_step(state, m, k, load(state.t()), bc);
    track_max(state.e_curr);
    emit(state);
  }
  summary.final_energy = discrete_energy(state, m, k);
  return summary;
}

} // namespace yeefem
