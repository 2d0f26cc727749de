#pragma once

#include "yeefem/assembly.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace yeefem {

struct EigenEstimate
{
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on M^{-1/2} K M^{-1/2} (same spectrum as M^{-1} K); stops
/// when the Rayleigh quotient changes by less than tol relative.
EigenEstimate estimate_max_eigenvalue(const DiagonalOperator& m, const SparseOperator& k,
                                      int max_iterations = 5000, double tol = 1e-6);

/// safety * 2 / sqrt(lambda_max); throws Error for lambda_max <= 0.
double cfl_timestep(double lambda_max, double safety);

/// Two consecutive time levels of the coefficient vector.
struct FieldState
{
  std::vector<double> e_curr;
  std::vector<double> e_prev;
  long n = 0;
  double dt = 0.0;
  double t0 = 0.0;

  double t() const { return t0 + static_cast<double>(n) * dt; }
};

/// Called with (t, coeffs) to overwrite the constrained DOFs at time t.
using BoundaryUpdate = std::function<void(double, std::span<double>)>;

/// Second-order Taylor start: e_prev = E0 and
/// e_curr = E0 + dt E1 + dt^2/2 M^{-1}(f0 - K E0); the state is at step 1.
FieldState leapfrog_init(std::span<const double> e0, std::span<const double> e1, double dt,
                         const DiagonalOperator& m, const SparseOperator& k, std::span<const double> f0,
                         const BoundaryUpdate& bc = {}, double t0 = 0.0);

/// e_next = 2 e_curr - e_prev + dt^2 M^{-1}(f_n - K e_curr), then the boundary
/// values at t_{n+1}. An empty f means zero source. Throws BlowUpError on a
/// non-finite entry.
void leapfrog_step(FieldState& state, const DiagonalOperator& m, const SparseOperator& k,
                   std::span<const double> f = {}, const BoundaryUpdate& bc = {});

/// 1/2 |(e_curr - e_prev)/dt|_M^2 + 1/2 (K e_curr) . e_prev, conserved exactly
/// by source-free leapfrog.
double discrete_energy(const FieldState& state, const DiagonalOperator& m, const SparseOperator& k);

struct TimeConfig
{
  double t_end = 1.0;
  /// Fixed time step; otherwise cfl_safety * 2 / sqrt(lambda_max).
  std::optional<double> dt;
  double cfl_safety = 0.9;
  /// Snapshot cadence (0 = none besides output_times).
  double output_interval = 0.0;
  std::vector<double> output_times;
  SpaceTimeField source;
  /// Tangential trace imposed on the constrained DOFs; zero when empty.
  TraceFunction boundary;
  SpaceField initial_field;
  SpaceField initial_rate;
};

struct Snapshot
{
  double requested_time;
  const FieldState& state;
};

struct RunSummary
{
  long steps = 0;
  double dt = 0.0;
  double lambda_max = 0.0;
  bool lambda_converged = true;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_abs = 0.0;
  int snapshots = 0;
};

using SnapshotSink = std::function<void(const Snapshot&)>;

/// Projects the initial data, marches to t_end (dt adjusted down so that a
/// whole number of steps lands on t_end) and reports each requested output
/// time at the nearest step.
RunSummary run_simulation(const HybridMesh& mesh, const DofMap& dofs, const TimeConfig& config,
                          const SnapshotSink& sink = {});

} // namespace yeefem
