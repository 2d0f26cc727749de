#pragma once

#include "yeefem/assembly.hpp"
#include "yeefem/timestepping.hpp"

#include <functional>
#include <string>
#include <vector>

namespace yeefem {

using ScalarSpaceTimeField = std::function<double(const Vec2&, double)>;

struct ExactSolution
{
  std::string name;
  SpaceTimeField e;
  SpaceTimeField dt_e;
  ScalarSpaceTimeField curl_e;
  /// Source term; empty means f = 0.
  SpaceTimeField f;
};

/// E = cos(sqrt(2) pi t) (pi sin(pi x) cos(pi y), -pi cos(pi x) sin(pi y)) on the unit square.
ExactSolution standing_mode_solution();

struct ResidualReport
{
  /// max |d_tt E + curl curl E - f| over the samples
  double pde_residual = 0.0;
  /// max |curl_e - finite-difference curl of e|
  double curl_mismatch = 0.0;
  /// max |dt_e - finite-difference time derivative of e|
  double rate_mismatch = 0.0;
};

/// Central finite differences with the given step at random points of the unit
/// square and times in [0, 1].
ResidualReport check_exact_solution(const ExactSolution& exact, int samples = 100, double step = 1e-4,
                                    unsigned seed = 1);

struct FieldErrors
{
  double err_dtE = 0.0;
  double err_E = 0.0;
  double err_curl = 0.0;
};

/// L2 errors of a leapfrog state: E and curl E at t_n, the staggered rate
/// (e_curr - e_prev)/dt against dt_e at t_n - dt/2. Degree-6 quadrature.
FieldErrors l2_errors(const HybridMesh& mesh, const DofMap& dofs, const FieldState& state,
                      const ExactSolution& exact, int degree = 6);

/// ||E - E_h|| for a coefficient vector.
double l2_error(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                const SpaceField& exact, int degree = 6);
/// ||curl E - curl E_h|| for a coefficient vector.
double curl_error(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                  const std::function<double(const Vec2&)>& exact_curl, int degree = 6);
/// ||E - piecewise constant||.
double l2_error_piecewise_constant(const HybridMesh& mesh, const std::vector<Vec2>& values,
                                   const SpaceField& exact, int degree = 6);

enum class MeshFamily
{
  Rect,
  Tri,
  Hybrid
};

std::string to_string(MeshFamily family);
MeshFamily parse_mesh_family(const std::string& name);

/// n x n cells on the unit square; the hybrid family has rectangles on the
/// left half and triangles on the right half.
HybridMesh family_mesh(MeshFamily family, int n);

/// log2(a / b); NaN if either is not positive.
double observed_rate(double coarse, double fine);

struct ConvergenceLevel
{
  int level = 0;
  int cells = 0;
  double h = 0.0;
  double err_dtE = 0.0;
  double err_curl = 0.0;
  long steps = 0;
  double dt = 0.0;
};

struct ConvergenceReport
{
  std::string solution;
  MeshFamily family = MeshFamily::Rect;
  std::vector<ConvergenceLevel> levels;
  /// Errors that failed to decrease between some pair of levels.
  bool non_monotone = false;

  /// Rate between level i-1 and i (i >= 1).
  double rate_dtE(std::size_t i) const;
  double rate_curl(std::size_t i) const;
};

struct ConvergenceOptions
{
  int levels = 4;
  int base_cells = 8;
  double t_end = 0.5;
  double cfl_safety = 0.5;
  /// Number of equally spaced output times used for the max-in-time norm.
  int samples_in_time = 10;
};

/// Standing-mode style study with natural boundary conditions. Throws Error if
/// the exact solution fails its finite-difference residual check.
ConvergenceReport convergence_study(const ExactSolution& exact, MeshFamily family,
                                    const ConvergenceOptions& options = {});

struct YeeCheckResult
{
  double max_deviation = 0.0;
  int interior_dofs = 0;
  int samples = 0;
  bool vacuous = false;
};

/// Compares M^{-1} K v with a hand-coded staggered-grid double-curl stencil on
/// the interior edges of an nx x ny grid of spacing h with lower-left corner at
/// the origin. The mesh is assumed to be that grid (possibly perturbed, as a
/// negative control).
YeeCheckResult yee_equivalence_check(const HybridMesh& mesh, int nx, int ny, double h, int samples = 50,
                                     unsigned seed = 7);
YeeCheckResult yee_equivalence_check(int nx, int ny, double h, int samples = 50, unsigned seed = 7);

struct ReflectionSetup
{
  double length = 6.0;
  double height = 0.5;
  double interface_x = 2.0;
  double omega = 10.0;
  double t_center = 1.0;
  double t_width = 0.3;
  double t_measure = 6.0;
  double cfl_safety = 0.9;
};

struct ReflectionResult
{
  double h = 0.0;
  double ratio = 0.0;
  double baseline = 0.0;
  double total_energy = 0.0;
  double t_measured = 0.0;
};

/// Pulse sin(omega (t - t_c)) exp(-((t - t_c)/w)^2) driven at x = 0 into the
/// strip (0, length) x (0, height) with perfectly conducting top and bottom
/// walls. ratio = energy left of the interface / total energy at t_measure for
/// the rectangle-triangle strip; baseline is the same for an all-rectangle
/// strip. Throws Error when the pulse cannot have crossed the interface by
/// t_measure or its far-wall echo could already be back.
ReflectionResult interface_reflection_test(double h, const ReflectionSetup& setup = {});

/// |sigma_h(Pi_h E, phi_h)| = |(Pi_h E, phi)_h - (Pi_h E, phi)| averaged (RMS)
/// over random phi_h with unit L2 norm.
double quadrature_error_functional(const HybridMesh& mesh, const DofMap& dofs, const SpaceField& e,
                                   int samples = 8, unsigned seed = 3);

struct RateTable
{
  std::vector<double> h;
  std::vector<double> errors;

  double finest_rate() const;
  double min_rate() const;
};

/// |sigma_h| on the family at n = base, 2 base, ...
RateTable quadrature_error_rates(const SpaceField& e, MeshFamily family, int levels = 4, int base_cells = 4);

struct InterpolationRates
{
  RateTable pi_h_l2;
  RateTable pi_h_curl;
  RateTable pi0_l2;
};

InterpolationRates interpolation_rates(const SpaceField& e, const std::function<double(const Vec2&)>& curl_e,
                                       MeshFamily family, int levels = 4, int base_cells = 4);

} // namespace yeefem
