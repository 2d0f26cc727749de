#pragma once

#include "yeefem/mesh.hpp"

#include <array>
#include <random>

namespace yeefem {

/// Counterclockwise triangle with inradius/circumradius >= min_quality, with
/// vertices in the square (-scale, scale)^2 shifted by up to 5 scale.
std::array<Vec2, 3> random_shape_regular_triangle(std::mt19937& rng, double min_quality = 0.2,
                                                  double scale = 1.0);
/// Axis-aligned rectangle with sides in [0.01, 3] and aspect at most 300.
BoundingBox random_rectangle(std::mt19937& rng);

struct DiagonalityReport
{
  int triangles = 0;
  int rectangles = 0;
  int mesh_elements = 0;
  /// max over all local lumped matrices of max |off-diagonal| / max diagonal
  double worst_off_diagonal = 0.0;
  /// min over all local lumped matrices of min diagonal / max diagonal
  double min_diagonal = 0.0;

  bool passed(double tol = 1e-12) const { return worst_off_diagonal <= tol && min_diagonal > 0.0; }
};

/// Local lumped mass matrices of `samples` random triangles and rectangles and
/// of every element of `mesh` (if given).
DiagonalityReport mass_diagonality(int samples = 1000, unsigned seed = 1, const HybridMesh* mesh = nullptr);

struct ExactnessReport
{
  /// max |error| over degree <= 2 monomials on the unit and random triangles in the unit square
  double triangle_error = 0.0;
  /// max |error| over degree <= 1 monomials on the unit and random rectangles in the unit square
  double rectangle_error = 0.0;
  /// error for y^2 on the unit square (1/6 expected)
  double rectangle_y2_error = 0.0;

  bool passed(double tol = 1e-13) const
  {
    return triangle_error <= tol && rectangle_error <= tol && std::abs(rectangle_y2_error - 1.0 / 6.0) <= tol;
  }
};

ExactnessReport quadrature_exactness(int samples = 100, unsigned seed = 2);

struct EnergyReport
{
  long steps = 0;
  double dt = 0.0;
  double initial_energy = 0.0;
  /// max over the steps of |E_n - E_0| / E_0
  double relative_drift = 0.0;
};

/// Source-free leapfrog run of the standing mode on `mesh` with natural
/// boundary conditions, zero initial rate and dt = safety * CFL limit.
EnergyReport energy_drift(const HybridMesh& mesh, long steps, double safety);

struct GrowthReport
{
  long steps = 0;
  /// max |coefficient| at the end (or at overflow) over the initial max
  double growth = 0.0;
  /// step at which the growth first exceeded the threshold; -1 if never
  long threshold_step = -1;
  bool overflowed = false;
};

/// Same run as energy_drift; stops once the growth exceeds `threshold`, on a
/// non-finite value, or after `max_steps`.
GrowthReport instability_growth(const HybridMesh& mesh, long max_steps, double safety, double threshold = 1e3);

} // namespace yeefem
