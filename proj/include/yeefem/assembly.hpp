#pragma once

#include "yeefem/element.hpp"
#include "yeefem/mesh.hpp"

#include <functional>
#include <span>
#include <vector>

namespace yeefem {

/// Global numbering: edge DOFs first (by edge index), then three bubble DOFs
/// per triangle (by triangle index, local edge).
class DofMap
{
public:
  static constexpr int max_local = ElementBasis::max_size;

  int num_dofs() const { return num_dofs_; }
  int num_edge_dofs() const { return num_edges_; }
  int num_elements() const { return static_cast<int>(sizes_.size()); }

  int edge_dof(int edge) const { return edge; }
  int bubble_dof(int triangle, int local_edge) const { return num_edges_ + 3 * triangle + local_edge; }
  bool is_bubble(int dof) const { return dof >= num_edges_; }

  /// Global DOFs of an element in local basis order, and the matching signs.
  std::span<const int> dofs(int element) const
  {
    return {element_dofs_[element].data(), static_cast<std::size_t>(sizes_[element])};
  }
  std::span<const int> signs(int element) const
  {
    return {element_signs_[element].data(), static_cast<std::size_t>(sizes_[element])};
  }

  const std::vector<int>& dirichlet_dofs() const { return dirichlet_; }
  bool is_dirichlet(int dof) const { return constrained_[dof] != 0; }

  friend DofMap build_dof_map(const HybridMesh& mesh, const std::vector<int>& essential_edges);

private:
  int num_edges_ = 0;
  int num_dofs_ = 0;
  std::vector<int> sizes_;
  std::vector<std::array<int, max_local>> element_dofs_;
  std::vector<std::array<int, max_local>> element_signs_;
  std::vector<int> dirichlet_;
  std::vector<char> constrained_;
};

/// Dirichlet set = the listed edges (any order, duplicates ignored).
DofMap build_dof_map(const HybridMesh& mesh, const std::vector<int>& essential_edges);
/// Dirichlet set = all edges carrying one of the tags.
DofMap build_dof_map(const HybridMesh& mesh, std::span<const EdgeTag> essential_tags);
/// Demo default: left and ball edges are essential.
DofMap build_dof_map(const HybridMesh& mesh);

class DiagonalOperator
{
public:
  DiagonalOperator() = default;
  explicit DiagonalOperator(std::vector<double> diag) : diag_(std::move(diag)) {}

  int size() const { return static_cast<int>(diag_.size()); }
  const std::vector<double>& diagonal() const { return diag_; }
  double operator[](int i) const { return diag_[i]; }

  void apply(std::span<const double> x, std::span<double> y) const;
  /// y = D^{-1} x
  void solve(std::span<const double> x, std::span<double> y) const;

private:
  std::vector<double> diag_;
};

struct Triplet
{
  int row;
  int col;
  double value;
};

/// Square matrix in compressed row storage with sorted, unique columns.
class SparseOperator
{
public:
  SparseOperator() = default;
  /// Duplicates are summed in input order, so the result is deterministic.
  static SparseOperator from_triplets(int n, std::vector<Triplet> triplets);

  int size() const { return n_; }
  int nonzeros() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& row_offsets() const { return row_ptr_; }
  const std::vector<int>& columns() const { return cols_; }
  const std::vector<double>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  double entry(int i, int j) const;
  double max_abs() const;

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  /// Largest |A_ij - A_ji| over stored entries.
  double asymmetry() const;

private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

using SpaceField = std::function<Vec2(const Vec2&)>;
using SpaceTimeField = std::function<Vec2(const Vec2&, double)>;
/// Tangential trace n x E = E . t on a boundary edge, t with the domain on its left.
using TraceFunction = std::function<double(const Vec2& point, EdgeTag tag, double t)>;

/// Element-local coefficients (in local orientation) gathered from a global vector.
std::array<double, DofMap::max_local> gather(const DofMap& dofs, std::span<const double> coeffs,
                                             int element);

/// Lumped mass; throws LumpingFailure naming the DOF if an entry is not positive.
DiagonalOperator assemble_mass(const HybridMesh& mesh, const DofMap& dofs);

enum class MassKind
{
  Lumped,
  Exact
};
/// Full global mass matrix from the full local matrices of either inner product.
SparseOperator assemble_mass_matrix(const HybridMesh& mesh, const DofMap& dofs, MassKind kind);

SparseOperator assemble_stiffness(const HybridMesh& mesh, const DofMap& dofs);

/// (f(t), v) for every basis function, degree-4 quadrature per element.
std::vector<double> assemble_load(const HybridMesh& mesh, const DofMap& dofs, const SpaceTimeField& f,
                                  double t);

/// Overwrites the constrained DOFs with sign * g(midpoint) * |e|.
void apply_essential_bc(const HybridMesh& mesh, const DofMap& dofs, const TraceFunction& g, double t,
                        std::span<double> coeffs);

/// Lowest-order edge interpolant: 3-point Gauss tangential moments; bubble
/// coefficients are chosen so that the field on each triangle is the Whitney
/// interpolant itself.
std::vector<double> project_pi_h(const HybridMesh& mesh, const DofMap& dofs, const SpaceField& e);

/// Element mean values, degree-4 quadrature.
std::vector<Vec2> project_pi0(const HybridMesh& mesh, const SpaceField& e);

/// Coefficients of grad(sum_v phi_v * hat_v) for vertex values phi.
std::vector<double> discrete_gradient(const HybridMesh& mesh, const DofMap& dofs,
                                      std::span<const double> vertex_values);

Vec2 evaluate_field(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                    int element, const Vec2& p);
double evaluate_curl(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                     int element, const Vec2& p);

} // namespace yeefem
