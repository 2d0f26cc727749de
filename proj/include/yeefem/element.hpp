#pragma once

#include "yeefem/geometry.hpp"
#include "yeefem/mesh.hpp"
#include "yeefem/quadrature.hpp"

#include <array>
#include <functional>
#include <variant>

namespace yeefem {

template <int N>
using LocalMatrix = std::array<std::array<double, N>, N>;

/// Coefficients of the three bubbles lambda_i lambda_j grad lambda_k in a
/// modified edge function: alpha for the edge's own bubble, beta for the bubble
/// of the edge (j,k) and gamma for the bubble of the edge (k,i).
struct BubbleCoefficients
{
  double alpha;
  double beta;
  double gamma;
};

/// c[k][l] is the coefficient of the bubble of local edge l in the modified
/// edge function of local edge k.
using BubbleCoefficientTable = std::array<std::array<double, 3>, 3>;

/// Barycentric gradients of a counterclockwise triangle; throws InvalidGeometry
/// for non-positive area.
std::array<Vec2, 3> barycentric_gradients(const std::array<Vec2, 3>& vertices);

/// Enriched lowest-order edge space on a triangle: three modified edge
/// functions (dual to the tangential moments along the locally oriented edges)
/// followed by three bubbles (dual to |e_l| times the inward normal component
/// at the midpoint of edge l). Local edge k is opposite vertex k and runs from
/// vertex (k+1)%3 to (k+2)%3.
class TriangleBasis
{
public:
  static constexpr int size = 6;

  explicit TriangleBasis(const std::array<Vec2, 3>& vertices);

  const std::array<Vec2, 3>& vertices() const { return vertices_; }
  const std::array<Vec2, 3>& gradients() const { return grad_; }
  double area() const { return area_; }

  std::array<double, 3> barycentric(const Vec2& p) const;

  Vec2 edge_midpoint(int k) const;
  double edge_length(int k) const;
  /// Unit tangent in local orientation.
  Vec2 edge_tangent(int k) const;
  /// Unit inward normal of edge k (direction of grad lambda_k).
  Vec2 edge_normal(int k) const;

  /// lambda_i grad lambda_j - lambda_j grad lambda_i for edge k = (i, j).
  Vec2 whitney(int k, const Vec2& p) const;
  /// lambda_i lambda_j grad lambda_k, unscaled.
  Vec2 bubble(int k, const Vec2& p) const;
  double whitney_curl(int k) const;
  double bubble_curl(int k, const Vec2& p) const;

  const BubbleCoefficientTable& bubble_coefficients() const { return coeff_; }
  BubbleCoefficients coefficients(int k) const;
  /// Factor s_l with basis bubble = s_l * bubble(l, .).
  double bubble_scale(int l) const { return scale_[l]; }

  std::array<Vec2, 6> values(const Vec2& p) const;
  std::array<double, 6> curls(const Vec2& p) const;

private:
  std::array<Vec2, 3> vertices_;
  std::array<Vec2, 3> grad_;
  double area_;
  BubbleCoefficientTable coeff_;
  std::array<double, 3> scale_;
};

/// Bubble coefficients from the decoupled conditions: the bubble of edge l is
/// nonzero only at the midpoint of edge l, so each coefficient is one division.
BubbleCoefficientTable solve_bubble_coefficients(const std::array<Vec2, 3>& vertices);

/// The same coefficients from the full 3x3 midpoint-normal system solved by
/// Gaussian elimination; throws Error if the system is numerically singular.
BubbleCoefficientTable solve_bubble_coefficients_dense(const std::array<Vec2, 3>& vertices);

/// Lowest-order edge space on an axis-aligned rectangle, local edges bottom,
/// right, top, left, oriented along +x / +y and dual to tangential moments.
class RectangleBasis
{
public:
  static constexpr int size = 4;

  explicit RectangleBasis(const BoundingBox& box);

  const BoundingBox& box() const { return box_; }
  double area() const { return hx_ * hy_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  Vec2 edge_midpoint(int k) const;
  double edge_length(int k) const { return k % 2 == 0 ? hx_ : hy_; }
  Vec2 edge_tangent(int k) const { return k % 2 == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }

  std::array<Vec2, 4> values(const Vec2& p) const;
  std::array<double, 4> curls(const Vec2& = {}) const;

private:
  BoundingBox box_;
  double hx_;
  double hy_;
};

/// Full lumped-quadrature matrix of the local basis; diagonal by construction.
LocalMatrix<6> lumped_mass_matrix(const TriangleBasis& basis);
LocalMatrix<4> lumped_mass_matrix(const RectangleBasis& basis);

/// Diagonal of the lumped mass matrix, after checking that the off-diagonal
/// part is below 1e-12 of the largest entry and the diagonal is positive;
/// throws LumpingFailure otherwise.
std::array<double, 6> local_mass_lumped(const TriangleBasis& basis);
std::array<double, 4> local_mass_lumped(const RectangleBasis& basis);

/// Exact L2 mass matrix (degree-4 rule), used for norm-equivalence checks.
LocalMatrix<6> exact_mass_matrix(const TriangleBasis& basis);
LocalMatrix<4> exact_mass_matrix(const RectangleBasis& basis);

/// Curl-curl block integrated exactly.
LocalMatrix<6> local_stiffness(const TriangleBasis& basis);
LocalMatrix<4> local_stiffness(const RectangleBasis& basis);

using LocalField = std::function<Vec2(const Vec2&)>;

/// Degrees of freedom of a field: tangential edge moments (2-point Gauss) and,
/// on triangles, the scaled normal components at the edge midpoints.
std::array<double, 6> apply_dofs(const TriangleBasis& basis, const LocalField& u);
std::array<double, 4> apply_dofs(const RectangleBasis& basis, const LocalField& u);

/// Type-erased local space of one mesh element with up to six functions.
/// Local functions are in local orientation; the mesh signs map them to the
/// global orientation.
class ElementBasis
{
public:
  static constexpr int max_size = 6;

  static ElementBasis of(const HybridMesh& mesh, int element);

  explicit ElementBasis(TriangleBasis tri) : basis_(std::move(tri)) {}
  explicit ElementBasis(RectangleBasis rect) : basis_(std::move(rect)) {}

  ElementKind kind() const
  {
    return std::holds_alternative<TriangleBasis>(basis_) ? ElementKind::Triangle
                                                         : ElementKind::Rectangle;
  }
  int size() const { return kind() == ElementKind::Triangle ? 6 : 4; }
  double area() const;

  const TriangleBasis* triangle() const { return std::get_if<TriangleBasis>(&basis_); }
  const RectangleBasis* rectangle() const { return std::get_if<RectangleBasis>(&basis_); }

  std::array<Vec2, max_size> values(const Vec2& p) const;
  std::array<double, max_size> curls(const Vec2& p) const;
  std::vector<QuadraturePoint> quadrature(int degree) const;
  std::array<double, max_size> mass_diagonal() const;
  LocalMatrix<max_size> stiffness() const;

private:
  std::variant<TriangleBasis, RectangleBasis> basis_;
};

} // namespace yeefem
