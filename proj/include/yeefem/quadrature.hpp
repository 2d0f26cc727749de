#pragma once

#include "yeefem/geometry.hpp"
#include "yeefem/mesh.hpp"

#include <array>
#include <vector>

namespace yeefem {

struct QuadraturePoint
{
  Vec2 point;
  double weight;
};

/// Symmetric rule on a physical triangle exact for total degree `degree`
/// (supported up to 6; requests are rounded up to the next available rule).
std::vector<QuadraturePoint> triangle_rule(const std::array<Vec2, 3>& tri, int degree);

/// Tensor Gauss-Legendre rule on an axis-aligned rectangle exact for degree
/// `degree` in each variable (up to 9).
std::vector<QuadraturePoint> rectangle_rule(const BoundingBox& box, int degree);

/// Gauss-Legendre rule with `points` nodes (1..5) on the segment a -> b.
std::vector<QuadraturePoint> segment_rule(const Vec2& a, const Vec2& b, int points);

/// Mass-lumping quadrature: (u, v)_{h,K} = sum over `first` of w u1 v1 plus sum
/// over `second` of w u2 v2. On triangles both lists are the three edge
/// midpoints with weight |K|/3; on rectangles the first component is sampled at
/// the two horizontal-edge midpoints and the second at the two vertical-edge
/// midpoints, each with weight |K|/2.
struct LumpingQuadrature
{
  std::vector<QuadraturePoint> first;
  std::vector<QuadraturePoint> second;

  template <class U, class V>
  double inner(U&& u, V&& v) const
  {
    double s = 0.0;
    for (const auto& q : first)
      s += q.weight * u(q.point).x * v(q.point).x;
    for (const auto& q : second)
      s += q.weight * u(q.point).y * v(q.point).y;
    return s;
  }
};

LumpingQuadrature lumping_rule(const std::array<Vec2, 3>& tri);
LumpingQuadrature lumping_rule(const BoundingBox& box);

/// Analytic integral of x^p y^q over a triangle, via the barycentric moment
/// formula  int lambda^a = 2|K| a! b! c! / (a+b+c+2)!.
double monomial_integral(const std::array<Vec2, 3>& tri, int p, int q);
double monomial_integral(const BoundingBox& box, int p, int q);

/// Largest |lumped rule - exact integral| over the monomials x^p y^q with
/// p + q = degree, on the given element. On rectangles the monomials are
/// integrated against each component's rule and the maximum is returned.
double check_quadrature_exactness(const std::array<Vec2, 3>& tri, int degree);
double check_quadrature_exactness(const BoundingBox& box, int degree);

} // namespace yeefem
