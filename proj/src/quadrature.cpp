#include "yeefem/quadrature.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace yeefem {

namespace {

struct BarycentricPoint
{
  double l0, l1, l2, weight;
};

std::vector<BarycentricPoint> reference_triangle_rule(int degree)
{
  auto orbit3 = [](double a, double w, std::vector<BarycentricPoint>& out) {
    const double b = 1.0 - 2.0 * a;
    out.push_back({b, a, a, w});
    out.push_back({a, b, a, w});
    out.push_back({a, a, b, w});
  };
  auto orbit6 = [](double a, double b, double w, std::vector<BarycentricPoint>& out) {
    const double c = 1.0 - a - b;
    out.push_back({a, b, c, w});
    out.push_back({a, c, b, w});
    out.push_back({b, a, c, w});
    out.push_back({b, c, a, w});
    out.push_back({c, a, b, w});
    out.push_back({c, b, a, w});
  };

  std::vector<BarycentricPoint> rule;
  if (degree <= 1)
  {
    rule.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0});
  }
  else if (degree == 2)
  {
    orbit3(1.0 / 6.0, 1.0 / 3.0, rule);
  }
  else if (degree <= 4)
  {
    // Dunavant, 6 points
    orbit3(0.44594849091596489, 0.22338158967801147, rule);
    orbit3(0.091576213509770743, 0.10995174365532187, rule);
  }
  else if (degree <= 6)
  {
    // Dunavant, 12 points
    orbit3(0.24928674517091042, 0.11678627572637937, rule);
    orbit3(0.063089014491502228, 0.050844906370206817, rule);
    orbit6(0.053145049844816947, 0.31035245103378440, 0.082851075618373575, rule);
  }
  else
  {
    throw Error("triangle quadrature above degree 6 is not available");
  }
  return rule;
}

struct GaussRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int points)
{
  switch (points)
  {
  case 1:
    return {{0.0}, {2.0}};
  case 2:
  {
    const double a = 1.0 / std::sqrt(3.0);
    return {{-a, a}, {1.0, 1.0}};
  }
  case 3:
  {
    const double a = std::sqrt(0.6);
    return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  }
  case 4:
    return {{-0.86113631159405258, -0.33998104358485626, 0.33998104358485626, 0.86113631159405258},
            {0.34785484513745386, 0.65214515486254614, 0.65214515486254614, 0.34785484513745386}};
  case 5:
    return {{-0.90617984593866399, -0.53846931010568309, 0.0, 0.53846931010568309,
             0.90617984593866399},
            {0.23692688505618909, 0.47862867049936647, 0.56888888888888889, 0.47862867049936647,
             0.23692688505618909}};
  default:
    throw Error("Gauss-Legendre rule with " + std::to_string(points) + " points is not available");
  }
}

double factorial(int n)
{
  double f = 1.0;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}

using BaryPoly = std::map<std::array<int, 3>, double>;

BaryPoly multiply_linear(const BaryPoly& poly, const std::array<double, 3>& linear)
{
  BaryPoly out;
  for (const auto& [exp, c] : poly)
    for (int i = 0; i < 3; ++i)
    {
      auto e = exp;
      ++e[i];
      out[e] += c * linear[i];
    }
  return out;
}

template <class Rule>
double lumping_error(const LumpingQuadrature& rule, const Rule& exact, int degree)
{
  double worst = 0.0;
  for (int p = degree; p >= 0; --p)
  {
    const int q = degree - p;
    auto mono = [p, q](const Vec2& x) { return std::pow(x.x, p) * std::pow(x.y, q); };
    const double reference = exact(p, q);
    double first = 0.0, second = 0.0;
    for (const auto& pt : rule.first)
      first += pt.weight * mono(pt.point);
    for (const auto& pt : rule.second)
      second += pt.weight * mono(pt.point);
    worst = std::max({worst, std::abs(first - reference), std::abs(second - reference)});
  }
  return worst;
}

} // namespace

std::vector<QuadraturePoint> triangle_rule(const std::array<Vec2, 3>& tri, int degree)
{
  const double area = 0.5 * signed_area2(tri[0], tri[1], tri[2]);
  std::vector<QuadraturePoint> out;
  for (const auto& q : reference_triangle_rule(degree))
    out.push_back({q.l0 * tri[0] + q.l1 * tri[1] + q.l2 * tri[2], q.weight * area});
  return out;
}

std::vector<QuadraturePoint> rectangle_rule(const BoundingBox& box, int degree)
{
  const int points = std::max(1, (degree + 2) / 2);
  const auto g = gauss_legendre(points);
  const Vec2 c = midpoint(box.lo, box.hi);
  const Vec2 half = 0.5 * (box.hi - box.lo);
  std::vector<QuadraturePoint> out;
  for (int j = 0; j < points; ++j)
    for (int i = 0; i < points; ++i)
      out.push_back({{c.x + half.x * g.nodes[i], c.y + half.y * g.nodes[j]},
                     g.weights[i] * g.weights[j] * half.x * half.y});
  return out;
}

std::vector<QuadraturePoint> segment_rule(const Vec2& a, const Vec2& b, int points)
{
  const auto g = gauss_legendre(points);
  const double half = 0.5 * norm(b - a);
  std::vector<QuadraturePoint> out;
  for (int i = 0; i < points; ++i)
    out.push_back({midpoint(a, b) + (0.5 * g.nodes[i]) * (b - a), g.weights[i] * half});
  return out;
}

LumpingQuadrature lumping_rule(const std::array<Vec2, 3>& tri)
{
  const double w = signed_area2(tri[0], tri[1], tri[2]) / 6.0;
  LumpingQuadrature rule;
  for (int k = 0; k < 3; ++k)
    rule.first.push_back({midpoint(tri[(k + 1) % 3], tri[(k + 2) % 3]), w});
  rule.second = rule.first;
  return rule;
}

LumpingQuadrature lumping_rule(const BoundingBox& box)
{
  const double w = 0.5 * (box.hi.x - box.lo.x) * (box.hi.y - box.lo.y);
  const Vec2 c = midpoint(box.lo, box.hi);
  LumpingQuadrature rule;
  rule.first = {{{c.x, box.lo.y}, w}, {{c.x, box.hi.y}, w}};
  rule.second = {{{box.lo.x, c.y}, w}, {{box.hi.x, c.y}, w}};
  return rule;
}

double monomial_integral(const std::array<Vec2, 3>& tri, int p, int q)
{
  BaryPoly poly{{{0, 0, 0}, 1.0}};
  for (int i = 0; i < p; ++i)
    poly = multiply_linear(poly, {tri[0].x, tri[1].x, tri[2].x});
  for (int i = 0; i < q; ++i)
    poly = multiply_linear(poly, {tri[0].y, tri[1].y, tri[2].y});

  const double area = 0.5 * signed_area2(tri[0], tri[1], tri[2]);
  double sum = 0.0;
  for (const auto& [e, c] : poly)
    sum += c * 2.0 * area * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) /
           factorial(e[0] + e[1] + e[2] + 2);
  return sum;
}

double monomial_integral(const BoundingBox& box, int p, int q)
{
  const double ix = (std::pow(box.hi.x, p + 1) - std::pow(box.lo.x, p + 1)) / (p + 1);
  const double iy = (std::pow(box.hi.y, q + 1) - std::pow(box.lo.y, q + 1)) / (q + 1);
  return ix * iy;
}

double check_quadrature_exactness(const std::array<Vec2, 3>& tri, int degree)
{
  return lumping_error(lumping_rule(tri), [&](int p, int q) { return monomial_integral(tri, p, q); },
                       degree);
}

double check_quadrature_exactness(const BoundingBox& box, int degree)
{
  return lumping_error(lumping_rule(box), [&](int p, int q) { return monomial_integral(box, p, q); },
                       degree);
}

} // namespace yeefem
