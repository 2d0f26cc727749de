#include "yeefem/element.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yeefem {

namespace {

constexpr int next(int k) { return (k + 1) % 3; }
constexpr int prev(int k) { return (k + 2) % 3; }

template <int N, class Values>
LocalMatrix<N> lumped_matrix(const LumpingQuadrature& rule, const Values& values)
{
  LocalMatrix<N> m{};
  for (const auto& q : rule.first)
  {
    const auto v = values(q.point);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        m[a][b] += q.weight * v[a].x * v[b].x;
  }
  for (const auto& q : rule.second)
  {
    const auto v = values(q.point);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        m[a][b] += q.weight * v[a].y * v[b].y;
  }
  return m;
}

template <int N>
std::array<double, N> checked_diagonal(const LocalMatrix<N>& m, const char* what)
{
  std::array<double, N> diag{};
  double max_diag = 0.0;
  for (int a = 0; a < N; ++a)
  {
    diag[a] = m[a][a];
    max_diag = std::max(max_diag, std::abs(diag[a]));
  }
  for (int a = 0; a < N; ++a)
  {
    if (!(diag[a] > 0.0))
      throw LumpingFailure(std::string(what) + ": non-positive lumped mass entry " +
                           std::to_string(a));
    for (int b = 0; b < N; ++b)
      if (a != b && std::abs(m[a][b]) > 1e-12 * max_diag)
        throw LumpingFailure(std::string(what) + ": lumped mass is not diagonal at (" +
                             std::to_string(a) + "," + std::to_string(b) + ")");
  }
  return diag;
}

template <int N, class Basis>
LocalMatrix<N> integrate_products(const std::vector<QuadraturePoint>& rule, const Basis& basis)
{
  LocalMatrix<N> m{};
  for (const auto& q : rule)
  {
    const auto v = basis.values(q.point);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        m[a][b] += q.weight * dot(v[a], v[b]);
  }
  return m;
}

} // namespace

std::array<Vec2, 3> barycentric_gradients(const std::array<Vec2, 3>& p)
{
  const double area2 = signed_area2(p[0], p[1], p[2]);
  const double scale = std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
  if (!(area2 > 1e-14 * scale * scale))
    throw InvalidGeometry("triangle has zero or negative area");
  std::array<Vec2, 3> grad;
  for (int k = 0; k < 3; ++k)
    grad[k] = (1.0 / area2) * perp(p[prev(k)] - p[next(k)]);
  return grad;
}

BubbleCoefficientTable solve_bubble_coefficients(const std::array<Vec2, 3>& vertices)
{
  const auto grad = barycentric_gradients(vertices);
  BubbleCoefficientTable c{};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
    {
      // at the midpoint of edge l: lambda_l = 0, the other two are 1/2
      std::array<double, 3> lam{0.5, 0.5, 0.5};
      lam[l] = 0.0;
      const int i = next(k), j = prev(k);
      const Vec2 w = lam[i] * grad[j] - lam[j] * grad[i];
      // the bubble of edge l equals grad lambda_l / 4 there
      c[k][l] = -4.0 * dot(w, grad[l]) / dot(grad[l], grad[l]);
    }
  return c;
}

BubbleCoefficientTable solve_bubble_coefficients_dense(const std::array<Vec2, 3>& vertices)
{
  const TriangleBasis basis(vertices);
  std::array<std::array<double, 3>, 3> a{};
  double amax = 0.0;
  for (int m = 0; m < 3; ++m)
    for (int l = 0; l < 3; ++l)
    {
      a[m][l] = dot(basis.bubble(l, basis.edge_midpoint(m)), basis.edge_normal(m));
      amax = std::max(amax, std::abs(a[m][l]));
    }

  BubbleCoefficientTable c{};
  for (int k = 0; k < 3; ++k)
  {
    auto mat = a;
    std::array<double, 3> rhs{};
    for (int m = 0; m < 3; ++m)
      rhs[m] = -dot(basis.whitney(k, basis.edge_midpoint(m)), basis.edge_normal(m));

    for (int col = 0; col < 3; ++col)
    {
      int pivot = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(mat[r][col]) > std::abs(mat[pivot][col]))
          pivot = r;
      if (std::abs(mat[pivot][col]) <= 1e-14 * amax)
        throw Error("bubble coefficient system is singular for this triangle");
      std::swap(mat[pivot], mat[col]);
      std::swap(rhs[pivot], rhs[col]);
      for (int r = col + 1; r < 3; ++r)
      {
        const double f = mat[r][col] / mat[col][col];
        for (int cc = col; cc < 3; ++cc)
          mat[r][cc] -= f * mat[col][cc];
        rhs[r] -= f * rhs[col];
      }
    }
    for (int r = 2; r >= 0; --r)
    {
      double s = rhs[r];
      for (int cc = r + 1; cc < 3; ++cc)
        s -= mat[r][cc] * c[k][cc];
      c[k][r] = s / mat[r][r];
    }
  }
  return c;
}

TriangleBasis::TriangleBasis(const std::array<Vec2, 3>& vertices)
  : vertices_(vertices),
    grad_(barycentric_gradients(vertices)),
    area_(0.5 * signed_area2(vertices[0], vertices[1], vertices[2])),
    coeff_(solve_bubble_coefficients(vertices))
{
  for (int l = 0; l < 3; ++l)
  {
    const double len = edge_length(l);
    scale_[l] = 8.0 * area_ / (len * len);
  }
}

std::array<double, 3> TriangleBasis::barycentric(const Vec2& p) const
{
  std::array<double, 3> lam;
  for (int k = 0; k < 3; ++k)
    lam[k] = dot(grad_[k], p - vertices_[next(k)]);
  return lam;
}

Vec2 TriangleBasis::edge_midpoint(int k) const
{
  return midpoint(vertices_[next(k)], vertices_[prev(k)]);
}

double TriangleBasis::edge_length(int k) const
{
  return norm(vertices_[prev(k)] - vertices_[next(k)]);
}

Vec2 TriangleBasis::edge_tangent(int k) const
{
  return (1.0 / edge_length(k)) * (vertices_[prev(k)] - vertices_[next(k)]);
}

Vec2 TriangleBasis::edge_normal(int k) const { return (1.0 / norm(grad_[k])) * grad_[k]; }

Vec2 TriangleBasis::whitney(int k, const Vec2& p) const
{
  const auto lam = barycentric(p);
  const int i = next(k), j = prev(k);
  return lam[i] * grad_[j] - lam[j] * grad_[i];
}

Vec2 TriangleBasis::bubble(int k, const Vec2& p) const
{
  const auto lam = barycentric(p);
  return (lam[next(k)] * lam[prev(k)]) * grad_[k];
}

double TriangleBasis::whitney_curl(int k) const
{
  return 2.0 * cross(grad_[next(k)], grad_[prev(k)]);
}

double TriangleBasis::bubble_curl(int k, const Vec2& p) const
{
  const auto lam = barycentric(p);
  const int i = next(k), j = prev(k);
  return lam[j] * cross(grad_[i], grad_[k]) + lam[i] * cross(grad_[j], grad_[k]);
}

BubbleCoefficients TriangleBasis::coefficients(int k) const
{
  // Phi_ij^B is the bubble of edge k; Phi_jk^B that of the edge opposite i,
  // Phi_ki^B that of the edge opposite j.
  return {coeff_[k][k], coeff_[k][next(k)], coeff_[k][prev(k)]};
}

std::array<Vec2, 6> TriangleBasis::values(const Vec2& p) const
{
  const auto lam = barycentric(p);
  std::array<Vec2, 3> b;
  for (int l = 0; l < 3; ++l)
    b[l] = (lam[next(l)] * lam[prev(l)]) * grad_[l];

  std::array<Vec2, 6> out;
  for (int k = 0; k < 3; ++k)
  {
    const int i = next(k), j = prev(k);
    Vec2 v = lam[i] * grad_[j] - lam[j] * grad_[i];
    for (int l = 0; l < 3; ++l)
      v += coeff_[k][l] * b[l];
    out[k] = v;
    out[3 + k] = scale_[k] * b[k];
  }
  return out;
}

std::array<double, 6> TriangleBasis::curls(const Vec2& p) const
{
  std::array<double, 3> bc;
  for (int l = 0; l < 3; ++l)
    bc[l] = bubble_curl(l, p);
  std::array<double, 6> out;
  for (int k = 0; k < 3; ++k)
  {
    double c = whitney_curl(k);
    for (int l = 0; l < 3; ++l)
      c += coeff_[k][l] * bc[l];
    out[k] = c;
    out[3 + k] = scale_[k] * bc[k];
  }
  return out;
}

RectangleBasis::RectangleBasis(const BoundingBox& box)
  : box_(box), hx_(box.hi.x - box.lo.x), hy_(box.hi.y - box.lo.y)
{
  if (!(hx_ > 0.0) || !(hy_ > 0.0))
    throw InvalidGeometry("rectangle has non-positive side length");
}

Vec2 RectangleBasis::edge_midpoint(int k) const
{
  const Vec2 c = midpoint(box_.lo, box_.hi);
  switch (k)
  {
  case rect_side::bottom:
    return {c.x, box_.lo.y};
  case rect_side::right:
    return {box_.hi.x, c.y};
  case rect_side::top:
    return {c.x, box_.hi.y};
  default:
    return {box_.lo.x, c.y};
  }
}

std::array<Vec2, 4> RectangleBasis::values(const Vec2& p) const
{
  const double inv = 1.0 / (hx_ * hy_);
  return {Vec2{(box_.hi.y - p.y) * inv, 0.0}, Vec2{0.0, (p.x - box_.lo.x) * inv},
          Vec2{(p.y - box_.lo.y) * inv, 0.0}, Vec2{0.0, (box_.hi.x - p.x) * inv}};
}

std::array<double, 4> RectangleBasis::curls(const Vec2&) const
{
  const double inv = 1.0 / (hx_ * hy_);
  return {inv, inv, -inv, -inv};
}

LocalMatrix<6> lumped_mass_matrix(const TriangleBasis& basis)
{
  return lumped_matrix<6>(lumping_rule(basis.vertices()),
                          [&](const Vec2& p) { return basis.values(p); });
}

LocalMatrix<4> lumped_mass_matrix(const RectangleBasis& basis)
{
  return lumped_matrix<4>(lumping_rule(basis.box()), [&](const Vec2& p) { return basis.values(p); });
}

std::array<double, 6> local_mass_lumped(const TriangleBasis& basis)
{
  return checked_diagonal<6>(lumped_mass_matrix(basis), "triangle");
}

std::array<double, 4> local_mass_lumped(const RectangleBasis& basis)
{
  return checked_diagonal<4>(lumped_mass_matrix(basis), "rectangle");
}

LocalMatrix<6> exact_mass_matrix(const TriangleBasis& basis)
{
  return integrate_products<6>(triangle_rule(basis.vertices(), 4), basis);
}

LocalMatrix<4> exact_mass_matrix(const RectangleBasis& basis)
{
  return integrate_products<4>(rectangle_rule(basis.box(), 4), basis);
}

LocalMatrix<6> local_stiffness(const TriangleBasis& basis)
{
  LocalMatrix<6> k{};
  for (const auto& q : triangle_rule(basis.vertices(), 4))
  {
    const auto c = basis.curls(q.point);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        k[a][b] += q.weight * c[a] * c[b];
  }
  return k;
}

LocalMatrix<4> local_stiffness(const RectangleBasis& basis)
{
  const auto c = basis.curls();
  LocalMatrix<4> k{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      k[a][b] = basis.area() * c[a] * c[b];
  return k;
}

std::array<double, 6> apply_dofs(const TriangleBasis& basis, const LocalField& u)
{
  std::array<double, 6> dofs{};
  const auto& v = basis.vertices();
  for (int k = 0; k < 3; ++k)
  {
    const Vec2 t = basis.edge_tangent(k);
    for (const auto& q : segment_rule(v[next(k)], v[prev(k)], 2))
      dofs[k] += q.weight * dot(u(q.point), t);
    dofs[3 + k] = basis.edge_length(k) * dot(u(basis.edge_midpoint(k)), basis.edge_normal(k));
  }
  return dofs;
}

std::array<double, 4> apply_dofs(const RectangleBasis& basis, const LocalField& u)
{
  const auto& b = basis.box();
  const std::array<std::pair<Vec2, Vec2>, 4> sides = {
    std::pair{b.lo, Vec2{b.hi.x, b.lo.y}}, {Vec2{b.hi.x, b.lo.y}, b.hi}, {Vec2{b.lo.x, b.hi.y}, b.hi},
    {b.lo, Vec2{b.lo.x, b.hi.y}}};
  std::array<double, 4> dofs{};
  for (int k = 0; k < 4; ++k)
    for (const auto& q : segment_rule(sides[k].first, sides[k].second, 2))
      dofs[k] += q.weight * dot(u(q.point), basis.edge_tangent(k));
  return dofs;
}

ElementBasis ElementBasis::of(const HybridMesh& mesh, int element)
{
  if (mesh.element_kind(element) == ElementKind::Triangle)
    return ElementBasis(TriangleBasis(mesh.triangle_points(element)));
  return ElementBasis(RectangleBasis(mesh.rectangle_box(mesh.local_index(element))));
}

double ElementBasis::area() const
{
  return std::visit([](const auto& b) { return b.area(); }, basis_);
}

std::array<Vec2, ElementBasis::max_size> ElementBasis::values(const Vec2& p) const
{
  std::array<Vec2, max_size> out{};
  std::visit(
    [&](const auto& b) {
      const auto v = b.values(p);
      std::copy(v.begin(), v.end(), out.begin());
    },
    basis_);
  return out;
}

std::array<double, ElementBasis::max_size> ElementBasis::curls(const Vec2& p) const
{
  std::array<double, max_size> out{};
  std::visit(
    [&](const auto& b) {
      const auto c = b.curls(p);
      std::copy(c.begin(), c.end(), out.begin());
    },
    basis_);
  return out;
}

std::vector<QuadraturePoint> ElementBasis::quadrature(int degree) const
{
  if (const auto* t = triangle())
    return triangle_rule(t->vertices(), degree);
  return rectangle_rule(rectangle()->box(), degree);
}

std::array<double, ElementBasis::max_size> ElementBasis::mass_diagonal() const
{
  std::array<double, max_size> out{};
  std::visit(
    [&](const auto& b) {
      const auto d = local_mass_lumped(b);
      std::copy(d.begin(), d.end(), out.begin());
    },
    basis_);
  return out;
}

LocalMatrix<ElementBasis::max_size> ElementBasis::stiffness() const
{
  LocalMatrix<max_size> out{};
  std::visit(
    [&](const auto& b) {
      const auto k = local_stiffness(b);
      for (std::size_t a = 0; a < k.size(); ++a)
        std::copy(k[a].begin(), k[a].end(), out[a].begin());
    },
    basis_);
  return out;
}

} // namespace yeefem
