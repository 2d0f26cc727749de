#include "yeefem/assembly.hpp"

#include "yeefem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace yeefem {

DofMap build_dof_map(const HybridMesh& mesh, const std::vector<int>& essential_edges)
{
  DofMap map;
  map.num_edges_ = mesh.num_edges();
  map.num_dofs_ = mesh.num_edges() + 3 * mesh.num_triangles();
  const int n_el = mesh.num_elements();
  map.sizes_.resize(n_el);
  map.element_dofs_.resize(n_el);
  map.element_signs_.resize(n_el);
  for (int el = 0; el < n_el; ++el)
  {
    const auto edges = mesh.element_edges(el);
    const auto signs = mesh.element_signs(el);
    auto& d = map.element_dofs_[el];
    auto& s = map.element_signs_[el];
    d.fill(-1);
    s.fill(0);
    for (std::size_t k = 0; k < edges.size(); ++k)
    {
      d[k] = map.edge_dof(edges[k]);
      s[k] = signs[k];
    }
    int size = static_cast<int>(edges.size());
    if (mesh.element_kind(el) == ElementKind::Triangle)
    {
      for (int k = 0; k < 3; ++k)
      {
        d[3 + k] = map.bubble_dof(el, k);
        s[3 + k] = 1;
      }
      size = 6;
    }
    map.sizes_[el] = size;
  }

  map.constrained_.assign(map.num_dofs_, 0);
  for (int e : essential_edges)
  {
    if (e < 0 || e >= mesh.num_edges())
      throw Error("essential edge " + std::to_string(e) + " does not exist");
    map.constrained_[map.edge_dof(e)] = 1;
  }
  for (int i = 0; i < map.num_dofs_; ++i)
    if (map.constrained_[i])
      map.dirichlet_.push_back(i);
  return map;
}

DofMap build_dof_map(const HybridMesh& mesh, std::span<const EdgeTag> essential_tags)
{
  std::vector<int> edges;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (std::find(essential_tags.begin(), essential_tags.end(), mesh.edge_tag(e)) != essential_tags.end())
      edges.push_back(e);
  return build_dof_map(mesh, edges);
}

DofMap build_dof_map(const HybridMesh& mesh)
{
  constexpr std::array tags{EdgeTag::Left, EdgeTag::Ball};
  return build_dof_map(mesh, std::span<const EdgeTag>(tags));
}

void DiagonalOperator::apply(std::span<const double> x, std::span<double> y) const
{
  for (std::size_t i = 0; i < diag_.size(); ++i)
    y[i] = diag_[i] * x[i];
}

void DiagonalOperator::solve(std::span<const double> x, std::span<double> y) const
{
  for (std::size_t i = 0; i < diag_.size(); ++i)
    y[i] = x[i] / diag_[i];
}

SparseOperator SparseOperator::from_triplets(int n, std::vector<Triplet> triplets)
{
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.n_ = n;
  op.row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < triplets.size();)
  {
    const auto& t = triplets[i];
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw Error("sparse entry out of range");
    double sum = 0.0;
    std::size_t j = i;
    for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j)
      sum += triplets[j].value;
    op.cols_.push_back(t.col);
    op.values_.push_back(sum);
    ++op.row_ptr_[t.row + 1];
    i = j;
  }
  for (int r = 0; r < n; ++r)
    op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

double SparseOperator::entry(int i, int j) const
{
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  return it != end && *it == j ? values_[it - cols_.begin()] : 0.0;
}

double SparseOperator::max_abs() const
{
  double m = 0.0;
  for (double v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const
{
  for (int r = 0; r < n_; ++r)
  {
    double s = 0.0;
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      s += values_[k] * x[cols_[k]];
    y[r] = s;
  }
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const
{
  std::vector<double> y(n_);
  apply(x, y);
  return y;
}

double SparseOperator::asymmetry() const
{
  double worst = 0.0;
  for (int r = 0; r < n_; ++r)
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      worst = std::max(worst, std::abs(values_[k] - entry(cols_[k], r)));
  return worst;
}

std::array<double, DofMap::max_local> gather(const DofMap& dofs, std::span<const double> coeffs,
                                             int element)
{
  std::array<double, DofMap::max_local> local{};
  const auto d = dofs.dofs(element);
  const auto s = dofs.signs(element);
  for (std::size_t a = 0; a < d.size(); ++a)
    local[a] = s[a] * coeffs[d[a]];
  return local;
}

namespace {

template <class LocalBlock>
SparseOperator assemble_blocks(const HybridMesh& mesh, const DofMap& dofs, LocalBlock block)
{
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * 36);
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto local = block(ElementBasis::of(mesh, el));
    const auto d = dofs.dofs(el);
    const auto s = dofs.signs(el);
    for (std::size_t a = 0; a < d.size(); ++a)
      for (std::size_t b = 0; b < d.size(); ++b)
        triplets.push_back({d[a], d[b], s[a] * s[b] * local[a][b]});
  }
  return SparseOperator::from_triplets(dofs.num_dofs(), std::move(triplets));
}

template <int N>
LocalMatrix<ElementBasis::max_size> widen(const LocalMatrix<N>& m)
{
  LocalMatrix<ElementBasis::max_size> out{};
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      out[a][b] = m[a][b];
  return out;
}

LocalMatrix<ElementBasis::max_size> local_mass_full(const ElementBasis& basis, MassKind kind)
{
  if (const auto* t = basis.triangle())
    return widen<6>(kind == MassKind::Lumped ? lumped_mass_matrix(*t) : exact_mass_matrix(*t));
  const auto& r = *basis.rectangle();
  return widen<4>(kind == MassKind::Lumped ? lumped_mass_matrix(r) : exact_mass_matrix(r));
}

} // namespace

DiagonalOperator assemble_mass(const HybridMesh& mesh, const DofMap& dofs)
{
  std::vector<double> diag(dofs.num_dofs(), 0.0);
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto local = ElementBasis::of(mesh, el).mass_diagonal();
    const auto d = dofs.dofs(el);
    for (std::size_t a = 0; a < d.size(); ++a)
      diag[d[a]] += local[a];
  }
  for (int i = 0; i < dofs.num_dofs(); ++i)
    if (!(diag[i] > 0.0))
      throw LumpingFailure("lumped mass entry of DOF " + std::to_string(i) + " is not positive");
  return DiagonalOperator(std::move(diag));
}

SparseOperator assemble_mass_matrix(const HybridMesh& mesh, const DofMap& dofs, MassKind kind)
{
  return assemble_blocks(mesh, dofs, [kind](const ElementBasis& b) { return local_mass_full(b, kind); });
}

SparseOperator assemble_stiffness(const HybridMesh& mesh, const DofMap& dofs)
{
  return assemble_blocks(mesh, dofs, [](const ElementBasis& b) { return b.stiffness(); });
}

std::vector<double> assemble_load(const HybridMesh& mesh, const DofMap& dofs, const SpaceTimeField& f,
                                  double t)
{
  std::vector<double> load(dofs.num_dofs(), 0.0);
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto basis = ElementBasis::of(mesh, el);
    const auto d = dofs.dofs(el);
    const auto s = dofs.signs(el);
    std::array<double, DofMap::max_local> local{};
    for (const auto& q : basis.quadrature(4))
    {
      const Vec2 fq = f(q.point, t);
      const auto v = basis.values(q.point);
      for (std::size_t a = 0; a < d.size(); ++a)
        local[a] += q.weight * dot(fq, v[a]);
    }
    for (std::size_t a = 0; a < d.size(); ++a)
      load[d[a]] += s[a] * local[a];
  }
  return load;
}

void apply_essential_bc(const HybridMesh& mesh, const DofMap& dofs, const TraceFunction& g, double t,
                        std::span<double> coeffs)
{
  for (int dof : dofs.dirichlet_dofs())
  {
    const int e = dof; // edge DOFs are numbered by edge
    coeffs[dof] =
      mesh.boundary_orientation(e) * g(mesh.edge_midpoint(e), mesh.edge_tag(e), t) * mesh.edge_length(e);
  }
}

std::vector<double> project_pi_h(const HybridMesh& mesh, const DofMap& dofs, const SpaceField& e)
{
  std::vector<double> coeffs(dofs.num_dofs(), 0.0);
  for (int edge = 0; edge < mesh.num_edges(); ++edge)
  {
    const auto& ed = mesh.edges()[edge];
    const Vec2 a = mesh.vertices()[ed.v0];
    const Vec2 b = mesh.vertices()[ed.v1];
    const Vec2 tangent = mesh.edge_tangent(edge);
    double moment = 0.0;
    for (const auto& q : segment_rule(a, b, 3))
      moment += q.weight * dot(e(q.point), tangent);
    coeffs[dofs.edge_dof(edge)] = moment;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const TriangleBasis basis(mesh.triangle_points(t));
    const auto local = gather(dofs, coeffs, t);
    for (int l = 0; l < 3; ++l)
    {
      const Vec2 m = basis.edge_midpoint(l);
      Vec2 w{};
      for (int k = 0; k < 3; ++k)
        w = w + local[k] * basis.whitney(k, m);
      coeffs[dofs.bubble_dof(t, l)] = basis.edge_length(l) * dot(w, basis.edge_normal(l));
    }
  }
  return coeffs;
}

std::vector<Vec2> project_pi0(const HybridMesh& mesh, const SpaceField& e)
{
  std::vector<Vec2> means(mesh.num_elements());
  for (int el = 0; el < mesh.num_elements(); ++el)
  {
    const auto basis = ElementBasis::of(mesh, el);
    Vec2 sum{};
    for (const auto& q : basis.quadrature(4))
      sum = sum + q.weight * e(q.point);
    means[el] = (1.0 / basis.area()) * sum;
  }
  return means;
}

std::vector<double> discrete_gradient(const HybridMesh& mesh, const DofMap& dofs,
                                      std::span<const double> vertex_values)
{
  std::vector<double> coeffs(dofs.num_dofs(), 0.0);
  for (int edge = 0; edge < mesh.num_edges(); ++edge)
  {
    const auto& ed = mesh.edges()[edge];
    coeffs[dofs.edge_dof(edge)] = vertex_values[ed.v1] - vertex_values[ed.v0];
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const TriangleBasis basis(mesh.triangle_points(t));
    const auto& tri = mesh.triangles()[t];
    Vec2 grad{};
    for (int i = 0; i < 3; ++i)
      grad = grad + vertex_values[tri[i]] * basis.gradients()[i];
    for (int l = 0; l < 3; ++l)
      coeffs[dofs.bubble_dof(t, l)] = basis.edge_length(l) * dot(grad, basis.edge_normal(l));
  }
  return coeffs;
}

Vec2 evaluate_field(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                    int element, const Vec2& p)
{
  const auto basis = ElementBasis::of(mesh, element);
  const auto local = gather(dofs, coeffs, element);
  const auto v = basis.values(p);
  Vec2 out{};
  for (int a = 0; a < basis.size(); ++a)
    out = out + local[a] * v[a];
  return out;
}

double evaluate_curl(const HybridMesh& mesh, const DofMap& dofs, std::span<const double> coeffs,
                     int element, const Vec2& p)
{
  const auto basis = ElementBasis::of(mesh, element);
  const auto local = gather(dofs, coeffs, element);
  const auto c = basis.curls(p);
  double out = 0.0;
  for (int a = 0; a < basis.size(); ++a)
    out += local[a] * c[a];
  return out;
}

} // namespace yeefem
