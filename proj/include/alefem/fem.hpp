#ifndef ALEFEM_FEM_HPP
#define ALEFEM_FEM_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "alefem/mesh.hpp"
#include "alefem/quadrature.hpp"

namespace alefem
{

/// Affine element data: vertex positions, area and barycentric gradients.
struct Element {
  std::array<Vec2, 3> x;
  std::array<Vec2, 3> grad_lambda;
  double area = 0.0;

  Element() = default;
  Element(const FittedMesh &mesh, std::size_t t)
  {
    for (int k = 0; k < 3; ++k)
      x[k] = mesh.vertices[mesh.triangles[t][k]];
    const double det = cross(x[1] - x[0], x[2] - x[0]);
    area = 0.5 * det;
    for (int k = 0; k < 3; ++k) {
      const Vec2 e = x[(k + 2) % 3] - x[(k + 1) % 3];
      grad_lambda[k] = Vec2{-e.z, e.r} / det;
    }
  }

  Vec2 point(const std::array<double, 3> &b) const
  {
    return b[0] * x[0] + b[1] * x[1] + b[2] * x[2];
  }
};

/// Quadratic Lagrange basis: vertices first, then edge midpoints, where
/// local edge k is opposite vertex k.
struct P2Basis {
  static std::array<double, 6> values(const std::array<double, 3> &l)
  {
    return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
            4 * l[1] * l[2],       4 * l[2] * l[0],       4 * l[0] * l[1]};
  }
  static std::array<Vec2, 6> gradients(const std::array<double, 3> &l, const Element &e)
  {
    const auto &g = e.grad_lambda;
    return {(4 * l[0] - 1) * g[0],
            (4 * l[1] - 1) * g[1],
            (4 * l[2] - 1) * g[2],
            4.0 * (l[1] * g[2] + l[2] * g[1]),
            4.0 * (l[2] * g[0] + l[0] * g[2]),
            4.0 * (l[0] * g[1] + l[1] * g[0])};
  }
};

/// Global P2 node numbers of a triangle: K + edge id for midpoints.
inline std::array<int, 6> p2_nodes(const FittedMesh &mesh, std::size_t t)
{
  const int K = static_cast<int>(mesh.num_vertices());
  const auto &v = mesh.triangles[t];
  const auto &e = mesh.tri_edges[t];
  return {v[0], v[1], v[2], K + e[0], K + e[1], K + e[2]};
}

inline Vec2 p2_node_position(const FittedMesh &mesh, std::size_t node)
{
  const std::size_t K = mesh.num_vertices();
  if (node < K)
    return mesh.vertices[node];
  const auto &e = mesh.edges[node - K];
  return 0.5 * (mesh.vertices[e[0]] + mesh.vertices[e[1]]);
}

/// Constrained P2 vector space. Unknown 2·node + c is component c at a P2
/// node; constrained unknowns are eliminated.
class VelocitySpace
{
public:
  VelocitySpace() = default;
  explicit VelocitySpace(const FittedMesh &mesh, bool constrained = true)
  {
    const std::size_t K = mesh.num_vertices();
    nodes_ = K + mesh.num_edges();
    std::vector<std::uint8_t> mask(nodes_, 0); // bit c set: component c fixed
    auto side_mask = [&](int side) -> std::uint8_t {
      switch (mesh.domain.kind(static_cast<cdt::Side>(side))) {
      case BoundaryKind::no_slip: return 3;
      case BoundaryKind::axis: return 1;
      case BoundaryKind::free_slip:
        return (side == int(cdt::Side::right) || side == int(cdt::Side::axis)) ? 1 : 2;
      }
      return 0;
    };
    if (constrained) {
      for (std::size_t v = 0; v < K; ++v)
        for (int s = 0; s < 4; ++s)
          if (mesh.vertex_sides[v] & (1u << s))
            mask[v] |= side_mask(s);
      for (std::size_t e = 0; e < mesh.num_edges(); ++e)
        if (mesh.edge_side[e] >= 0)
          mask[K + e] |= side_mask(mesh.edge_side[e]);
    }
    free_.assign(2 * nodes_, -1);
    int next = 0;
    for (std::size_t n = 0; n < nodes_; ++n)
      for (int c = 0; c < 2; ++c)
        if (!(mask[n] & (1u << c))) {
          free_[2 * n + c] = next++;
          full_.push_back(static_cast<int>(2 * n + c));
        }
  }

  /// Space without any boundary elimination (free numbering = full numbering).
  static VelocitySpace unconstrained(const FittedMesh &mesh) { return VelocitySpace(mesh, false); }

  std::size_t num_nodes() const { return nodes_; }
  int num_full() const { return static_cast<int>(2 * nodes_); }
  int num_free() const { return static_cast<int>(full_.size()); }
  int free_index(std::size_t node, int comp) const { return free_[2 * node + comp]; }
  int free_of_full(int full) const { return free_[full]; }
  int full_of_free(int f) const { return full_[f]; }

  Eigen::VectorXd restrict_vector(const Eigen::VectorXd &full) const
  {
    Eigen::VectorXd out(num_free());
    for (int i = 0; i < num_free(); ++i)
      out[i] = full[full_[i]];
    return out;
  }
  Eigen::VectorXd extend(const Eigen::VectorXd &reduced) const
  {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_full());
    for (int i = 0; i < num_free(); ++i)
      out[full_[i]] = reduced[i];
    return out;
  }

private:
  std::size_t nodes_ = 0;
  std::vector<int> free_;
  std::vector<int> full_;
};

/// Eliminates constrained velocity unknowns (zero data) from rows and columns.
inline SpMat apply_constraints(const VelocitySpace &space, const SpMat &full)
{
  Triplets trip;
  for (int k = 0; k < full.outerSize(); ++k)
    for (SpMat::InnerIterator it(full, k); it; ++it) {
      const int r = space.free_of_full(static_cast<int>(it.row()));
      const int c = space.free_of_full(static_cast<int>(it.col()));
      if (r >= 0 && c >= 0)
        trip.emplace_back(r, c, it.value());
    }
  SpMat out(space.num_free(), space.num_free());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

inline Eigen::VectorXd apply_constraints(const VelocitySpace &space, const Eigen::VectorXd &full)
{
  return space.restrict_vector(full);
}

/// P1 vertex values followed by one P0 value per triangle.
///
/// The representation has a two-dimensional null space (constants, and the
/// pair 1_P1 − 1_P0 which is the zero function). Two unknowns are pinned
/// to zero for the solve; the r-weighted mean is removed afterwards.
class PressureSpace
{
public:
  PressureSpace() = default;
  explicit PressureSpace(const FittedMesh &mesh)
      : K_(static_cast<int>(mesh.num_vertices())), T_(static_cast<int>(mesh.num_triangles()))
  {
    pinned_ = {0, K_};
    reduced_.assign(K_ + T_, -1);
    int next = 0;
    for (int i = 0; i < K_ + T_; ++i)
      if (i != pinned_[0] && i != pinned_[1]) {
        reduced_[i] = next++;
        full_.push_back(i);
      }
    weight_ = Eigen::VectorXd::Zero(K_ + T_);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const Element e(mesh, t);
      for (const auto &q : triangle_rule()) {
        const double w = q.weight * e.area * e.point(q.bary).r;
        for (int k = 0; k < 3; ++k)
          weight_[mesh.triangles[t][k]] += w * q.bary[k];
        weight_[K_ + t] += w;
      }
    }
  }

  int num_p1() const { return K_; }
  int num_p0() const { return T_; }
  int num_full() const { return K_ + T_; }
  int num_reduced() const { return static_cast<int>(full_.size()); }
  int p1(int vertex) const { return vertex; }
  int p0(int tri) const { return K_ + tri; }
  int reduced_index(int full) const { return reduced_[full]; }
  int full_of_reduced(int r) const { return full_[r]; }

  /// Vector of (r, ψ_i) for every basis function: the mean constraint.
  const Eigen::VectorXd &constraint() const { return weight_; }

  Eigen::VectorXd extend(const Eigen::VectorXd &reduced) const
  {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_full());
    for (int i = 0; i < num_reduced(); ++i)
      out[full_[i]] = reduced[i];
    return out;
  }

  /// Shifts the P1 part by a constant so that (r, p) = 0.
  Eigen::VectorXd project_mean_zero(Eigen::VectorXd p) const
  {
    const double total = weight_.head(K_).sum();
    const double c = weight_.dot(p) / total;
    p.head(K_).array() -= c;
    return p;
  }

  /// Pointwise value on triangle t at barycentric point l.
  double value(const FittedMesh &mesh, const Eigen::VectorXd &p, std::size_t t,
               const std::array<double, 3> &l) const
  {
    const auto &v = mesh.triangles[t];
    return l[0] * p[v[0]] + l[1] * p[v[1]] + l[2] * p[v[2]] + p[K_ + t];
  }

private:
  int K_ = 0, T_ = 0;
  std::array<int, 2> pinned_{};
  std::vector<int> reduced_;
  std::vector<int> full_;
  Eigen::VectorXd weight_;
};

/// P2 vector field in full (unconstrained) numbering.
struct VelocityField {
  Eigen::VectorXd coeffs;

  Vec2 value(const FittedMesh &mesh, std::size_t t, const std::array<double, 3> &l) const
  {
    const auto nodes = p2_nodes(mesh, t);
    const auto phi = P2Basis::values(l);
    Vec2 u{};
    for (int a = 0; a < 6; ++a)
      u += phi[a] * Vec2{coeffs[2 * nodes[a]], coeffs[2 * nodes[a] + 1]};
    return u;
  }

  /// Rows: component, columns: d/dr, d/dz.
  Eigen::Matrix2d gradient(const FittedMesh &mesh, const Element &e, std::size_t t,
                           const std::array<double, 3> &l) const
  {
    const auto nodes = p2_nodes(mesh, t);
    const auto g = P2Basis::gradients(l, e);
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    for (int a = 0; a < 6; ++a)
      for (int c = 0; c < 2; ++c) {
        G(c, 0) += coeffs[2 * nodes[a] + c] * g[a].r;
        G(c, 1) += coeffs[2 * nodes[a] + c] * g[a].z;
      }
    return G;
  }

  static VelocityField interpolate(const FittedMesh &mesh, const std::function<Vec2(const Vec2 &)> &f)
  {
    const std::size_t n = mesh.num_vertices() + mesh.num_edges();
    VelocityField u{Eigen::VectorXd(2 * n)};
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 v = f(p2_node_position(mesh, k));
      u.coeffs[2 * k] = v.r;
      u.coeffs[2 * k + 1] = v.z;
    }
    return u;
  }
};

/// P1 vector field per vertex (mesh velocity, displacements).
using NodalVectors = std::vector<Vec2>;

inline Vec2 p1_value(const FittedMesh &mesh, const NodalVectors &w, std::size_t t,
                     const std::array<double, 3> &l)
{
  const auto &v = mesh.triangles[t];
  return l[0] * w[v[0]] + l[1] * w[v[1]] + l[2] * w[v[2]];
}

enum class Weight { one, r, inv_r };

/// Integrand evaluated at a quadrature point of triangle t.
using PointFunction =
    std::function<double(std::size_t t, const std::array<double, 3> &l, const Vec2 &x)>;

/// Σ_T Σ_q w_q |T| weight(r_q) f g with the degree-5 rule.
inline double weighted_inner(const FittedMesh &mesh, const PointFunction &f, const PointFunction &g,
                             Weight weight)
{
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    for (const auto &q : triangle_rule()) {
      const Vec2 x = e.point(q.bary);
      const double wr = weight == Weight::one ? 1.0 : weight == Weight::r ? x.r : 1.0 / x.r;
      acc += q.weight * e.area * wr * f(t, q.bary, x) * g(t, q.bary, x);
    }
  }
  return acc;
}

/// Re-evaluates a P2 velocity and a P1 mesh velocity on another mesh of the
/// same rectangle by point location.
inline std::pair<VelocityField, NodalVectors> transfer_fields(const FittedMesh &old_mesh,
                                                              const FittedMesh &new_mesh,
                                                              const VelocityField &velocity,
                                                              const NodalVectors &mesh_velocity)
{
  const PointLocator loc(old_mesh);
  const VelocitySpace space(new_mesh);
  const std::size_t n = new_mesh.num_vertices() + new_mesh.num_edges();
  VelocityField u{Eigen::VectorXd::Zero(2 * n)};
  for (std::size_t k = 0; k < n; ++k) {
    const auto hit = loc.locate(p2_node_position(new_mesh, k));
    const Vec2 v = velocity.value(old_mesh, hit.triangle, hit.bary);
    for (int c = 0; c < 2; ++c)
      if (space.free_index(k, c) >= 0)
        u.coeffs[2 * k + c] = v[c];
  }
  NodalVectors w(new_mesh.num_vertices());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto hit = loc.locate(new_mesh.vertices[k]);
    w[k] = p1_value(old_mesh, mesh_velocity, hit.triangle, hit.bary);
    const std::uint8_t sides = new_mesh.vertex_sides[k];
    if (sides & (side_bits::axis | side_bits::right))
      w[k].r = 0.0;
    if (sides & (side_bits::bottom | side_bits::top))
      w[k].z = 0.0;
  }
  return {u, w};
}

} // namespace alefem

#endif
