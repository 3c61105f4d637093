#ifndef ALEFEM_ALE_HPP
#define ALEFEM_ALE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/SparseCholesky>

#include "alefem/fem.hpp"

namespace alefem
{

/// One step of mesh motion from T^{m-1} (old) to T^m (new), same
/// connectivity. The ALE map at time fraction s ∈ [0,1] of the step takes a
/// new-mesh point x to x − (1 − s) Δt W(x).
struct AleStep {
  FittedMesh old_mesh;
  FittedMesh new_mesh;
  NodalVectors W;          // mesh velocity, P1
  double dt = 1.0;
  std::vector<double> J;   // det(I − Δt ∇W) per new element

  static AleStep at_rest(const FittedMesh &mesh, double dt)
  {
    return from_velocity(mesh, NodalVectors(mesh.num_vertices(), Vec2{}), dt);
  }

  /// Old mesh recovered as q − Δt W.
  static AleStep from_velocity(const FittedMesh &mesh, NodalVectors W, double dt)
  {
    std::vector<Vec2> old = mesh.vertices;
    for (std::size_t k = 0; k < old.size(); ++k)
      old[k] -= dt * W[k];
    AleStep s;
    s.old_mesh = mesh.moved(std::move(old));
    s.new_mesh = mesh;
    s.W = std::move(W);
    s.dt = dt;
    s.compute_jacobians();
    return s;
  }

  static AleStep between(const FittedMesh &old_mesh, const FittedMesh &new_mesh, double dt)
  {
    if (old_mesh.triangles != new_mesh.triangles)
      throw MeshError("ALE step needs identical connectivity");
    NodalVectors W(new_mesh.num_vertices());
    for (std::size_t k = 0; k < W.size(); ++k)
      W[k] = (new_mesh.vertices[k] - old_mesh.vertices[k]) / dt;
    AleStep s;
    s.old_mesh = old_mesh;
    s.new_mesh = new_mesh;
    s.W = std::move(W);
    s.dt = dt;
    s.compute_jacobians();
    return s;
  }

  /// ∇W on new element t (rows: component, columns: d/dr, d/dz).
  Eigen::Matrix2d grad_W(std::size_t t) const
  {
    const Element e(new_mesh, t);
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    for (int k = 0; k < 3; ++k) {
      const Vec2 &w = W[new_mesh.triangles[t][k]];
      G(0, 0) += w.r * e.grad_lambda[k].r;
      G(0, 1) += w.r * e.grad_lambda[k].z;
      G(1, 0) += w.z * e.grad_lambda[k].r;
      G(1, 1) += w.z * e.grad_lambda[k].z;
    }
    return G;
  }

  /// det of the ALE map gradient at time fraction s, on new element t.
  double det_G(std::size_t t, double s) const
  {
    const Eigen::Matrix2d G = Eigen::Matrix2d::Identity() - (1.0 - s) * dt * grad_W(t);
    return G.determinant();
  }

private:
  void compute_jacobians()
  {
    J.resize(new_mesh.num_triangles());
    for (std::size_t t = 0; t < J.size(); ++t) {
      J[t] = det_G(t, 0.0);
      if (!(J[t] > 0.0))
        throw MeshError("element " + std::to_string(t) +
                        " inverted during the step: reduce the time step or remesh");
    }
  }
};

/// Element-wise integrand given on the new mesh in barycentric coordinates;
/// composition with the ALE map uses the same coordinates on the old mesh.
using ElementFunction = std::function<double(std::size_t t, const std::array<double, 3> &l)>;

/// Both sides of ∫_{T^m} φ (r − Δt W·e1) J = ∫_{T^{m-1}} φ∘A^{-1} r.
inline std::pair<double, double> jacobian_identity_check(const AleStep &step, const ElementFunction &phi)
{
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t t = 0; t < step.new_mesh.num_triangles(); ++t) {
    const Element en(step.new_mesh, t), eo(step.old_mesh, t);
    for (const auto &q : triangle_rule()) {
      const double f = phi(t, q.bary);
      const Vec2 x = en.point(q.bary);
      const Vec2 w = p1_value(step.new_mesh, step.W, t, q.bary);
      lhs += q.weight * en.area * f * (x.r - step.dt * w.r) * step.J[t];
      rhs += q.weight * eo.area * f * eo.point(q.bary).r;
    }
  }
  return {lhs, rhs};
}

enum class TimeRule { simpson, gauss10 };

/// ∫ over the step of ∫_{R(t)} φ∘A^{-1} ∇·[r W∘A^{-1}], by the pulled-back
/// form ∫_{T^m} φ d/dt{det G (A·e1)} with a rule in time.
inline double gcl_time_integral(const AleStep &step, const ElementFunction &phi,
                                TimeRule rule = TimeRule::simpson)
{
  std::vector<LineQuadPoint> times;
  if (rule == TimeRule::simpson)
    times.assign(simpson_rule.begin(), simpson_rule.end());
  else
    times = gauss_legendre(10);
  const double dt = step.dt;
  double acc = 0.0;
  for (std::size_t t = 0; t < step.new_mesh.num_triangles(); ++t) {
    const Element e(step.new_mesh, t);
    const Eigen::Matrix2d M = step.grad_W(t);
    const double tr = M.trace(), det = M.determinant();
    for (const auto &q : triangle_rule()) {
      const double f = phi(t, q.bary);
      const Vec2 x = e.point(q.bary);
      const Vec2 w = p1_value(step.new_mesh, step.W, t, q.bary);
      double d = 0.0;
      for (const auto &s : times) {
        const double a = 1.0 - s.x;
        const double g = 1.0 - a * dt * tr + a * a * dt * dt * det;
        const double dg = dt * tr - 2.0 * a * dt * dt * det; // d/ds
        const double ar = x.r - a * dt * w.r;
        const double dar = dt * w.r;
        d += s.weight * (dg * ar + g * dar);
      }
      acc += q.weight * e.area * f * d;
    }
  }
  return acc;
}

/// Coefficients ride with the mesh: the field on T^m with the same
/// nodal and midpoint values as on T^{m-1}.
inline VelocityField advect_coefficients(const FittedMesh &old_mesh, const FittedMesh &new_mesh,
                                         const VelocityField &old_field)
{
  if (old_mesh.triangles != new_mesh.triangles || old_mesh.edges != new_mesh.edges)
    throw MeshError("coefficient transport needs identical connectivity");
  return old_field;
}

/// Elastic mesh displacement ψ with prescribed values on the interface and
/// vanishing normal component on the rectangle.
inline NodalVectors elastic_displacement(const FittedMesh &mesh, const NodalVectors &interface_delta)
{
  const std::size_t K = mesh.num_vertices();
  if (interface_delta.size() != mesh.interface_vertex.size())
    throw MeshError("interface displacement size does not match the curve");

  // -1: free, -2: zero, >= 0: prescribed from the curve node of that index.
  std::vector<int> state(2 * K, -1);
  for (std::size_t k = 0; k < K; ++k) {
    const std::uint8_t s = mesh.vertex_sides[k];
    if (s & (side_bits::axis | side_bits::right))
      state[2 * k] = -2;
    if (s & (side_bits::bottom | side_bits::top))
      state[2 * k + 1] = -2;
  }
  for (std::size_t j = 0; j < mesh.interface_vertex.size(); ++j) {
    const int v = mesh.interface_vertex[j];
    for (int c = 0; c < 2; ++c)
      if (state[2 * v + c] != -2)
        state[2 * v + c] = static_cast<int>(j);
  }
  std::vector<int> index(2 * K, -1);
  int n = 0;
  for (std::size_t i = 0; i < 2 * K; ++i)
    if (state[i] == -1)
      index[i] = n++;

  double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = std::abs(mesh.signed_area(t));
    amin = std::min(amin, a);
    amax = std::max(amax, a);
  }

  Triplets trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  auto prescribed = [&](int i) {
    const int j = state[i];
    return j >= 0 ? interface_delta[j][i % 2] : 0.0;
  };
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    const double lambda = 1.0 + (amax - amin) / e.area;
    // Basis χ = λ_a e_c; D(χ) symmetric gradient, ∇·χ = ∂_c λ_a.
    std::array<Eigen::Matrix2d, 6> D;
    std::array<double, 6> div;
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 2; ++c) {
        Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
        G(c, 0) = e.grad_lambda[a].r;
        G(c, 1) = e.grad_lambda[a].z;
        D[2 * a + c] = 0.5 * (G + G.transpose());
        div[2 * a + c] = e.grad_lambda[a][c];
      }
    for (int i = 0; i < 6; ++i) {
      const int gi = 2 * mesh.triangles[t][i / 2] + i % 2;
      if (index[gi] < 0)
        continue;
      for (int j = 0; j < 6; ++j) {
        const int gj = 2 * mesh.triangles[t][j / 2] + j % 2;
        const double a =
            e.area * lambda * (2.0 * (D[i].array() * D[j].array()).sum() + div[i] * div[j]);
        if (index[gj] >= 0)
          trip.emplace_back(index[gi], index[gj], a);
        else
          rhs[index[gi]] -= a * prescribed(gj);
      }
    }
  }
  NodalVectors psi(K, Vec2{});
  for (std::size_t i = 0; i < 2 * K; ++i)
    if (state[i] != -1)
      psi[i / 2][i % 2] = prescribed(static_cast<int>(i));
  if (n > 0) {
    SpMat A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("elastic mesh system is singular");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    for (std::size_t i = 0; i < 2 * K; ++i)
      if (index[i] >= 0)
        psi[i / 2][i % 2] = x[index[i]];
  }
  return psi;
}

} // namespace alefem

#endif
