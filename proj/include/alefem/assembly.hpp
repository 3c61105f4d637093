#ifndef ALEFEM_ASSEMBLY_HPP
#define ALEFEM_ASSEMBLY_HPP

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "alefem/ale.hpp"
#include "alefem/curve.hpp"
#include "alefem/fem.hpp"

namespace alefem
{

enum class Inertia { nonconservative, conservative };

/// Bulk blocks of the coupled system in reduced numbering.
///   B  : velocity × velocity
///   C  : velocity × pressure, entries (q, ∇·[r χ])
///   N  : velocity × curve scalar, entries ⟨(X·e1) ζ, ν·χ |X_α|⟩
///   c  : momentum right-hand side
struct SystemBlocks {
  SpMat B;
  SpMat C;
  SpMat N;
  Eigen::VectorXd c;
};

/// Which momentum contributions to assemble; all on by default.
struct MomentumTerms {
  bool mass = true;
  bool advection = true;
  bool viscous = true;
  bool axisymmetric = true;
  bool gravity = true;
  bool inertia_rhs = true;
};

struct MomentumInput {
  const FittedMesh *mesh = nullptr;
  const PhaseCoefficients *coeff = nullptr;
  const AleStep *ale = nullptr;       // ale->new_mesh matches mesh
  const VelocityField *U_old = nullptr; // coefficients of U^m on the moving mesh
  double dt = 1.0;
  Vec2 gravity{};
  Inertia inertia = Inertia::nonconservative;
  MomentumTerms terms{};
};

namespace detail
{

struct LocalBasis {
  std::array<double, 6> psi;
  std::array<Vec2, 6> grad;
};

inline int free_dof(const VelocitySpace &space, const std::array<int, 6> &nodes, int i)
{
  return space.free_index(nodes[i / 2], i % 2);
}

} // namespace detail

/// Momentum matrix B and right-hand side c (without interface terms).
inline std::pair<SpMat, Eigen::VectorXd> assemble_momentum(const VelocitySpace &space,
                                                           const MomentumInput &in)
{
  const FittedMesh &mesh = *in.mesh;
  const AleStep &ale = *in.ale;
  const double dt = in.dt;
  const auto &rule = triangle_rule();
  Triplets trip;
  trip.reserve(mesh.num_triangles() * 144);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_free());

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    const Element eo(ale.old_mesh, t);
    const auto nodes = p2_nodes(mesh, t);
    const double rho = in.coeff->rho[t];
    const double mu = in.coeff->mu[t];
    const double J = ale.J[t];
    Eigen::Matrix<double, 12, 12> A = Eigen::Matrix<double, 12, 12>::Zero();
    Eigen::Matrix<double, 12, 1> b = Eigen::Matrix<double, 12, 1>::Zero();

    for (const auto &q : rule) {
      const auto psi = P2Basis::values(q.bary);
      const auto g = P2Basis::gradients(q.bary, e);
      const Vec2 x = e.point(q.bary);
      const double r = x.r;
      const double w = q.weight * e.area;
      const Vec2 Wq = p1_value(mesh, ale.W, t, q.bary);
      const Vec2 Uq = in.U_old ? in.U_old->value(mesh, t, q.bary) : Vec2{};
      const Vec2 v = Uq - Wq;

      // Mass with the time-integrated correction of the conservative form:
      // (ρ/Δt)(u, χ r) − (1/(2Δt))(ρ u·χ, r − (r − Δt W·e1) J).
      double mass = 0.0;
      if (in.terms.mass) {
        mass = rho * r / dt;
        if (in.inertia == Inertia::conservative)
          mass -= rho * (r - (r - dt * Wq.r) * J) / (2.0 * dt);
      }
      std::array<double, 6> adv{};
      for (int a = 0; a < 6; ++a)
        adv[a] = dot(v, g[a]);

      for (int a = 0; a < 6; ++a) {
        for (int bb = 0; bb < 6; ++bb) {
          const double m = mass * psi[a] * psi[bb];
          const double ad = in.terms.advection
                                ? 0.5 * rho * r * (psi[a] * adv[bb] - psi[bb] * adv[a])
                                : 0.0;
          const double gg = dot(g[a], g[bb]);
          for (int c = 0; c < 2; ++c) {
            for (int cp = 0; cp < 2; ++cp) {
              double val = 0.0;
              if (c == cp)
                val += m + ad;
              if (in.terms.viscous)
                val += 2.0 * mu * r * 0.5 * ((c == cp ? gg : 0.0) + g[a][cp] * g[bb][c]);
              if (in.terms.axisymmetric && c == 0 && cp == 0)
                val += 2.0 * mu / r * psi[a] * psi[bb];
              A(2 * a + c, 2 * bb + cp) += w * val;
            }
          }
        }
      }

      if (in.terms.gravity)
        for (int a = 0; a < 6; ++a)
          for (int c = 0; c < 2; ++c)
            b(2 * a + c) += w * rho * in.gravity[c] * psi[a] * r;

      if (in.terms.inertia_rhs && in.U_old) {
        if (in.inertia == Inertia::nonconservative) {
          const double s = (1.0 - dt * Wq.r / r) * J;
          if (s < 0.0)
            throw SolverError("time step too large: negative inertia weight");
          const double f = rho * std::sqrt(s) * r / dt;
          for (int a = 0; a < 6; ++a)
            for (int c = 0; c < 2; ++c)
              b(2 * a + c) += w * f * Uq[c] * psi[a];
        } else {
          // Old geometry, coefficients riding with the mesh.
          const double wo = q.weight * eo.area;
          const double ro = eo.point(q.bary).r;
          for (int a = 0; a < 6; ++a)
            for (int c = 0; c < 2; ++c)
              b(2 * a + c) += wo * rho * ro * Uq[c] * psi[a] / dt;
        }
      }
    }

    for (int i = 0; i < 12; ++i) {
      const int gi = detail::free_dof(space, nodes, i);
      if (gi < 0)
        continue;
      rhs[gi] += b(i);
      for (int j = 0; j < 12; ++j) {
        const int gj = detail::free_dof(space, nodes, j);
        if (gj >= 0 && A(i, j) != 0.0)
          trip.emplace_back(gi, gj, A(i, j));
      }
    }
  }
  SpMat B(space.num_free(), space.num_free());
  B.setFromTriplets(trip.begin(), trip.end());
  return {B, rhs};
}

/// C with entries (q, ∇·[r χ]) for reduced pressure q and free velocity χ.
inline SpMat assemble_divergence(const FittedMesh &mesh, const VelocitySpace &vspace,
                                 const PressureSpace &pspace)
{
  Triplets trip;
  trip.reserve(mesh.num_triangles() * 48);
  const int K = pspace.num_p1();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    const auto nodes = p2_nodes(mesh, t);
    Eigen::Matrix<double, 12, 4> L = Eigen::Matrix<double, 12, 4>::Zero();
    for (const auto &q : triangle_rule()) {
      const auto psi = P2Basis::values(q.bary);
      const auto g = P2Basis::gradients(q.bary, e);
      const double r = e.point(q.bary).r;
      const double w = q.weight * e.area;
      const std::array<double, 4> pq{q.bary[0], q.bary[1], q.bary[2], 1.0};
      for (int a = 0; a < 6; ++a) {
        const double div_r = psi[a] + r * g[a].r;
        const double div_z = r * g[a].z;
        for (int k = 0; k < 4; ++k) {
          L(2 * a, k) += w * pq[k] * div_r;
          L(2 * a + 1, k) += w * pq[k] * div_z;
        }
      }
    }
    const std::array<int, 4> pdofs{mesh.triangles[t][0], mesh.triangles[t][1],
                                   mesh.triangles[t][2], K + static_cast<int>(t)};
    for (int i = 0; i < 12; ++i) {
      const int gi = detail::free_dof(vspace, nodes, i);
      if (gi < 0)
        continue;
      for (int k = 0; k < 4; ++k) {
        const int pk = pspace.reduced_index(pdofs[k]);
        if (pk >= 0)
          trip.emplace_back(gi, pk, L(i, k));
      }
    }
  }
  SpMat C(vspace.num_free(), pspace.num_reduced());
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

/// Same pairing in full pressure numbering (no pinned unknowns removed).
inline SpMat assemble_divergence_full(const FittedMesh &mesh, const VelocitySpace &vspace)
{
  Triplets trip;
  const int K = static_cast<int>(mesh.num_vertices());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    const auto nodes = p2_nodes(mesh, t);
    for (const auto &q : triangle_rule()) {
      const auto psi = P2Basis::values(q.bary);
      const auto g = P2Basis::gradients(q.bary, e);
      const double r = e.point(q.bary).r;
      const double w = q.weight * e.area;
      const std::array<double, 4> pq{q.bary[0], q.bary[1], q.bary[2], 1.0};
      const std::array<int, 4> pd{mesh.triangles[t][0], mesh.triangles[t][1],
                                  mesh.triangles[t][2], K + static_cast<int>(t)};
      for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 2; ++c) {
          const int gi = vspace.free_index(nodes[a], c);
          if (gi < 0)
            continue;
          const double d = c == 0 ? psi[a] + r * g[a].r : r * g[a].z;
          for (int k = 0; k < 4; ++k)
            trip.emplace_back(gi, pd[k], w * pq[k] * d);
        }
    }
  }
  SpMat C(vspace.num_free(), K + static_cast<int>(mesh.num_triangles()));
  C.setFromTriplets(trip.begin(), trip.end());
  return C;
}

namespace detail
{

/// Quadratic edge basis at local coordinate s ∈ [0,1]: start, end, midpoint.
inline std::array<double, 3> edge_p2(double s)
{
  return {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
}

inline std::array<int, 3> interface_edge_nodes(const FittedMesh &mesh, std::size_t seg)
{
  const int K = static_cast<int>(mesh.num_vertices());
  return {mesh.interface_vertex[seg], mesh.interface_vertex[seg + 1],
          K + mesh.interface_edge[seg]};
}

} // namespace detail

/// N with entries ∫ ζ_k (φ·f) dα: velocity trace tests against curve scalars.
/// With the plain field f = (X·e1)|X_α|ν this is ⟨(X·e1)ζ, ν·χ|X_α|⟩.
inline SpMat assemble_interface_coupling(const FittedMesh &mesh, const VelocitySpace &space,
                                         const GeneratingCurve &curve, const NormalField &f)
{
  if (mesh.interface_edge.size() != curve.num_segments())
    throw MeshError("curve is not fitted to the mesh");
  static const std::vector<LineQuadPoint> gauss = gauss_legendre(3);
  Triplets trip;
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    const auto nodes = detail::interface_edge_nodes(mesh, s);
    for (const auto &q : gauss) {
      const auto psi = detail::edge_p2(q.x);
      const double zeta[2] = {1.0 - q.x, q.x};
      const Vec2 g = f.at(s, q.x);
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 2; ++c) {
          const int gi = space.free_index(nodes[a], c);
          if (gi < 0)
            continue;
          for (int k = 0; k < 2; ++k)
            trip.emplace_back(gi, static_cast<int>(s + k), q.weight * psi[a] * zeta[k] * g[c]);
        }
    }
  }
  SpMat N(space.num_free(), static_cast<int>(curve.num_nodes()));
  N.setFromTriplets(trip.begin(), trip.end());
  return N;
}

/// ⟨ν·e1, ν·χ|X_α|⟩ for every free velocity unknown (known term of the
/// equidistributing curvature formulation).
inline Eigen::VectorXd interface_radial_normal_load(const FittedMesh &mesh,
                                                    const VelocitySpace &space,
                                                    const GeneratingCurve &curve)
{
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_free());
  const double integral[3] = {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0};
  for (std::size_t s = 0; s < curve.num_segments(); ++s) {
    const auto [tau, nu] = tangent_normal(curve, s);
    const double len = curve.chord(s);
    const auto nodes = detail::interface_edge_nodes(mesh, s);
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 2; ++c)
        if (const int gi = space.free_index(nodes[a], c); gi >= 0)
          out[gi] += nu.r * nu[c] * len * integral[a];
  }
  return out;
}

} // namespace alefem

#endif
