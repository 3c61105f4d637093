#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "alefem/ale.hpp"
#include "alefem/mesh.hpp"

using namespace alefem;

namespace
{

FittedMesh bubble_mesh()
{
  return generate_fitted_mesh(Domain{}, make_semicircle(0.5, 0.25, 16), MeshOptions{});
}

bool free_r(const FittedMesh &m, std::size_t k)
{
  return !(m.vertex_sides[k] & (side_bits::axis | side_bits::right));
}
bool free_z(const FittedMesh &m, std::size_t k)
{
  return !(m.vertex_sides[k] & (side_bits::bottom | side_bits::top));
}

/// Random mesh velocity with tangential boundary motion, scaled so every
/// vertex moves at most `frac` of its shortest incident edge per step.
NodalVectors random_velocity(const FittedMesh &m, double dt, double frac, unsigned seed)
{
  std::vector<double> hmin(m.num_vertices(), 1e300);
  for (const auto &e : m.edges) {
    const double l = distance(m.vertices[e[0]], m.vertices[e[1]]);
    hmin[e[0]] = std::min(hmin[e[0]], l);
    hmin[e[1]] = std::min(hmin[e[1]], l);
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NodalVectors W(m.num_vertices());
  for (std::size_t k = 0; k < W.size(); ++k) {
    const double s = frac * hmin[k] / dt / std::sqrt(2.0);
    W[k] = {free_r(m, k) ? s * u(rng) : 0.0, free_z(m, k) ? s * u(rng) : 0.0};
  }
  return W;
}

double elastic_energy(const FittedMesh &m, const NodalVectors &psi)
{
  double amin = 1e300, amax = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    amin = std::min(amin, m.signed_area(t));
    amax = std::max(amax, m.signed_area(t));
  }
  double E = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Element e(m, t);
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    for (int a = 0; a < 3; ++a) {
      const Vec2 &p = psi[m.triangles[t][a]];
      G(0, 0) += p.r * e.grad_lambda[a].r;
      G(0, 1) += p.r * e.grad_lambda[a].z;
      G(1, 0) += p.z * e.grad_lambda[a].r;
      G(1, 1) += p.z * e.grad_lambda[a].z;
    }
    const Eigen::Matrix2d D = 0.5 * (G + G.transpose());
    const double lambda = 1.0 + (amax - amin) / e.area;
    E += e.area * lambda * (2.0 * D.squaredNorm() + G.trace() * G.trace());
  }
  return E;
}

} // namespace

TEST(AleStep, AtRestHasUnitJacobian)
{
  const FittedMesh m = bubble_mesh();
  const AleStep s = AleStep::at_rest(m, 0.01);
  for (double j : s.J)
    EXPECT_DOUBLE_EQ(j, 1.0);
  EXPECT_EQ(s.old_mesh.vertices, m.vertices);
}

TEST(AleStep, InversionIsReported)
{
  const FittedMesh m = bubble_mesh();
  NodalVectors W(m.num_vertices(), Vec2{});
  // Drag one interior vertex far across its neighbours.
  std::size_t v = 0;
  while (m.vertex_sides[v])
    ++v;
  W[v] = {0.0, 100.0};
  EXPECT_THROW(AleStep::from_velocity(m, W, 0.01), MeshError);
}

TEST(JacobianIdentity, RandomPerturbation)
{
  const FittedMesh m = bubble_mesh();
  const double dt = 0.01;
  const AleStep s = AleStep::from_velocity(m, random_velocity(m, dt, 0.05, 11), dt);
  {
    const auto [lhs, rhs] = jacobian_identity_check(s, [](std::size_t, const std::array<double, 3> &) { return 1.0; });
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
  {
    // |P1 field|², degree 2 in the barycentric coordinates.
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(m.num_vertices());
    for (double &x : f)
      x = u(rng);
    const auto phi = [&](std::size_t t, const std::array<double, 3> &l) {
      const auto &v = m.triangles[t];
      const double val = l[0] * f[v[0]] + l[1] * f[v[1]] + l[2] * f[v[2]];
      return val * val;
    };
    const auto [lhs, rhs] = jacobian_identity_check(s, phi);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(GclTimeIntegral, ZeroWithoutVolumeChange)
{
  const FittedMesh m = bubble_mesh();
  const auto one = [](std::size_t, const std::array<double, 3> &) { return 1.0; };
  EXPECT_EQ(gcl_time_integral(AleStep::at_rest(m, 0.01), one), 0.0);
  // Rigid vertical translation (ignoring boundary constraints) leaves r-volume unchanged.
  const NodalVectors W(m.num_vertices(), Vec2{0.0, 0.3});
  EXPECT_NEAR(gcl_time_integral(AleStep::from_velocity(m, W, 0.01), one), 0.0, 1e-15);
}

TEST(GclTimeIntegral, MatchesVolumeChange)
{
  const FittedMesh m = bubble_mesh();
  const double dt = 0.01;
  const AleStep s = AleStep::from_velocity(m, random_velocity(m, dt, 0.05, 17), dt);
  const auto one = [](std::size_t, const std::array<double, 3> &) { return 1.0; };
  // φ = 1: ∫_{R^m} r − ∫_{R^{m−1}} r, here per-element to sharpen the check.
  double new_r = 0.0, old_r = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Element en(s.new_mesh, t), eo(s.old_mesh, t);
    new_r += en.area * (en.point({1.0 / 3, 1.0 / 3, 1.0 / 3}).r);
    old_r += eo.area * (eo.point({1.0 / 3, 1.0 / 3, 1.0 / 3}).r);
  }
  const double simpson = gcl_time_integral(s, one, TimeRule::simpson);
  const double gauss = gcl_time_integral(s, one, TimeRule::gauss10);
  EXPECT_NEAR(simpson, new_r - old_r, 1e-14);
  EXPECT_NEAR(simpson, gauss, 1e-13);

  // Same identity element by element for a non-constant φ.
  const auto phi = [&](std::size_t t, const std::array<double, 3> &) { return 1.0 + 0.1 * double(t % 7); };
  double expect = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const Element en(s.new_mesh, t), eo(s.old_mesh, t);
    const double w = 1.0 + 0.1 * double(t % 7);
    expect += w * (en.area * en.point({1.0 / 3, 1.0 / 3, 1.0 / 3}).r -
                   eo.area * eo.point({1.0 / 3, 1.0 / 3, 1.0 / 3}).r);
  }
  EXPECT_NEAR(gcl_time_integral(s, phi), expect, 1e-14);
  EXPECT_NEAR(gcl_time_integral(s, phi, TimeRule::gauss10), expect, 1e-13);
}

TEST(AdvectCoefficients, IdentityAndConnectivityCheck)
{
  const FittedMesh a = bubble_mesh();
  const FittedMesh b = a.moved(a.vertices);
  VelocityField u{Eigen::VectorXd::LinSpaced(2 * (a.num_vertices() + a.num_edges()), 0.0, 1.0)};
  EXPECT_EQ(advect_coefficients(a, b, u).coeffs, u.coeffs);
  const FittedMesh c =
      generate_fitted_mesh(Domain{}, make_semicircle(0.5, 0.25, 16), MeshOptions{1.0 / 20.0});
  EXPECT_THROW(advect_coefficients(a, c, u), MeshError);
}

TEST(ElasticDisplacement, ZeroDataGivesZero)
{
  const FittedMesh m = bubble_mesh();
  const NodalVectors psi = elastic_displacement(m, NodalVectors(m.interface_vertex.size(), Vec2{}));
  for (const Vec2 &p : psi)
    EXPECT_EQ(norm(p), 0.0);
}

TEST(ElasticDisplacement, UniformVerticalShift)
{
  const FittedMesh m = bubble_mesh();
  const double d = 0.01;
  const NodalVectors psi = elastic_displacement(m, NodalVectors(m.interface_vertex.size(), Vec2{0.0, d}));
  for (std::size_t j = 0; j < m.interface_vertex.size(); ++j) {
    const Vec2 &p = psi[m.interface_vertex[j]];
    EXPECT_EQ(p.z, d);
    EXPECT_EQ(p.r, 0.0);
  }
  for (std::size_t k = 0; k < psi.size(); ++k) {
    EXPECT_LE(norm(psi[k]), d * (1.0 + 1e-2)) << k;
    if (!free_r(m, k))
      EXPECT_EQ(psi[k].r, 0.0);
    if (!free_z(m, k))
      EXPECT_EQ(psi[k].z, 0.0);
  }
}

TEST(ElasticDisplacement, MinimisesEnergy)
{
  const FittedMesh m = bubble_mesh();
  const GeneratingCurve c = make_semicircle(0.5, 0.25, 16);
  NodalVectors delta(c.num_nodes());
  for (std::size_t j = 0; j < delta.size(); ++j) {
    const double a = double(j) / double(c.num_segments());
    delta[j] = {j == 0 || j + 1 == delta.size() ? 0.0 : 0.004 * std::sin(3.0 * a), 0.01 * a};
  }
  const NodalVectors psi = elastic_displacement(m, delta);
  const double E0 = elastic_energy(m, psi);
  std::vector<bool> on_curve(m.num_vertices(), false);
  for (int v : m.interface_vertex)
    on_curve[v] = true;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    NodalVectors p = psi;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (on_curve[k])
        continue;
      if (free_r(m, k))
        p[k].r += 1e-4 * u(rng);
      if (free_z(m, k))
        p[k].z += 1e-4 * u(rng);
    }
    EXPECT_GT(elastic_energy(m, p), E0);
  }
}
