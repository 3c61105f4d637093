#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "alefem/fem.hpp"
#include "alefem/mesh.hpp"

using namespace alefem;

namespace
{

constexpr double pi = std::numbers::pi;

FittedMesh bubble_mesh(double h = 1.0 / 16.0, std::size_t J = 16)
{
  MeshOptions opt;
  opt.target_h = h;
  return generate_fitted_mesh(Domain{}, make_semicircle(0.5, 0.25, J), opt);
}

FittedMesh reference_triangle()
{
  FittedMesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  return m;
}

PointFunction one() { return [](std::size_t, const std::array<double, 3> &, const Vec2 &) { return 1.0; }; }

Vec2 smooth_field(const Vec2 &x)
{
  return {std::sin(3.0 * x.r) * std::cos(2.0 * x.z), std::exp(x.r) * std::sin(x.z)};
}

double max_error(const FittedMesh &mesh, const VelocityField &u)
{
  double e = 0.0;
  const std::size_t n = mesh.num_vertices() + mesh.num_edges();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 x = p2_node_position(mesh, k);
    if (x.r < 1e-12 || x.r > 0.5 - 1e-12 || x.z < 1e-12 || x.z > 2.0 - 1e-12)
      continue;
    const Vec2 d = Vec2{u.coeffs[2 * k], u.coeffs[2 * k + 1]} - smooth_field(x);
    e = std::max(e, norm(d));
  }
  return e;
}

} // namespace

TEST(Quadrature, DegreeFiveOnReferenceTriangle)
{
  const FittedMesh m = reference_triangle();
  const PointFunction f = [](std::size_t, const std::array<double, 3> &, const Vec2 &x) {
    return x.r * x.r;
  };
  const PointFunction g = [](std::size_t, const std::array<double, 3> &, const Vec2 &x) {
    return x.z * x.z * x.z;
  };
  EXPECT_NEAR(weighted_inner(m, f, g, Weight::one), 1.0 / 420.0, 1e-15);
  double total = 0.0;
  for (const auto &q : triangle_rule())
    total += q.weight;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(WeightedInner, RadialWeightOverRectangle)
{
  const FittedMesh m = bubble_mesh();
  // ∫_Ω r = r_max²/2 · (z_max − z_min) = 0.25
  EXPECT_NEAR(weighted_inner(m, one(), one(), Weight::r), 0.25, 1e-13);
  EXPECT_NEAR(weighted_inner(m, one(), one(), Weight::one), 1.0, 1e-13);
}

TEST(WeightedInner, InverseRadialWeight)
{
  const FittedMesh m = bubble_mesh();
  const PointFunction f = [](std::size_t, const std::array<double, 3> &, const Vec2 &x) { return x.r; };
  // ∫ r²/r = 0.25
  EXPECT_NEAR(weighted_inner(m, f, f, Weight::inv_r), 0.25, 1e-13);
}

TEST(P2Basis, PartitionOfUnityAndNodalProperty)
{
  const std::array<std::array<double, 3>, 6> nodes = {{
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}};
  for (int a = 0; a < 6; ++a) {
    const auto v = P2Basis::values(nodes[a]);
    for (int b = 0; b < 6; ++b)
      EXPECT_NEAR(v[b], a == b ? 1.0 : 0.0, 1e-15);
  }
  const FittedMesh m = reference_triangle();
  const Element e(m, 0);
  const std::array<double, 3> l = {0.2, 0.3, 0.5};
  const auto v = P2Basis::values(l);
  const auto g = P2Basis::gradients(l, e);
  double s = 0.0;
  Vec2 gs{};
  for (int a = 0; a < 6; ++a) {
    s += v[a];
    gs += g[a];
  }
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_NEAR(gs.r, 0.0, 1e-14);
  EXPECT_NEAR(gs.z, 0.0, 1e-14);
}

TEST(VelocityField, ReproducesQuadratics)
{
  const FittedMesh m = bubble_mesh();
  auto f = [](const Vec2 &x) { return Vec2{x.r * x.z + x.r * x.r, 1.0 - x.z * x.z + 2.0 * x.r}; };
  const VelocityField u = VelocityField::interpolate(m, f);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t t = rng() % m.num_triangles();
    double a = U(rng), b = U(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const std::array<double, 3> l = {1.0 - a - b, a, b};
    const Element e(m, t);
    const Vec2 x = e.point(l);
    const Vec2 v = u.value(m, t, l);
    EXPECT_NEAR(v.r, f(x).r, 1e-13);
    EXPECT_NEAR(v.z, f(x).z, 1e-13);
    const Eigen::Matrix2d G = u.gradient(m, e, t, l);
    EXPECT_NEAR(G(0, 0), x.z + 2.0 * x.r, 1e-11);
    EXPECT_NEAR(G(0, 1), x.r, 1e-11);
    EXPECT_NEAR(G(1, 0), 2.0, 1e-11);
    EXPECT_NEAR(G(1, 1), -2.0 * x.z, 1e-11);
  }
}

TEST(VelocitySpace, EliminatesBoundaryComponents)
{
  const FittedMesh m = bubble_mesh();
  const VelocitySpace V(m);
  const std::size_t K = m.num_vertices();
  for (std::size_t k = 0; k < K; ++k) {
    const std::uint8_t s = m.vertex_sides[k];
    const bool r_fixed = s & (side_bits::axis | side_bits::right | side_bits::bottom | side_bits::top);
    const bool z_fixed = s & (side_bits::bottom | side_bits::top);
    EXPECT_EQ(V.free_index(k, 0) < 0, r_fixed) << k;
    EXPECT_EQ(V.free_index(k, 1) < 0, z_fixed) << k;
  }
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const int side = m.edge_side[e];
    if (side < 0) {
      EXPECT_GE(V.free_index(K + e, 0), 0);
      EXPECT_GE(V.free_index(K + e, 1), 0);
    }
  }
  const VelocitySpace F = VelocitySpace::unconstrained(m);
  EXPECT_EQ(F.num_free(), F.num_full());
  EXPECT_LT(V.num_free(), V.num_full());

  Eigen::VectorXd full = Eigen::VectorXd::LinSpaced(V.num_full(), 1.0, 2.0);
  const Eigen::VectorXd back = V.extend(V.restrict_vector(full));
  for (int i = 0; i < V.num_full(); ++i)
    EXPECT_EQ(back[i], V.free_of_full(i) >= 0 ? full[i] : 0.0);
}

TEST(ApplyConstraints, DropsRowsAndColumns)
{
  const FittedMesh m = bubble_mesh();
  const VelocitySpace V(m);
  const int n = V.num_full();
  Triplets trip;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 2.0 + i);
    if (i + 1 < n)
      trip.emplace_back(i, i + 1, -1.0);
  }
  SpMat full(n, n);
  full.setFromTriplets(trip.begin(), trip.end());
  const SpMat red = apply_constraints(V, full);
  ASSERT_EQ(red.rows(), V.num_free());
  const Eigen::MatrixXd D = Eigen::MatrixXd(full);
  const Eigen::MatrixXd R = Eigen::MatrixXd(red);
  for (int a = 0; a < V.num_free(); ++a)
    for (int b = 0; b < V.num_free(); ++b)
      EXPECT_EQ(R(a, b), D(V.full_of_free(a), V.full_of_free(b)));
}

TEST(PressureSpace, PinningAndMeanProjection)
{
  const FittedMesh m = bubble_mesh();
  const PressureSpace Q(m);
  EXPECT_EQ(Q.num_full(), int(m.num_vertices() + m.num_triangles()));
  EXPECT_EQ(Q.num_reduced(), Q.num_full() - 2);
  EXPECT_LT(Q.reduced_index(Q.p1(0)), 0);
  EXPECT_LT(Q.reduced_index(Q.p0(0)), 0);
  // (r, 1) = ∫ r = 0.25 as the sum of the P1 weights.
  EXPECT_NEAR(Q.constraint().head(Q.num_p1()).sum(), 0.25, 1e-13);
  EXPECT_NEAR(Q.constraint().tail(Q.num_p0()).sum(), 0.25, 1e-13);

  Eigen::VectorXd p = Eigen::VectorXd::Random(Q.num_full());
  const Eigen::VectorXd q = Q.project_mean_zero(p);
  EXPECT_NEAR(Q.constraint().dot(q), 0.0, 1e-13);
  // Projection changes p by a constant function only.
  for (std::size_t t = 0; t < m.num_triangles(); t += 7) {
    const std::array<double, 3> l = {0.2, 0.3, 0.5};
    const std::array<double, 3> l2 = {0.6, 0.1, 0.3};
    const double d1 = Q.value(m, p, t, l) - Q.value(m, q, t, l);
    const double d2 = Q.value(m, p, t, l2) - Q.value(m, q, t, l2);
    EXPECT_NEAR(d1, d2, 1e-13);
  }
  // 1_P1 − 1_P0 is the zero function.
  Eigen::VectorXd z(Q.num_full());
  z.head(Q.num_p1()).setOnes();
  z.tail(Q.num_p0()).setConstant(-1.0);
  EXPECT_NEAR(Q.value(m, z, 3, {0.1, 0.2, 0.7}), 0.0, 1e-15);
}

TEST(TransferFields, IdentityOnSameMesh)
{
  const FittedMesh m = bubble_mesh();
  const VelocitySpace V(m);
  const VelocityField u0 = VelocityField::interpolate(m, smooth_field);
  VelocityField u{V.extend(V.restrict_vector(u0.coeffs))};
  NodalVectors w(m.num_vertices());
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = smooth_field(m.vertices[k]);
    if (m.vertex_sides[k] & (side_bits::axis | side_bits::right))
      w[k].r = 0.0;
    if (m.vertex_sides[k] & (side_bits::bottom | side_bits::top))
      w[k].z = 0.0;
  }
  const auto [u1, w1] = transfer_fields(m, m, u, w);
  EXPECT_LT((u1.coeffs - u.coeffs).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t k = 0; k < w.size(); ++k)
    EXPECT_LT(norm(w1[k] - w[k]), 1e-12);
}

TEST(TransferFields, ReproducesLinearFields)
{
  const FittedMesh a = bubble_mesh(1.0 / 16.0, 16);
  const FittedMesh b = bubble_mesh(1.0 / 24.0, 24);
  auto lin = [](const Vec2 &x) { return Vec2{0.3 * x.r - 0.2 * x.z + 1.0, 2.0 * x.r + 0.5 * x.z}; };
  const VelocityField u = VelocityField::interpolate(a, lin);
  NodalVectors w(a.num_vertices());
  for (std::size_t k = 0; k < w.size(); ++k)
    w[k] = lin(a.vertices[k]);
  const auto [u1, w1] = transfer_fields(a, b, u, w);
  const VelocitySpace V(b);
  const std::size_t n = b.num_vertices() + b.num_edges();
  for (std::size_t k = 0; k < n; ++k)
    for (int c = 0; c < 2; ++c) {
      const double want = V.free_index(k, c) >= 0 ? lin(p2_node_position(b, k))[c] : 0.0;
      EXPECT_NEAR(u1.coeffs[2 * k + c], want, 1e-12);
    }
  for (std::size_t k = 0; k < b.num_vertices(); ++k) {
    if (b.vertex_sides[k])
      continue;
    EXPECT_NEAR(w1[k].r, lin(b.vertices[k]).r, 1e-12);
    EXPECT_NEAR(w1[k].z, lin(b.vertices[k]).z, 1e-12);
  }
}

TEST(TransferFields, ThirdOrderOnRefinedTarget)
{
  // Fixed fine target, source meshes refined by two: pointwise error of the
  // transferred P2 interpolant decays like h³ in the largest edge length.
  const FittedMesh target = bubble_mesh(1.0 / 128.0, 128);
  std::vector<double> err, size;
  for (int J : {16, 32, 64}) {
    const FittedMesh src = bubble_mesh(1.0 / J, J);
    double hmax = 0.0;
    for (const auto &t : src.triangles)
      for (int i = 0; i < 3; ++i)
        hmax = std::max(hmax, distance(src.vertices[t[i]], src.vertices[t[(i + 1) % 3]]));
    size.push_back(hmax);
    const VelocityField u = VelocityField::interpolate(src, smooth_field);
    const NodalVectors w(src.num_vertices(), Vec2{});
    err.push_back(max_error(target, transfer_fields(src, target, u, w).first));
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log(err[i - 1] / err[i]) / std::log(size[i - 1] / size[i]);
    EXPECT_GT(order, 2.5) << "levels " << i - 1 << "," << i << " errors " << err[i - 1] << " " << err[i];
  }
}
