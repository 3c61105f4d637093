#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "alefem/benchmarks.hpp"

using namespace alefem;

namespace
{

constexpr double pi = std::numbers::pi;

/// Generating curve of the spheroid with equatorial radius a and polar
/// semi-axis c centred at z0, uniform in the polar angle.
GeneratingCurve spheroid(double a, double c, double z0, std::size_t J)
{
  std::vector<Vec2> n(J + 1);
  for (std::size_t j = 0; j <= J; ++j) {
    const double th = pi * double(j) / double(J);
    n[j] = {a * std::sin(th), z0 - c * std::cos(th)};
  }
  n.front().r = 0.0;
  n.back().r = 0.0;
  return GeneratingCurve(std::move(n));
}

double prolate_sphericity(double a, double c)
{
  const double e = std::sqrt(1.0 - a * a / (c * c));
  const double area = 2.0 * pi * a * a * (1.0 + c / (a * e) * std::asin(e));
  const double vol = 4.0 / 3.0 * pi * a * a * c;
  return std::cbrt(pi) * std::pow(6.0 * vol, 2.0 / 3.0) / area;
}

} // namespace

TEST(Sphericity, SphereConvergesAtSecondOrder)
{
  std::vector<double> err;
  for (std::size_t J : {16, 32, 64, 128})
    err.push_back(1.0 - sphericity(make_semicircle(0.5, 0.25, J)));
  for (std::size_t i = 1; i < err.size(); ++i)
    EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 2.0, 0.1);
  EXPECT_LT(err.back(), 1e-3);
}

TEST(Sphericity, ProlateSpheroid)
{
  const double exact = prolate_sphericity(1.0, 2.0);
  EXPECT_NEAR(exact, 0.92874, 1e-5);
  EXPECT_NEAR(sphericity(spheroid(0.125, 0.25, 0.5, 512)), exact, 1e-4);
}

TEST(Sphericity, ScaleInvariant)
{
  const GeneratingCurve a = spheroid(1.0, 2.0, 3.0, 64);
  const GeneratingCurve b = spheroid(0.01, 0.02, 0.5, 64);
  EXPECT_NEAR(sphericity(a), sphericity(b), 1e-12);
}

TEST(RiseQuantities, CentroidAndRigidVelocity)
{
  const GeneratingCurve c = make_semicircle(0.5, 0.25, 16);
  const FittedMesh m = generate_fitted_mesh(Domain{}, c, MeshOptions{});
  const VelocityField zero{Eigen::VectorXd::Zero(2 * (m.num_vertices() + m.num_edges()))};
  const RiseQuantities q0 = rise_velocity_and_centroid(m, zero, c);
  EXPECT_EQ(q0.V_c, 0.0);
  // The discrete curve is symmetric about z = 0.5.
  EXPECT_NEAR(q0.z_c, 0.5, 1e-13);
  const VelocityField up = VelocityField::interpolate(m, [](const Vec2 &) { return Vec2{0.0, 0.7}; });
  EXPECT_NEAR(rise_velocity_and_centroid(m, up, c).V_c, 0.7, 1e-13);
}

TEST(DropletInitialCurve, ShapeAndEndpoints)
{
  const DropletSpec spec = droplet_spec(2);
  const GeneratingCurve c = droplet_initial_curve(spec, 64);
  EXPECT_EQ(c.num_segments(), 64u);
  EXPECT_EQ(c.node(0).r, 0.0);
  EXPECT_EQ(c.nodes().back().r, 0.0);
  EXPECT_NEAR(c.node(0).z, 0.676384, 1e-6);
  // Upper pole: 1 + 0.3 (1 + 0.08 P2(1)) with the same normalisation.
  EXPECT_NEAR(c.nodes().back().z - 1.0, 1.0 - c.node(0).z, 1e-12);

  DropletSpec flat = spec;
  flat.epsilon = 0.0;
  const GeneratingCurve s = droplet_initial_curve(flat, 64);
  for (const Vec2 &p : s.nodes())
    EXPECT_NEAR(distance(p, {0.0, 1.0}), 0.3, 1e-14);
  DropletSpec bad = spec;
  bad.n = 1;
  EXPECT_THROW(droplet_initial_curve(bad, 64), Error);
}

TEST(DropletReference, ModeTwoAndFive)
{
  const DropletReference r2 = droplet_reference(droplet_spec(2), 1000.0, 2.0, 40.0);
  EXPECT_NEAR(r2.omega0, std::sqrt(320.0 / 27.0), 1e-12);
  EXPECT_NEAR(r2.omega0, 3.4427, 1e-4);
  EXPECT_NEAR(r2.lambda, 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(r2.omega, 3.4409, 1e-4);
  EXPECT_NEAR(r2.epsilon(droplet_spec(2), 0.0), 0.08, 1e-15);

  const DropletReference r5 = droplet_reference(droplet_spec(5), 1000.0, 2.0, 40.0);
  EXPECT_NEAR(r5.omega0, 14.401, 1e-3);
  EXPECT_NEAR(r5.lambda, 0.97778, 1e-5);
  EXPECT_NEAR(r5.omega, 14.37, 5e-3);
  EXPECT_THROW(droplet_reference(droplet_spec(2), 1.0, 100.0, 1.0), Error);
}

TEST(FitOscillation, RecoversSyntheticDampedCosine)
{
  const double omega = 3.4409, lambda = 0.1111;
  std::vector<double> t, y;
  for (int k = 0; k <= 4000; ++k) {
    t.push_back(1e-3 * k);
    y.push_back(0.02 * std::exp(-lambda * t.back()) * std::cos(omega * t.back()) + 1e-4);
  }
  const OscillationFit f = fit_oscillation(t, y);
  EXPECT_GE(f.extrema, 4u);
  EXPECT_NEAR(f.omega, omega, 1e-3 * omega);
  EXPECT_NEAR(f.decay, lambda, 2e-2 * lambda);
  EXPECT_THROW(fit_oscillation({0, 1, 2}, {0, 1, 0}), Error);
}

TEST(FitOscillation, IgnoresStartupWiggle)
{
  // Starts at a maximum with a small dip-and-recover over the first steps.
  const double omega = 3.4409, lambda = 0.1111;
  std::vector<double> t, y;
  for (int k = 0; k <= 4000; ++k) {
    t.push_back(1e-3 * k);
    const double bump = k == 5 ? -4e-5 : k == 10 ? 4e-5 : 0.0;
    y.push_back(0.02 * std::exp(-lambda * t.back()) * std::cos(omega * t.back()) + bump);
  }
  const OscillationFit f = fit_oscillation(t, y);
  EXPECT_EQ(f.extrema, 4u);
  EXPECT_NEAR(f.omega, omega, 1e-3 * omega);
  EXPECT_NEAR(f.decay, lambda, 2e-2 * lambda);
}

TEST(Summarize, ExtremaAndFinalRow)
{
  std::vector<BenchmarkSample> s(4);
  const double sph[] = {1.0, 0.97, 0.95, 0.96};
  const double vc[] = {0.0, 0.3, 0.2, 0.1};
  for (int i = 0; i < 4; ++i) {
    s[i].t = 0.5 * i;
    s[i].sphericity = sph[i];
    s[i].V_c = vc[i];
    s[i].z_c = 0.5 + i;
    s[i].v_delta = -1e-4 * i;
  }
  const RunSummary r = summarize(s);
  EXPECT_EQ(r.s_min, 0.95);
  EXPECT_EQ(r.t_at_s_min, 1.0);
  EXPECT_EQ(r.Vc_max, 0.3);
  EXPECT_EQ(r.t_at_Vc_max, 0.5);
  EXPECT_EQ(r.zc_final, 3.5);
  EXPECT_DOUBLE_EQ(r.vDelta_final, -3e-4);
}

TEST(Setups, BubbleAndDropletParameters)
{
  const alefem::Setup b1 = bubble_setup(BubbleCase::I);
  EXPECT_EQ(b1.config.physics.gamma, 24.5);
  EXPECT_EQ(b1.config.physics.rho_inner, 100.0);
  EXPECT_EQ(b1.config.t_end, 3.0);
  EXPECT_NEAR(enclosed_volume(b1.curve), pi / 48.0, 0.02 * pi / 48.0);
  const alefem::Setup b2 = bubble_setup(BubbleCase::II, 1, "n-stabV");
  EXPECT_EQ(b2.config.physics.mu_inner, 0.1);
  EXPECT_EQ(b2.config.physics.gamma, 1.96);
  EXPECT_EQ(b2.config.dt, 0.0025);
  EXPECT_EQ(b2.config.mesh.target_h, 1.0 / 32.0);
  EXPECT_EQ(b2.curve.num_segments(), 32u);
  EXPECT_TRUE(b2.config.variant.volume_preserving);

  const alefem::Setup d5 = droplet_setup(5);
  EXPECT_EQ(d5.config.dt, 5e-4);
  EXPECT_EQ(d5.config.domain.r_max, 0.6);
  EXPECT_EQ(d5.config.physics.gravity.z, 0.0);
  EXPECT_EQ(d5.curve.num_segments(), 64u);
  EXPECT_THROW(droplet_setup(3), ConfigError);
  EXPECT_THROW(bubble_setup(BubbleCase::I, 3), ConfigError);
}

TEST(Sample, InitialBubbleState)
{
  const alefem::Setup su = bubble_setup(BubbleCase::I);
  const RunState s = RunState::initial(su.config, su.curve);
  const BenchmarkSample b = sample(s);
  EXPECT_EQ(b.t, 0.0);
  EXPECT_EQ(b.v_delta, 0.0);
  EXPECT_EQ(b.V_c, 0.0);
  EXPECT_NEAR(b.z_c, 0.5, 1e-13);
  EXPECT_NEAR(b.psi_e, 1.0, 1e-12);
  EXPECT_GE(b.alpha_min, remesh_angle);
  EXPECT_DOUBLE_EQ(b.volume, enclosed_volume(s.curve));
  EXPECT_DOUBLE_EQ(b.area, surface_area(s.curve));
}
