#ifndef ALEFEM_BENCHMARKS_HPP
#define ALEFEM_BENCHMARKS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "alefem/curve.hpp"
#include "alefem/fem.hpp"
#include "alefem/mesh.hpp"
#include "alefem/schemes.hpp"

namespace alefem
{

/// π^{1/3} (6 vol)^{2/3} / area.
inline double sphericity(const GeneratingCurve &curve)
{
  const double a = surface_area(curve);
  if (!(a > 0.0))
    throw GeometryError("sphericity of a curve with zero area");
  const double v = enclosed_volume(curve);
  return std::cbrt(std::numbers::pi) * std::pow(6.0 * v, 2.0 / 3.0) / a;
}

struct RiseQuantities {
  double V_c = 0.0;
  double z_c = 0.0;
};

/// Rise velocity and centre of mass of the inner phase.
inline RiseQuantities rise_velocity_and_centroid(const FittedMesh &mesh, const VelocityField &U,
                                                 const GeneratingCurve &curve)
{
  const double vol = enclosed_volume(curve);
  if (!(vol > 0.0))
    throw GeometryError("inner phase has zero volume");
  double uz = 0.0, zr = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.phase[t] != Phase::inner)
      continue;
    const Element e(mesh, t);
    for (const auto &q : triangle_rule()) {
      const Vec2 x = e.point(q.bary);
      const double w = q.weight * e.area * x.r;
      uz += w * U.value(mesh, t, q.bary).z;
      zr += w * x.z;
    }
  }
  return {2.0 * std::numbers::pi * uz / vol, 2.0 * std::numbers::pi * zr / vol};
}

struct BenchmarkSample {
  double t = 0.0;
  double energy = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double v_delta = 0.0;
  double sphericity = 1.0;
  double V_c = 0.0;
  double z_c = 0.0;
  double alpha_min = 0.0;
  double psi_e = 1.0;
  int picard_iterations = 0;
  int solver_iterations = 0;
  bool remeshed = false;
};

inline BenchmarkSample sample(const RunState &s, const StepReport *rep = nullptr)
{
  BenchmarkSample b;
  b.t = s.t;
  b.energy = s.energy;
  b.area = surface_area(s.curve);
  b.volume = enclosed_volume(s.curve);
  b.v_delta = b.volume / s.volume0 - 1.0;
  b.sphericity = sphericity(s.curve);
  const RiseQuantities rq = rise_velocity_and_centroid(s.mesh, s.U, s.curve);
  b.V_c = rq.V_c;
  b.z_c = rq.z_c;
  b.alpha_min = min_angle(s.mesh);
  b.psi_e = equidistribution_ratio(s.curve);
  if (rep) {
    b.picard_iterations = rep->picard_iterations;
    b.solver_iterations = rep->solver_iterations;
    b.remeshed = rep->remeshed;
  }
  return b;
}

struct RunSummary {
  double s_min = 1.0;
  double t_at_s_min = 0.0;
  double Vc_max = 0.0;
  double t_at_Vc_max = 0.0;
  double zc_final = 0.0;
  double vDelta_final = 0.0;
};

inline RunSummary summarize(const std::vector<BenchmarkSample> &samples)
{
  RunSummary s;
  if (samples.empty())
    return s;
  s.s_min = samples.front().sphericity;
  s.t_at_s_min = samples.front().t;
  s.Vc_max = samples.front().V_c;
  s.t_at_Vc_max = samples.front().t;
  for (const auto &b : samples) {
    if (b.sphericity < s.s_min) {
      s.s_min = b.sphericity;
      s.t_at_s_min = b.t;
    }
    if (b.V_c > s.Vc_max) {
      s.Vc_max = b.V_c;
      s.t_at_Vc_max = b.t;
    }
  }
  s.zc_final = samples.back().z_c;
  s.vDelta_final = samples.back().v_delta;
  return s;
}

// ---------------------------------------------------------------------------
// Oscillating droplet

struct DropletSpec {
  int n = 2;
  double epsilon = 0.08;
  double R0 = 0.3;
  double centre = 1.0;

  double radius(double theta, double eps) const
  {
    return R0 * (1.0 + eps * std::legendre(n, std::cos(theta)) - eps * eps / (2.0 * n + 1.0));
  }
};

/// Perturbed sphere sampled at uniform θ from the lower to the upper pole.
inline GeneratingCurve droplet_initial_curve(const DropletSpec &spec, std::size_t segments)
{
  if (spec.n < 2)
    throw GeometryError("droplet mode must be at least 2");
  std::vector<Vec2> nodes(segments + 1);
  for (std::size_t j = 0; j <= segments; ++j) {
    const double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(segments);
    const double R = spec.radius(th, spec.epsilon);
    if (!(R > 0.0))
      throw GeometryError("perturbed droplet radius is not positive");
    nodes[j] = {R * std::cos(th - std::numbers::pi / 2), R * std::sin(th - std::numbers::pi / 2) + spec.centre};
  }
  nodes.front().r = 0.0;
  nodes.back().r = 0.0;
  return GeneratingCurve(std::move(nodes));
}

struct DropletReference {
  double omega0 = 0.0; // inviscid angular frequency
  double lambda = 0.0; // decay rate
  double omega = 0.0;  // damped angular frequency

  double epsilon(const DropletSpec &spec, double t) const
  {
    return spec.epsilon * std::exp(-lambda * t) * std::cos(omega * t);
  }
  /// Displacement of the upper pole from its rest position 1 + R0.
  double pole_displacement(const DropletSpec &spec, double t) const
  {
    const double e = epsilon(spec, t);
    return spec.radius(std::numbers::pi, e) - spec.R0;
  }
};

/// Small-amplitude asymptotics; rho and mu are the drop (inner) values.
inline DropletReference droplet_reference(const DropletSpec &spec, double rho, double mu,
                                          double gamma)
{
  const double n = spec.n;
  const double R3 = spec.R0 * spec.R0 * spec.R0;
  DropletReference ref;
  ref.omega0 = std::sqrt(n * (n - 1.0) * (n + 2.0) * gamma / (rho * R3));
  ref.lambda = (2.0 * n + 1.0) * (n - 1.0) * mu / (rho * spec.R0 * spec.R0);
  if (ref.lambda >= ref.omega0)
    throw Error("overdamped droplet: asymptotic formula not valid");
  ref.omega = std::sqrt(ref.omega0 * ref.omega0 - ref.lambda * ref.lambda);
  return ref;
}

struct OscillationFit {
  double omega = 0.0;
  double decay = 0.0;
  std::size_t extrema = 0;
};

/// Least-squares fit of frequency and decay from the extrema of a sampled
/// damped oscillation. Extrema are located by parabolic interpolation;
/// consecutive extrema are half a period apart and their peak-to-peak
/// differences decay like exp(−decay·t).
inline OscillationFit fit_oscillation(const std::vector<double> &t, const std::vector<double> &y)
{
  if (t.size() != y.size() || t.size() < 5)
    throw Error("oscillation fit needs at least five samples");
  std::vector<double> te, ye;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double a = y[i - 1], b = y[i], c = y[i + 1];
    const bool peak = (b > a && b >= c) || (b < a && b <= c);
    if (!peak)
      continue;
    const double den = a - 2.0 * b + c;
    const double h = t[i + 1] - t[i];
    double off = 0.0, val = b;
    if (den != 0.0) {
      off = 0.5 * (a - c) / den;
      val = b - 0.25 * (a - c) * off;
    }
    te.push_back(t[i] + off * h);
    ye.push_back(val);
  }
  // Drop spurious extrema from noise: a pair of neighbours closer than a
  // tenth of the signal range is a wiggle, and the rest must alternate.
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double wiggle = 0.1 * (*hi - *lo);
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < te.size(); ++k) {
    if (!ys.empty() && std::abs(ye[k] - ys.back()) < wiggle) {
      ys.pop_back();
      ts.pop_back();
      continue;
    }
    if (ys.size() >= 2 && (ye[k] - ys.back()) * (ys.back() - ys[ys.size() - 2]) > 0.0) {
      ys.back() = ye[k];
      ts.back() = te[k];
      continue;
    }
    ts.push_back(te[k]);
    ys.push_back(ye[k]);
  }
  if (ts.size() < 3)
    throw Error("oscillation fit found fewer than three extrema");

  auto slope = [](const std::vector<double> &x, const std::vector<double> &v) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += v[i];
      sxx += x[i] * x[i];
      sxy += x[i] * v[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  std::vector<double> k(ts.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    k[i] = static_cast<double>(i);
  OscillationFit fit;
  fit.extrema = ts.size();
  fit.omega = std::numbers::pi / slope(k, ts);
  std::vector<double> tm, la;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    tm.push_back(0.5 * (ts[i] + ts[i + 1]));
    la.push_back(std::log(std::abs(ys[i + 1] - ys[i])));
  }
  fit.decay = tm.size() >= 2 ? -slope(tm, la) : 0.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Canonical setups

enum class BubbleCase { I, II };

/// Refinement level l: h = 2^{-4-l}, Δt = 0.01 / 4^l.
inline void apply_level(SchemeConfig &cfg, int level, double h0 = 1.0 / 16.0, double dt0 = 0.01)
{
  if (level < 0 || level > 2)
    throw ConfigError("refinement level must be 0, 1 or 2");
  cfg.mesh.target_h = h0 / std::pow(2.0, level);
  cfg.dt = dt0 / std::pow(4.0, level);
}

inline int level_segments(int level, int J0 = 16) { return J0 << level; }

struct Setup {
  SchemeConfig config;
  GeneratingCurve curve;
  std::string name;
};

inline Setup bubble_setup(BubbleCase c, int level = 0, const std::string &scheme = "n-stab")
{
  Setup s;
  s.name = c == BubbleCase::I ? "bubble1" : "bubble2";
  SchemeConfig &cfg = s.config;
  cfg.variant = SchemeVariant::parse(scheme);
  cfg.domain = Domain{0.5, 0.0, 2.0, BoundaryKind::no_slip, BoundaryKind::free_slip,
                      BoundaryKind::no_slip};
  if (c == BubbleCase::I)
    cfg.physics = Physics{100.0, 1000.0, 1.0, 10.0, 24.5, {0.0, -0.98}};
  else
    cfg.physics = Physics{1.0, 1000.0, 0.1, 10.0, 1.96, {0.0, -0.98}};
  cfg.t_end = c == BubbleCase::I ? 3.0 : 1.5;
  apply_level(cfg, level);
  s.curve = make_semicircle(0.5, 0.25, static_cast<std::size_t>(level_segments(level)));
  return s;
}

inline DropletSpec droplet_spec(int mode)
{
  DropletSpec spec;
  spec.n = mode;
  spec.epsilon = mode == 2 ? 0.08 : 0.02;
  return spec;
}

inline Setup droplet_setup(int mode, int level = 0, const std::string &scheme = "n-equiV")
{
  if (mode != 2 && mode != 5)
    throw ConfigError("droplet setups exist for modes 2 and 5");
  Setup s;
  s.name = mode == 2 ? "droplet2" : "droplet5";
  SchemeConfig &cfg = s.config;
  cfg.variant = SchemeVariant::parse(scheme);
  cfg.domain = Domain{0.6, 0.0, 2.0, BoundaryKind::no_slip, BoundaryKind::free_slip,
                      BoundaryKind::no_slip};
  cfg.physics = Physics{1000.0, 1.0, 2.0, 0.01, 40.0, {0.0, 0.0}};
  const DropletSpec spec = droplet_spec(mode);
  const int J = 64 << level;
  s.curve = droplet_initial_curve(spec, static_cast<std::size_t>(J));
  // Interface element size equal to the mean chord.
  cfg.mesh.target_h = std::numbers::pi * spec.R0 / J;
  // Slower growth away from the curve keeps the drop interior resolved; the
  // oscillation decay is sensitive to it.
  cfg.mesh.grading = 0.2;
  const double dt0 = mode == 2 ? 1e-3 : 5e-4;
  cfg.dt = dt0 / std::pow(4.0, level);
  cfg.t_end = mode == 2 ? 4.0 : 1.5;
  // The incomplete factorization of the saddle block is slow to build at
  // this resolution; the exact factorization is an order of magnitude faster.
  cfg.linear.preconditioner = "lu";
  return s;
}


} // namespace alefem

#endif
