#ifndef ALEFEM_SCHEMES_HPP
#define ALEFEM_SCHEMES_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alefem/ale.hpp"
#include "alefem/assembly.hpp"
#include "alefem/curve.hpp"
#include "alefem/fem.hpp"
#include "alefem/mesh.hpp"
#include "alefem/saddle.hpp"

namespace alefem
{

/// One of the eight time-stepping methods: inertia form × curvature
/// formulation × optional volume-preserving normal.
struct SchemeVariant {
  Inertia inertia = Inertia::nonconservative;
  CurvatureMode mode = CurvatureMode::stab;
  bool volume_preserving = false;

  bool lagged() const { return mode == CurvatureMode::stab || volume_preserving; }

  std::string name() const
  {
    std::string s = inertia == Inertia::nonconservative ? "n-" : "c-";
    s += mode == CurvatureMode::stab ? "Stab" : "Equi";
    if (volume_preserving)
      s += "V";
    return s;
  }

  /// Accepts names such as "n-stab", "c-Equi", "n-StabV" (case-insensitive).
  static SchemeVariant parse(const std::string &name)
  {
    std::string s;
    for (char c : name)
      s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    SchemeVariant v;
    auto fail = [&] {
      return ConfigError("unknown scheme '" + name +
                         "' (expected n-stab, n-equi, c-stab, c-equi, optionally with suffix V)");
    };
    if (s.size() < 6 || s[1] != '-')
      throw fail();
    if (s[0] == 'n')
      v.inertia = Inertia::nonconservative;
    else if (s[0] == 'c')
      v.inertia = Inertia::conservative;
    else
      throw fail();
    const std::string rest = s.substr(2);
    if (rest == "stab" || rest == "stabv")
      v.mode = CurvatureMode::stab;
    else if (rest == "equi" || rest == "equiv")
      v.mode = CurvatureMode::equi;
    else
      throw fail();
    v.volume_preserving = rest.back() == 'v';
    return v;
  }
};

struct Physics {
  double rho_inner = 100.0;
  double rho_outer = 1000.0;
  double mu_inner = 1.0;
  double mu_outer = 10.0;
  double gamma = 24.5;
  Vec2 gravity{0.0, -0.98};
};

struct SchemeConfig {
  SchemeVariant variant{};
  double dt = 0.01;
  double t_end = 3.0;
  double picard_tol = 1e-8;
  int picard_max_iterations = 50;
  Physics physics{};
  Domain domain{};
  MeshOptions mesh{};
  std::string solver = "schur"; // or "direct"
  SchurOptions linear{};

  std::vector<std::string> invalid_keys() const
  {
    std::vector<std::string> bad;
    if (!(dt > 0.0))
      bad.push_back("scheme.dt");
    if (!(t_end >= 0.0))
      bad.push_back("scheme.t_end");
    if (!(picard_tol > 0.0))
      bad.push_back("scheme.picard_tol");
    if (picard_max_iterations < 1)
      bad.push_back("scheme.picard_max_iterations");
    if (!(physics.rho_inner > 0.0))
      bad.push_back("physics.rho_inner");
    if (!(physics.rho_outer > 0.0))
      bad.push_back("physics.rho_outer");
    if (!(physics.mu_inner > 0.0))
      bad.push_back("physics.mu_inner");
    if (!(physics.mu_outer > 0.0))
      bad.push_back("physics.mu_outer");
    if (!(physics.gamma >= 0.0))
      bad.push_back("physics.gamma");
    if (!(domain.r_max > 0.0) || !(domain.z_max > domain.z_min))
      bad.push_back("mesh.domain");
    if (!(mesh.target_h > 0.0))
      bad.push_back("mesh.target_h");
    if (solver != "schur" && solver != "direct")
      bad.push_back("scheme.solver");
    if (linear.preconditioner != "lu" && linear.preconditioner != "ilut")
      bad.push_back("scheme.preconditioner");
    return bad;
  }

  void validate() const
  {
    const auto bad = invalid_keys();
    if (!bad.empty()) {
      std::string msg = "invalid configuration:";
      for (const auto &k : bad)
        msg += " " + k;
      throw ConfigError(msg);
    }
  }
};

/// Evolving solution bundle. `mesh` is T^m fitted to `curve` = X^m, `U` is
/// U^m with coefficients riding on T^m and `W` the mesh velocity W^m of the
/// move that produced T^m.
struct RunState {
  FittedMesh mesh;
  GeneratingCurve curve;
  VelocityField U;
  Eigen::VectorXd P;
  Eigen::VectorXd kappa;
  NodalVectors W;
  int step = 0;
  double t = 0.0;
  double energy = 0.0;
  double volume0 = 0.0;

  static RunState initial(const SchemeConfig &cfg, const GeneratingCurve &curve0)
  {
    RunState s;
    s.curve = curve0;
    s.mesh = generate_fitted_mesh(cfg.domain, curve0, cfg.mesh);
    const std::size_t n = s.mesh.num_vertices() + s.mesh.num_edges();
    s.U.coeffs = Eigen::VectorXd::Zero(2 * n);
    s.P = Eigen::VectorXd::Zero(s.mesh.num_vertices() + s.mesh.num_triangles());
    s.kappa = Eigen::VectorXd::Zero(curve0.num_nodes());
    s.W.assign(s.mesh.num_vertices(), Vec2{});
    s.volume0 = enclosed_volume(curve0);
    s.energy = cfg.physics.gamma * surface_area(curve0);
    return s;
  }
};

/// π (ρ |U|², r) on the given mesh.
inline double kinetic_energy(const FittedMesh &mesh, const PhaseCoefficients &coeff,
                             const VelocityField &U)
{
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    for (const auto &q : triangle_rule()) {
      const Vec2 u = U.value(mesh, t, q.bary);
      acc += q.weight * e.area * coeff.rho[t] * dot(u, u) * e.point(q.bary).r;
    }
  }
  return std::numbers::pi * acc;
}

/// 2π (‖√(μ/r) U·e1‖² + ‖√(μ r) D(U)‖²).
inline double viscous_dissipation(const FittedMesh &mesh, const PhaseCoefficients &coeff,
                                  const VelocityField &U)
{
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Element e(mesh, t);
    for (const auto &q : triangle_rule()) {
      const double r = e.point(q.bary).r;
      const Vec2 u = U.value(mesh, t, q.bary);
      const Eigen::Matrix2d G = U.gradient(mesh, e, t, q.bary);
      const Eigen::Matrix2d D = 0.5 * (G + G.transpose());
      acc += q.weight * e.area * coeff.mu[t] * (u.r * u.r / r + r * D.squaredNorm());
    }
  }
  return 2.0 * std::numbers::pi * acc;
}

/// Data fixed during one time step: spaces, ALE step and bulk blocks.
struct StepContext {
  VelocitySpace vspace;
  PressureSpace pspace;
  AleStep ale;
  PhaseCoefficients coeff;
  CurveDofMap map;
  CurveBlocks plain_blocks;
  SpMat B, C, N;
  Eigen::VectorXd c;
  Eigen::VectorXd AXm; // A_Γ X^m in curve numbering

  StepContext(const RunState &s, const SchemeConfig &cfg)
      : vspace(s.mesh), pspace(s.mesh), ale(AleStep::from_velocity(s.mesh, s.W, cfg.dt)),
        coeff(phase_coefficients(s.mesh, cfg.physics.rho_inner, cfg.physics.rho_outer,
                                 cfg.physics.mu_inner, cfg.physics.mu_outer)),
        map(s.curve.num_nodes())
  {
    assert_fitted(s.mesh, s.curve);
    MomentumInput in;
    in.mesh = &s.mesh;
    in.coeff = &coeff;
    in.ale = &ale;
    in.U_old = &s.U;
    in.dt = cfg.dt;
    in.gravity = cfg.physics.gravity;
    in.inertia = cfg.variant.inertia;
    std::tie(B, c) = assemble_momentum(vspace, in);
    C = assemble_divergence(s.mesh, vspace, pspace);
    N = assemble_interface_coupling(s.mesh, vspace, s.curve, plain_normal_field(s.curve));
    if (cfg.variant.mode == CurvatureMode::equi)
      c -= cfg.physics.gamma * interface_radial_normal_load(s.mesh, vspace, s.curve);
    plain_blocks = curve_blocks(s.curve, cfg.variant.mode, NormalChoice::plain);
    AXm = plain_blocks.A * map.pack(s.curve.nodes());
  }
};

/// Coupled system for the current Picard iterate X^{m+1,ℓ} (`lagged`).
inline CoupledSystem build_linear_system(const StepContext &ctx, const RunState &s,
                                         const GeneratingCurve &lagged, const SchemeConfig &cfg)
{
  CoupledSystem sys;
  sys.B = ctx.B;
  sys.C = ctx.C;
  sys.N = ctx.N;
  sys.c = ctx.c;
  sys.gamma = cfg.physics.gamma;
  sys.dt = cfg.dt;
  const SchemeVariant &v = cfg.variant;
  if (v.volume_preserving) {
    const NormalField f = time_weighted_normal(s.curve, lagged);
    const CurveBlocks tw = curve_blocks(s.curve, v.mode, NormalChoice::time_weighted, &f);
    sys.N_gamma = tw.N;
    sys.N_kappa = tw.N_curv; // stab: time-weighted; equi: lumped plain
    sys.A = tw.A;
  } else {
    sys.N_gamma = ctx.plain_blocks.N;
    sys.N_kappa = ctx.plain_blocks.N_curv;
    sys.A = ctx.plain_blocks.A;
  }
  sys.g3 = Eigen::VectorXd::Zero(s.curve.num_nodes());
  sys.g4 = -ctx.AXm;
  if (v.mode == CurvatureMode::stab)
    sys.g4 -= radial_length_load(lagged, ctx.map);
  return sys;
}

struct PicardResult {
  CoupledSolution solution;
  int iterations = 0;
  int solver_iterations = 0;
  double last_update = 0.0;
};

/// Lagged fixed-point iteration; linear variants stop after one solve.
inline PicardResult picard_solve(const StepContext &ctx, const RunState &s, const SchemeConfig &cfg)
{
  PicardResult res;
  GeneratingCurve lagged = s.curve;
  std::optional<SchurSolver> schur;
  CurveBlockFactor factor;
  Eigen::VectorXd guess;
  for (int l = 0; l < cfg.picard_max_iterations; ++l) {
    const CoupledSystem sys = build_linear_system(ctx, s, lagged, cfg);
    if (cfg.solver == "direct") {
      res.solution = solve_monolithic(sys);
    } else {
      if (!schur) {
        schur.emplace(cfg.linear);
        schur->prepare(sys);
      }
      if (l == 0 || cfg.variant.volume_preserving)
        factor.compute(sys);
      res.solution = schur->solve(sys, factor, guess.size() ? &guess : nullptr);
      guess.resize(sys.nU() + sys.nP());
      guess << res.solution.U, res.solution.P;
    }
    ++res.iterations;
    res.solver_iterations += res.solution.iterations;
    const std::vector<Vec2> dX = ctx.map.unpack(res.solution.dX);
    std::vector<Vec2> next(s.curve.num_nodes());
    double update = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      next[j] = s.curve.node(j) + dX[j];
      update = std::max(update, norm(next[j] - lagged.node(j)));
    }
    next.front().r = 0.0;
    next.back().r = 0.0;
    res.last_update = update;
    lagged = GeneratingCurve(std::move(next));
    if (!cfg.variant.lagged() || update <= cfg.picard_tol)
      return res;
  }
  std::ostringstream msg;
  msg << "Picard iteration did not converge in " << cfg.picard_max_iterations
      << " iterations (last update " << res.last_update << ")";
  throw SolverError(msg.str());
}

struct StepReport {
  int picard_iterations = 0;
  int solver_iterations = 0;
  bool remeshed = false;
  double energy_before = 0.0; // E(ρ^{m-1}, U^m, X^m)
  double energy_after = 0.0;  // E(ρ^m, U^{m+1}, X^{m+1})
  double dissipation = 0.0;   // 2π(‖√(μ/r)U_r‖² + ‖√(μr)D(U)‖²) at U^{m+1}
  double kinetic = 0.0;
  double divergence_residual = 0.0;
};

/// Advances the state by one time step.
inline RunState step(const RunState &s, const SchemeConfig &cfg, StepReport *report = nullptr)
{
  const StepContext ctx(s, cfg);
  const PicardResult pr = picard_solve(ctx, s, cfg);
  const CoupledSolution &sol = pr.solution;

  RunState next;
  next.step = s.step + 1;
  next.t = s.t + cfg.dt;
  next.volume0 = s.volume0;
  next.kappa = sol.kappa;
  next.U.coeffs = ctx.vspace.extend(sol.U);
  next.P = ctx.pspace.project_mean_zero(ctx.pspace.extend(sol.P));

  const std::vector<Vec2> dX = ctx.map.unpack(sol.dX);
  std::vector<Vec2> nodes(s.curve.num_nodes());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    nodes[j] = s.curve.node(j) + dX[j];
  nodes.front().r = 0.0;
  nodes.back().r = 0.0;
  next.curve = GeneratingCurve(nodes);

  StepReport rep;
  rep.picard_iterations = pr.iterations;
  rep.solver_iterations = pr.solver_iterations;
  rep.energy_before = s.energy;
  rep.kinetic = kinetic_energy(s.mesh, ctx.coeff, next.U);
  rep.energy_after = rep.kinetic + cfg.physics.gamma * surface_area(next.curve);
  rep.dissipation = viscous_dissipation(s.mesh, ctx.coeff, next.U);
  rep.divergence_residual = (ctx.C.transpose() * sol.U).cwiseAbs().maxCoeff();
  next.energy = rep.energy_after;

  // Bulk mesh follows the interface.
  NodalVectors delta(dX.begin(), dX.end());
  for (std::size_t j = 0; j < nodes.size(); ++j)
    delta[j] = nodes[j] - s.curve.node(j);
  const NodalVectors psi = elastic_displacement(s.mesh, delta);
  std::vector<Vec2> moved = s.mesh.vertices;
  for (std::size_t k = 0; k < moved.size(); ++k)
    moved[k] += psi[k];
  for (std::size_t j = 0; j < nodes.size(); ++j)
    moved[s.mesh.interface_vertex[j]] = nodes[j];
  next.mesh = s.mesh.moved(std::move(moved));
  next.W.resize(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k)
    next.W[k] = (next.mesh.vertices[k] - s.mesh.vertices[k]) / cfg.dt;
  for (std::size_t t = 0; t < next.mesh.num_triangles(); ++t)
    if (!(next.mesh.signed_area(t) > 0.0))
      throw MeshError("element " + std::to_string(t) +
                      " inverted by the mesh move: reduce the time step");

  if (needs_remesh(next.mesh)) {
    FittedMesh fresh = generate_fitted_mesh(cfg.domain, next.curve, cfg.mesh);
    auto [U, W] = transfer_fields(next.mesh, fresh, next.U, next.W);
    next.mesh = std::move(fresh);
    next.U = std::move(U);
    next.W = std::move(W);
    next.P = Eigen::VectorXd::Zero(next.mesh.num_vertices() + next.mesh.num_triangles());
    rep.remeshed = true;
  }
  if (report)
    *report = rep;
  return next;
}

} // namespace alefem

#endif
