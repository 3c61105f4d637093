#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/SparseExtra>

#include "alefem/saddle.hpp"
#include "alefem/schemes.hpp"

using namespace alefem;

namespace
{

SchemeConfig coarse_config(const std::string &scheme)
{
  SchemeConfig cfg;
  cfg.variant = SchemeVariant::parse(scheme);
  cfg.linear.preconditioner = "ilut";
  return cfg;
}

/// State after a few steps so that U, W and the curve are all nontrivial.
RunState advanced_state(const SchemeConfig &cfg, int steps)
{
  RunState s = RunState::initial(cfg, make_semicircle(0.5, 0.25, 16));
  for (int m = 0; m < steps; ++m)
    s = step(s, cfg);
  return s;
}

SpMat random_sparse(int n, unsigned seed, double shift)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Triplets trip;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, shift + u(rng));
    for (int k = 0; k < 4; ++k)
      trip.emplace_back(i, int(rng() % n), u(rng));
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

} // namespace

TEST(Gmres, SolvesNonsymmetricSystem)
{
  const SpMat A = random_sparse(300, 1, 6.0);
  const Vector b = Vector::LinSpaced(300, -1.0, 2.0);
  Vector x = Vector::Zero(300);
  const LinearOperator op = [&](const Vector &v, Vector &y) { y = A * v; };
  const LinearOperator id = [](const Vector &v, Vector &z) { z = v; };
  const GmresResult r = gmres(op, id, b, x, GmresOptions{30, 2000, 1e-10});
  EXPECT_TRUE(r.converged);
  EXPECT_LT((b - A * x).norm() / b.norm(), 1e-10);
  EXPECT_EQ(r.history.front(), 1.0);
  EXPECT_LE(r.history.back(), 1e-10);
}

TEST(Gmres, ZeroRightHandSide)
{
  const SpMat A = random_sparse(20, 2, 5.0);
  Vector x = Vector::Ones(20);
  const LinearOperator op = [&](const Vector &v, Vector &y) { y = A * v; };
  const GmresResult r = gmres(op, op, Vector::Zero(20), x);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(x.norm(), 0.0);
}

TEST(Gmres, ReportsNonConvergence)
{
  const SpMat A = random_sparse(200, 3, 0.0);
  Vector x = Vector::Zero(200);
  const LinearOperator op = [&](const Vector &v, Vector &y) { y = A * v; };
  const LinearOperator id = [](const Vector &v, Vector &z) { z = v; };
  const GmresResult r = gmres(op, id, Vector::Ones(200), x, GmresOptions{5, 10, 1e-12});
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 10);
}

TEST(Preconditioners, ExactLuAndIlut)
{
  const SpMat A = random_sparse(200, 4, 4.0);
  const Vector b = Vector::Ones(200);
  for (const char *name : {"lu", "ilut"}) {
    auto P = make_preconditioner(name);
    P->compute(A);
    EXPECT_EQ(P->name(), name);
    Vector x = Vector::Zero(200);
    const LinearOperator op = [&](const Vector &v, Vector &y) { y = A * v; };
    const LinearOperator pre = [&](const Vector &v, Vector &z) { P->apply(v, z); };
    const GmresResult r = gmres(op, pre, b, x);
    EXPECT_TRUE(r.converged) << name;
    if (std::string(name) == "lu")
      EXPECT_LE(r.iterations, 2);
  }
  EXPECT_THROW(make_preconditioner("jacobi"), ConfigError);
}

TEST(BlockMatrix, LayoutAndScaling)
{
  SpMat a(2, 2), b(2, 1);
  a.insert(0, 0) = 1.0;
  a.insert(1, 1) = 2.0;
  b.insert(1, 0) = 3.0;
  const SpMat M = block_matrix({{&a, &b}, {nullptr, nullptr}}, {2, 1}, {2, 1}, {{1.0, -2.0}, {0.0, 0.0}});
  EXPECT_EQ(M.rows(), 3);
  EXPECT_EQ(M.coeff(1, 1), 2.0);
  EXPECT_EQ(M.coeff(1, 2), -6.0);
  EXPECT_EQ(M.coeff(2, 2), 0.0);
  EXPECT_THROW(block_matrix({{&a, &a}, {nullptr, nullptr}}, {2, 1}, {2, 1}, {{1.0, 1.0}, {0.0, 0.0}}),
               Error);
}

TEST(DumpMatrixMarket, RoundTrip)
{
  const SpMat A = random_sparse(30, 5, 3.0);
  const std::string path = (std::filesystem::temp_directory_path() / "alefem_dump.mtx").string();
  dump_matrix_market(A, path);
  SpMat B;
  ASSERT_TRUE(Eigen::loadMarket(B, path));
  EXPECT_LT((Eigen::MatrixXd(A) - Eigen::MatrixXd(B)).cwiseAbs().maxCoeff(), 1e-12);
  std::filesystem::remove(path);
}

TEST(CurveBlockFactor, SolvesTheCurveBlock)
{
  const SchemeConfig cfg = coarse_config("n-stab");
  const RunState s = advanced_state(cfg, 2);
  const StepContext ctx(s, cfg);
  const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  const CurveBlockFactor F(sys);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector a(sys.nK()), b(sys.nX());
  for (auto &v : a)
    v = u(rng);
  for (auto &v : b)
    v = u(rng);
  const auto [k, x] = F.solve(a, b);
  Vector z(sys.nK() + sys.nX()), rhs(sys.nK() + sys.nX());
  z << k, x;
  rhs << a, b;
  EXPECT_LT((F.matrix() * z - rhs).norm() / rhs.norm(), 1e-12);
}

TEST(RecoverCurveUnknowns, ResidualOfCurveRows)
{
  const SchemeConfig cfg = coarse_config("n-equi");
  const RunState s = advanced_state(cfg, 2);
  const StepContext ctx(s, cfg);
  CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  const CurveBlockFactor F(sys);
  {
    // Zero velocity with zero bending load leaves the curve where it is.
    CoupledSystem z = sys;
    z.g4.setZero();
    const auto [k, x] = recover_curve_unknowns(F, z, Vector::Zero(sys.nU()));
    EXPECT_EQ(k.norm(), 0.0);
    EXPECT_EQ(x.norm(), 0.0);
  }
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector U(sys.nU());
  for (auto &v : U)
    v = u(rng);
  const auto [k, x] = recover_curve_unknowns(F, sys, U);
  const Vector r3 = sys.N.transpose() * U - sys.N_gamma.transpose() * x / sys.dt - sys.g3;
  const Vector r4 = sys.N_kappa * k + sys.A * x - sys.g4;
  EXPECT_LT(r3.norm(), 1e-12 * (sys.N.transpose() * U).norm());
  EXPECT_LT(r4.norm(), 1e-12 * std::max(1.0, sys.g4.norm()));
}

TEST(SchurSolver, MatchesMonolithicSolve)
{
  for (const char *scheme : {"n-stab", "c-equi", "n-stabV"}) {
    const SchemeConfig cfg = coarse_config(scheme);
    const RunState s = advanced_state(cfg, 3);
    const StepContext ctx(s, cfg);
    const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
    const CoupledSolution direct = solve_monolithic(sys);
    SchurOptions opt;
    opt.gmres.rel_tol = 1e-12;
    SchurSolver schur(opt);
    const CoupledSolution it = schur.solve_schur(sys);
    const double scale = direct.U.cwiseAbs().maxCoeff();
    EXPECT_LT((it.U - direct.U).cwiseAbs().maxCoeff(), 1e-8 * scale) << scheme;
    EXPECT_LT((it.kappa - direct.kappa).cwiseAbs().maxCoeff(),
              1e-8 * direct.kappa.cwiseAbs().maxCoeff())
        << scheme;
    EXPECT_LT((it.dX - direct.dX).cwiseAbs().maxCoeff(), 1e-8 * direct.dX.cwiseAbs().maxCoeff())
        << scheme;
    // Monolithic residual of the iterate.
    Vector x(sys.nU() + sys.nP() + sys.nK() + sys.nX());
    x << it.U, it.P, it.kappa, it.dX;
    const Vector b = coupled_rhs(sys);
    EXPECT_LT((coupled_matrix(sys) * x - b).norm() / b.norm(), 1e-9) << scheme;
  }
}

TEST(SchurSolver, ZeroSurfaceTensionDecouplesStokes)
{
  const SchemeConfig cfg = coarse_config("n-stab");
  const RunState s = advanced_state(cfg, 2);
  const StepContext ctx(s, cfg);
  CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  sys.gamma = 0.0;
  SchurOptions opt;
  opt.gmres.rel_tol = 1e-12;
  SchurSolver schur(opt);
  const CoupledSolution it = schur.solve_schur(sys);
  const SpMat Ct = SpMat(sys.C.transpose());
  const SpMat K = block_matrix({{&sys.B, &sys.C}, {&Ct, nullptr}}, {sys.nU(), sys.nP()},
                               {sys.nU(), sys.nP()}, {{1.0, -1.0}, {1.0, 0.0}});
  Vector rhs(sys.nU() + sys.nP());
  rhs << sys.c, Vector::Zero(sys.nP());
  const Vector up = solve_direct(K, rhs);
  EXPECT_LT((it.U - up.head(sys.nU())).cwiseAbs().maxCoeff(),
            1e-8 * up.head(sys.nU()).cwiseAbs().maxCoeff());
}

TEST(SchurSolver, RequiresPrepare)
{
  const SchemeConfig cfg = coarse_config("n-stab");
  const RunState s = RunState::initial(cfg, make_semicircle(0.5, 0.25, 16));
  const StepContext ctx(s, cfg);
  const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  const SchurSolver schur;
  const CurveBlockFactor F(sys);
  EXPECT_THROW(schur.solve(sys, F), SolverError);
}

TEST(SchurSolver, NonConvergenceCarriesHistory)
{
  const SchemeConfig cfg = coarse_config("n-stab");
  const RunState s = advanced_state(cfg, 1);
  const StepContext ctx(s, cfg);
  const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  SchurOptions opt;
  opt.preconditioner = "ilut";
  opt.gmres = GmresOptions{2, 2, 1e-14};
  SchurSolver schur(opt);
  try {
    schur.solve_schur(sys);
    FAIL() << "expected SolverError";
  } catch (const SolverError &e) {
    EXPECT_NE(std::string(e.what()).find("history"), std::string::npos);
  }
}

TEST(SchurSolver, Deterministic)
{
  const SchemeConfig cfg = coarse_config("c-stab");
  const RunState s = advanced_state(cfg, 2);
  const StepContext ctx(s, cfg);
  const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  SchurSolver a(cfg.linear), b(cfg.linear);
  const CoupledSolution x = a.solve_schur(sys), y = b.solve_schur(sys);
  EXPECT_EQ(x.U, y.U);
  EXPECT_EQ(x.dX, y.dX);
  EXPECT_EQ(x.iterations, y.iterations);
}

TEST(CurveRecovery, StaticSphereRedistributesTangentially)
{
  SchemeConfig cfg = coarse_config("n-equi");
  cfg.physics.gravity = {0.0, 0.0};
  const RunState s = RunState::initial(cfg, make_semicircle(0.5, 0.25, 16));
  const StepContext ctx(s, cfg);
  const CoupledSystem sys = build_linear_system(ctx, s, s.curve, cfg);
  const CurveBlockFactor F(sys);
  const auto [k, dx] = recover_curve_unknowns(F, sys, Vector::Zero(sys.nU()));
  const std::vector<Vec2> d = ctx.map.unpack(dx);
  // Nodal normals of the discrete sphere point radially from the centre.
  double normal = 0.0, size = 0.0;
  for (std::size_t j = 1; j + 1 < d.size(); ++j) {
    const Vec2 x = s.curve.node(j) - Vec2{0.0, 0.5};
    normal = std::max(normal, std::abs(dot(d[j], x / norm(x))));
    size = std::max(size, norm(d[j]));
  }
  EXPECT_LT(normal, 1e-12 * std::max(size, 1e-3));
}
