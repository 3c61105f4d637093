#ifndef ALEFEM_SADDLE_HPP
#define ALEFEM_SADDLE_HPP

#include <memory>
#include <string>

#include <Eigen/SparseLU>

#include "alefem/sparse.hpp"

namespace alefem
{

/// Coupled block system in the unknowns (U, P, κ, δX):
///
///   B U − C P − γ N κ          = c
///   Cᵀ U                       = 0
///   Nᵀ U − (1/Δt) N_Γᵀ δX      = g3
///   N_κ κ + A δX               = g4
struct CoupledSystem {
  SpMat B, C, N;
  Vector c;
  SpMat N_gamma; // kinematic curve block, vector × scalar
  SpMat N_kappa; // curvature equation block, vector × scalar
  SpMat A;       // curve stiffness
  Vector g3, g4;
  double gamma = 0.0;
  double dt = 1.0;

  Eigen::Index nU() const { return B.rows(); }
  Eigen::Index nP() const { return C.cols(); }
  Eigen::Index nK() const { return N.cols(); }
  Eigen::Index nX() const { return A.rows(); }
};

struct CoupledSolution {
  Vector U, P, kappa, dX;
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Sparse LU of Ξ = [[0, −(1/Δt) N_Γᵀ], [N_κ, A]].
class CurveBlockFactor
{
public:
  CurveBlockFactor() = default;
  explicit CurveBlockFactor(const CoupledSystem &s) { compute(s); }

  void compute(const CoupledSystem &s)
  {
    nK_ = s.nK();
    nX_ = s.nX();
    const SpMat NgT = SpMat(s.N_gamma.transpose());
    xi_ = block_matrix({{nullptr, &NgT}, {&s.N_kappa, &s.A}}, {nK_, nX_}, {nK_, nX_},
                       {{0.0, -1.0 / s.dt}, {1.0, 1.0}});
    xi_.makeCompressed();
    lu_.compute(xi_);
    if (lu_.info() != Eigen::Success)
      throw SolverError("curve block factorization failed: " + lu_.lastErrorMessage());
  }

  /// Ξ^{-1} (a; b) split into (κ, δX).
  std::pair<Vector, Vector> solve(const Vector &a, const Vector &b) const
  {
    Vector rhs(nK_ + nX_);
    rhs << a, b;
    const Vector x = lu_.solve(rhs);
    return {x.head(nK_), x.tail(nX_)};
  }

  const SpMat &matrix() const { return xi_; }

private:
  Eigen::Index nK_ = 0, nX_ = 0;
  SpMat xi_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

/// Curve unknowns from the velocity by back substitution through Ξ.
inline std::pair<Vector, Vector> recover_curve_unknowns(const CurveBlockFactor &factor,
                                                        const CoupledSystem &s, const Vector &U)
{
  return factor.solve(s.g3 - s.N.transpose() * U, s.g4);
}

struct SchurOptions {
  std::string preconditioner = "ilut";
  GmresOptions gmres{};
};

/// Velocity-pressure solver with the curve unknowns eliminated. The
/// preconditioner acts on [[B, −C], [Cᵀ, 0]] and is kept across solves
/// until prepare() is called again.
class SchurSolver
{
public:
  explicit SchurSolver(SchurOptions opt = {}) : opt_(std::move(opt)) {}

  void prepare(const CoupledSystem &s)
  {
    const Eigen::Index nU = s.nU(), nP = s.nP();
    const SpMat Ct = SpMat(s.C.transpose());
    SpMat K = block_matrix({{&s.B, &s.C}, {&Ct, nullptr}}, {nU, nP}, {nU, nP},
                           {{1.0, -1.0}, {1.0, 0.0}});
    K.makeCompressed();
    prec_ = make_preconditioner(opt_.preconditioner);
    prec_->compute(K);
  }

  const Preconditioner *preconditioner() const { return prec_.get(); }

  /// Solves the coupled system; `guess` (size nU + nP) warm-starts GMRES.
  CoupledSolution solve(const CoupledSystem &s, const CurveBlockFactor &factor,
                        const Vector *guess = nullptr) const
  {
    if (!prec_)
      throw SolverError("Schur solver used before prepare()");
    const Eigen::Index nU = s.nU(), nP = s.nP(), nK = s.nK();
    const Vector zeroK = Vector::Zero(nK), zeroX = Vector::Zero(s.nX());

    LinearOperator op = [&](const Vector &x, Vector &y) {
      const auto u = x.head(nU);
      const auto p = x.tail(nP);
      const Vector ntu = s.N.transpose() * u;
      const Vector kappa = factor.solve(-ntu, zeroX).first;
      y.resize(nU + nP);
      // −γ N κ(U) with κ(U) = [Ξ^{-1}(−Nᵀ U; 0)]_κ
      y.head(nU) = s.B * u - s.C * p - s.gamma * (s.N * kappa);
      y.tail(nP) = s.C.transpose() * u;
    };
    LinearOperator pre = [&](const Vector &v, Vector &z) { prec_->apply(v, z); };

    const auto [k0, x0] = factor.solve(s.g3, s.g4);
    Vector rhs(nU + nP);
    rhs.head(nU) = s.c + s.gamma * (s.N * k0);
    rhs.tail(nP).setZero();

    Vector x = guess && guess->size() == nU + nP ? *guess : Vector::Zero(nU + nP);
    const GmresResult gr = gmres(op, pre, rhs, x, opt_.gmres);
    if (!gr.converged) {
      std::ostringstream msg;
      msg << "GMRES did not converge: relative residual " << gr.rel_residual << " after "
          << gr.iterations << " iterations; history";
      for (std::size_t i = 0; i < gr.history.size(); i += std::max<std::size_t>(1, gr.history.size() / 10))
        msg << ' ' << gr.history[i];
      throw SolverError(msg.str());
    }
    CoupledSolution out;
    out.U = x.head(nU);
    out.P = x.tail(nP);
    std::tie(out.kappa, out.dX) = recover_curve_unknowns(factor, s, out.U);
    out.iterations = gr.iterations;
    out.rel_residual = gr.rel_residual;
    return out;
  }

  /// Convenience: factor and solve in one go.
  CoupledSolution solve_schur(const CoupledSystem &s)
  {
    prepare(s);
    const CurveBlockFactor f(s);
    return solve(s, f);
  }

private:
  SchurOptions opt_;
  std::unique_ptr<Preconditioner> prec_;
};

/// Full block matrix of the coupled system.
inline SpMat coupled_matrix(const CoupledSystem &s)
{
  const SpMat Ct = SpMat(s.C.transpose());
  const SpMat Nt = SpMat(s.N.transpose());
  const SpMat NgT = SpMat(s.N_gamma.transpose());
  return block_matrix({{&s.B, &s.C, &s.N, nullptr},
                       {&Ct, nullptr, nullptr, nullptr},
                       {&Nt, nullptr, nullptr, &NgT},
                       {nullptr, nullptr, &s.N_kappa, &s.A}},
                      {s.nU(), s.nP(), s.nK(), s.nX()}, {s.nU(), s.nP(), s.nK(), s.nX()},
                      {{1.0, -1.0, -s.gamma, 0.0},
                       {1.0, 0.0, 0.0, 0.0},
                       {1.0, 0.0, 0.0, -1.0 / s.dt},
                       {0.0, 0.0, 1.0, 1.0}});
}

inline Vector coupled_rhs(const CoupledSystem &s)
{
  Vector b(s.nU() + s.nP() + s.nK() + s.nX());
  b << s.c, Vector::Zero(s.nP()), s.g3, s.g4;
  return b;
}

/// Direct factorization of the whole block system.
inline CoupledSolution solve_monolithic(const CoupledSystem &s)
{
  const Vector x = solve_direct(coupled_matrix(s), coupled_rhs(s));
  CoupledSolution out;
  Eigen::Index o = 0;
  out.U = x.segment(o, s.nU());
  o += s.nU();
  out.P = x.segment(o, s.nP());
  o += s.nP();
  out.kappa = x.segment(o, s.nK());
  o += s.nK();
  out.dX = x.segment(o, s.nX());
  return out;
}

} // namespace alefem

#endif
