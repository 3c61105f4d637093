#ifndef ALEFEM_SPARSE_HPP
#define ALEFEM_SPARSE_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <unsupported/Eigen/SparseExtra>

#include "alefem/curve.hpp"

namespace alefem
{

using Vector = Eigen::VectorXd;
using LinearOperator = std::function<void(const Vector &, Vector &)>;

struct GmresOptions {
  int restart = 50;
  int max_iterations = 2000;
  double rel_tol = 1e-9;
};

struct GmresResult {
  int iterations = 0;
  double rel_residual = 0.0;
  std::vector<double> history;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning. x holds the initial guess on
/// entry. The residual test uses the true residual ||b − A x|| / ||b||.
inline GmresResult gmres(const LinearOperator &A, const LinearOperator &M_inv, const Vector &b,
                         Vector &x, const GmresOptions &opt = {})
{
  GmresResult res;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (x.size() != n)
    x = Vector::Zero(n);
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const int m = opt.restart;
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Vector cs(m), sn(m), g(m + 1), w(n), z(n), Ax(n);

  A(x, Ax);
  Vector r = b - Ax;
  double beta = r.norm();
  res.rel_residual = beta / bnorm;
  res.history.push_back(res.rel_residual);
  while (res.rel_residual > opt.rel_tol && res.iterations < opt.max_iterations) {
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int k = 0;
    for (; k < m && res.iterations < opt.max_iterations; ++k) {
      M_inv(V.col(k), z);
      A(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = w.dot(V.col(i));
        w -= H(i, k) * V.col(i);
      }
      // Second orthogonalisation pass for robustness.
      for (int i = 0; i <= k; ++i) {
        const double h = w.dot(V.col(i));
        H(i, k) += h;
        w -= h * V.col(i);
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0)
        V.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double d = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = d > 0.0 ? H(k, k) / d : 1.0;
      sn[k] = d > 0.0 ? H(k + 1, k) / d : 0.0;
      H(k, k) = d;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++res.iterations;
      res.history.push_back(std::abs(g[k + 1]) / bnorm);
      if (std::abs(g[k + 1]) / bnorm <= 0.5 * opt.rel_tol || d == 0.0) {
        ++k;
        break;
      }
    }
    // Update with the k computed directions.
    const Vector y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    M_inv(V.leftCols(k) * y, z);
    x += z;
    A(x, Ax);
    r = b - Ax;
    beta = r.norm();
    res.rel_residual = beta / bnorm;
    res.history.back() = res.rel_residual;
    if (beta == 0.0)
      break;
  }
  res.converged = res.rel_residual <= opt.rel_tol;
  return res;
}

/// Preconditioner interface: computes z ≈ P^{-1} v.
class Preconditioner
{
public:
  virtual ~Preconditioner() = default;
  virtual void compute(const SpMat &matrix) = 0;
  virtual void apply(const Vector &v, Vector &z) const = 0;
  virtual std::string name() const = 0;
};

/// Complete sparse LU (UMFPACK).
class DirectLuPreconditioner : public Preconditioner
{
public:
  void compute(const SpMat &matrix) override
  {
    // UMFPACK reads the matrix arrays again during solves.
    matrix_ = matrix;
    matrix_.makeCompressed();
    lu_ = std::make_unique<Eigen::UmfPackLU<SpMat>>();
    lu_->compute(matrix_);
    if (lu_->info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed");
  }
  void apply(const Vector &v, Vector &z) const override { z = lu_->solve(v); }
  std::string name() const override { return "lu"; }

private:
  SpMat matrix_;
  std::unique_ptr<Eigen::UmfPackLU<SpMat>> lu_;
};

/// Incomplete LU with threshold dropping (Eigen::IncompleteLUT).
class IlutPreconditioner : public Preconditioner
{
public:
  IlutPreconditioner(double drop_tol = 1e-6, int fill_factor = 20)
      : drop_(drop_tol), fill_(fill_factor)
  {
  }
  void compute(const SpMat &matrix) override
  {
    ilu_ = std::make_unique<Eigen::IncompleteLUT<double>>();
    ilu_->setDroptol(drop_);
    ilu_->setFillfactor(fill_);
    ilu_->compute(matrix);
    if (ilu_->info() != Eigen::Success)
      throw SolverError("incomplete LU factorization failed");
  }
  void apply(const Vector &v, Vector &z) const override { z = ilu_->solve(v); }
  std::string name() const override { return "ilut"; }

private:
  double drop_;
  int fill_;
  std::unique_ptr<Eigen::IncompleteLUT<double>> ilu_;
};

inline std::unique_ptr<Preconditioner> make_preconditioner(const std::string &name)
{
  if (name == "lu")
    return std::make_unique<DirectLuPreconditioner>();
  if (name == "ilut")
    return std::make_unique<IlutPreconditioner>();
  throw ConfigError("unknown preconditioner '" + name + "' (expected lu or ilut)");
}

/// Direct solve with UMFPACK.
inline Vector solve_direct(const SpMat &A, const Vector &b)
{
  Eigen::UmfPackLU<SpMat> lu(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("direct factorization failed");
  Vector x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw SolverError("direct solve failed");
  return x;
}

/// Writes a matrix in MatrixMarket coordinate format.
inline void dump_matrix_market(const SpMat &A, const std::string &path)
{
  if (!Eigen::saveMarket(A, path))
    throw Error("cannot write matrix to " + path);
}

/// Block matrix assembled from sparse blocks; null entries are zero blocks.
inline SpMat block_matrix(const std::vector<std::vector<const SpMat *>> &blocks,
                          const std::vector<Eigen::Index> &row_sizes,
                          const std::vector<Eigen::Index> &col_sizes,
                          const std::vector<std::vector<double>> &scale = {})
{
  std::vector<Eigen::Index> ro(row_sizes.size() + 1, 0), co(col_sizes.size() + 1, 0);
  for (std::size_t i = 0; i < row_sizes.size(); ++i)
    ro[i + 1] = ro[i] + row_sizes[i];
  for (std::size_t j = 0; j < col_sizes.size(); ++j)
    co[j + 1] = co[j] + col_sizes[j];
  Triplets trip;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      const SpMat *b = blocks[i][j];
      if (!b)
        continue;
      if (b->rows() != row_sizes[i] || b->cols() != col_sizes[j]) {
        std::ostringstream msg;
        msg << "block (" << i << "," << j << ") has size " << b->rows() << "x" << b->cols();
        throw SolverError(msg.str());
      }
      const double s = scale.empty() ? 1.0 : scale[i][j];
      for (int k = 0; k < b->outerSize(); ++k)
        for (SpMat::InnerIterator it(*b, k); it; ++it)
          trip.emplace_back(static_cast<int>(ro[i] + it.row()), static_cast<int>(co[j] + it.col()),
                            s * it.value());
    }
  SpMat out(ro.back(), co.back());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

} // namespace alefem

#endif
