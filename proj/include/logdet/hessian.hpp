#pragma once

#include <atomic>
#include <cstddef>
#include <mutex>
#include <vector>

#include <Eigen/Core>

#include "logdet/multifrontal.hpp"

namespace logdet {

// Everything the Hessian recursions need at a point X: the factors of X, the
// projected inverse S = P(X^{-1}), and a lazily built cache of upper
// triangular R_j with R_j R_j^T = S_{I_j I_j}.
class HessianContext {
 public:
  HessianContext(const SparseSymMatrix& x, SymbolicPtr sym);
  explicit HessianContext(CholeskyFactor f);
  // Throws InvalidArgument unless s matches P(X^{-1}) to 1e-10.
  HessianContext(CholeskyFactor f, SparseSymMatrix s);

  HessianContext(const HessianContext&) = delete;
  HessianContext& operator=(const HessianContext&) = delete;

  const CholeskyFactor& chol() const { return f_; }
  const SparseSymMatrix& s() const { return s_; }
  const SymbolicAnalysis& sym() const { return *f_.sym; }

  // R_j (order |I_j|); builds the whole cache on first use. Throws
  // NumericalBreakdown when some S_{I_j I_j} cannot be factored.
  Eigen::Map<const Eigen::MatrixXd> r(int j) const;
  void warm() const;
  bool cached() const { return built_; }

 private:
  void build() const;

  CholeskyFactor f_;
  SparseSymMatrix s_;
  std::vector<std::size_t> r_off_;
  mutable std::vector<double> r_;
  mutable std::once_flag once_;
  mutable std::atomic<bool> built_{false};
};

// P(X^{-1} Y X^{-1}).
SparseSymMatrix hess_apply(const HessianContext& ctx, const SparseSymMatrix& y);

// Y with hess_apply(ctx, Y) = t.
SparseSymMatrix hess_solve(const HessianContext& ctx, const SparseSymMatrix& t);

// W = R(Y) and its adjoint, where hess_apply = R^adj o R.
SparseSymMatrix hess_factor_apply(const HessianContext& ctx, const SparseSymMatrix& y);
SparseSymMatrix hess_factor_adjoint(const HessianContext& ctx, const SparseSymMatrix& w);

struct SparseFactorResult {
  SparseSymMatrix value;
  // Columns that may be nonzero: the supported columns and their ancestors,
  // in elimination-tree postorder. All other columns of value are zero.
  std::vector<int> columns;
  std::size_t nodes_visited = 0;
};

// hess_factor_apply restricted to the subtree spanned by `support`, the
// columns of Y holding nonzeros (any order). Throws InvalidArgument if Y has
// a nonzero in a column outside the support.
SparseFactorResult hess_factor_apply_sparse(const HessianContext& ctx,
                                            const SparseSymMatrix& y,
                                            const std::vector<int>& support);

// Columns of a with at least one nonzero.
std::vector<int> support_of(const SparseSymMatrix& a);

struct SparseArgument {
  SparseSymMatrix value;
  std::vector<int> support;
};

// H_ij = <R(A_i), R(A_j)>.
Eigen::MatrixXd gram_matrix(const HessianContext& ctx,
                            const std::vector<SparseArgument>& a);

}  // namespace logdet
