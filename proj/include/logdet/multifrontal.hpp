#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "logdet/pattern.hpp"
#include "logdet/symbolic.hpp"

namespace logdet {

// X = L D L^T with L unit lower triangular on the filled pattern and D
// diagonal. Stored in the pattern layout: the diagonal slot of column j holds
// D_jj and the remaining slots hold L_{I_j j}.
struct CholeskyFactor {
  SymbolicPtr sym;
  std::vector<double> values;

  double d(int j) const { return values[sym->pattern().col_begin(j)]; }
  std::span<const double> l(int j) const {
    const auto& p = sym->pattern();
    return {values.data() + p.col_begin(j) + 1,
            static_cast<std::size_t>(p.col_end(j) - p.col_begin(j) - 1)};
  }
};

// Work counters reported by the sweeps.
struct SweepCounters {
  std::size_t frontal_assemblies = 0;
  std::size_t reflections = 0;
};

CholeskyFactor factor(const SparseSymMatrix& x, const SymbolicPtr& sym,
                      SweepCounters* counters = nullptr);

// L D L^T on the pattern.
SparseSymMatrix product(const CholeskyFactor& f);

// P(X^{-1}) from the factors of X; the negative gradient of -log det X.
SparseSymMatrix projected_inverse(const CholeskyFactor& f);

// Factors of the X in S^n_V with P(X^{-1}) = S, i.e. the inverse of the
// maximum-determinant positive definite completion of S. Solves a dense
// system with V_j = S_{I_j I_j} for every column.
CholeskyFactor completion(const SparseSymMatrix& s, const SymbolicPtr& sym,
                          SweepCounters* counters = nullptr);

// Same result as completion, propagating triangular factors V_j = R_j R_j^T
// down the tree instead of refactoring each V_j.
CholeskyFactor completion_factored(const SparseSymMatrix& s,
                                   const SymbolicPtr& sym,
                                   SweepCounters* counters = nullptr);

// log det X = sum_j log D_jj.
double logdet(const CholeskyFactor& f);

// f(X) = -log det X.
double barrier_value(const SparseSymMatrix& x, const SymbolicPtr& sym);

// f*(S) = log det X - n with X the completion factor of S.
double dual_barrier_value(const SparseSymMatrix& s, const SymbolicPtr& sym);

}  // namespace logdet
