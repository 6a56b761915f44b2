#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "logdet/chordal.hpp"
#include "logdet/multifrontal.hpp"

namespace logdet {

using CliqueForestPtr = std::shared_ptr<const CliqueForest>;

// X = L D L^T with D block diagonal. For clique c, L has the identity on
// new(c) x new(c) and the dense block L_{anc(c) new(c)}; D_{new(c) new(c)} is
// kept through its lower Cholesky factor C_c, D = C_c C_c^T.
struct BlockCholeskyFactor {
  SymbolicPtr sym;
  CliqueForestPtr cf;
  std::vector<std::size_t> d_off, l_off;
  std::vector<double> dfac, lblk;

  Eigen::Map<const Eigen::MatrixXd> d_factor(int c) const {
    const int k = static_cast<int>(cf->new_set(c).size());
    return {dfac.data() + d_off[c], k, k};
  }
  Eigen::Map<const Eigen::MatrixXd> l_block(int c) const {
    return {lblk.data() + l_off[c], static_cast<Eigen::Index>(cf->anc(c).size()),
            static_cast<Eigen::Index>(cf->new_set(c).size())};
  }
  Eigen::MatrixXd d_block(int c) const {
    const auto f = d_factor(c);
    return f.triangularView<Eigen::Lower>() * f.transpose();
  }
};

// One frontal matrix per clique. Throws NotPositiveDefinite with the
// clique's representative vertex.
BlockCholeskyFactor sn_factor(const SparseSymMatrix& x, const SymbolicPtr& sym,
                              const CliqueForestPtr& cf,
                              SweepCounters* counters = nullptr);

SparseSymMatrix sn_projected_inverse(const BlockCholeskyFactor& f);

// Completion factors by refactoring V_c = S_{anc(c) anc(c)} at every clique,
// or, when `factored` is set, by propagating V_c = R_c R_c^T from the parent
// clique. Throws NoPositiveCompletion with the representative vertex, and
// NumericalBreakdown if a propagated factor cannot be formed.
BlockCholeskyFactor sn_completion(const SparseSymMatrix& s, const SymbolicPtr& sym,
                                  const CliqueForestPtr& cf, bool factored = false,
                                  SweepCounters* counters = nullptr);

// The equivalent scalar factor (unit lower L, diagonal D).
CholeskyFactor to_scalar(const BlockCholeskyFactor& f);

}  // namespace logdet
