#pragma once

#include <memory>
#include <vector>

#include "logdet/oracle.hpp"
#include "logdet/pattern.hpp"
#include "logdet/symbolic.hpp"

namespace testing_util {

using namespace logdet;

inline PatternPtr share(SparsityPattern p) {
  return std::make_shared<const SparsityPattern>(std::move(p));
}

inline SymbolicPtr analyse(const SparsityPattern& p) {
  return etree_only(std::make_shared<const SparsityPattern>(p));
}

// Relative Frobenius distance between two dense matrices.
inline double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

// A mix of sparse, moderately dense and tree-like filled patterns.
inline SparsityPattern random_chordal(int n, std::uint64_t seed) {
  oracle::Rng rng(seed * 7919 + 1);
  const double density = rng.uniform(0.5, 4.0) / n;
  return oracle::gen_chordal(n, density, seed);
}

}  // namespace testing_util
