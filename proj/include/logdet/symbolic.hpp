#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "logdet/pattern.hpp"

namespace logdet {

// Elimination tree and column structure of a filled pattern, plus the
// precomputed index maps used by every frontal sweep. Immutable once built.
//
// For vertex j, I_j is pattern().below(j) and I'_j = pattern().column(j).
// relmap(i) lists the positions of I_i inside I'_{parent(i)}; position 0 of
// I'_p is p itself.
class SymbolicAnalysis {
 public:
  int n() const { return pattern_->n(); }
  const SparsityPattern& pattern() const { return *pattern_; }
  const PatternPtr& pattern_ptr() const { return pattern_; }

  // Permutation applied to the raw pattern: position k holds original vertex
  // order()[k].
  const std::vector<int>& order() const { return order_; }

  int parent(int j) const { return parent_[j]; }
  const std::vector<int>& parents() const { return parent_; }
  std::span<const int> children(int j) const {
    return {child_list_.data() + child_ptr_[j],
            static_cast<std::size_t>(child_ptr_[j + 1] - child_ptr_[j])};
  }
  const std::vector<int>& roots() const { return roots_; }

  // Children before parents; DFS with children in increasing order.
  const std::vector<int>& postorder() const { return postorder_; }

  int degree(int j) const { return pattern_->col_end(j) - pattern_->col_begin(j) - 1; }
  int front_order(int j) const { return degree(j) + 1; }
  int max_front_order() const { return max_front_; }

  std::span<const int> relmap(int i) const {
    const int b = pattern_->col_begin(i) + 1, e = pattern_->col_end(i);
    return {relidx_.data() + b, static_cast<std::size_t>(e - b)};
  }

  // Peak number of doubles held by the frontal stacks in the forward
  // (children-first) and reverse (parent-first) sweeps.
  std::size_t forward_stack_peak() const { return forward_peak_; }
  std::size_t reverse_stack_peak() const { return reverse_peak_; }

  // Builds the analysis of an already filled pattern with the given parents.
  static std::shared_ptr<const SymbolicAnalysis> build(
      PatternPtr filled, std::vector<int> parent, std::vector<int> order);

 private:
  SymbolicAnalysis() = default;

  PatternPtr pattern_;
  std::vector<int> order_;
  std::vector<int> parent_;
  std::vector<int> child_ptr_;
  std::vector<int> child_list_;
  std::vector<int> roots_;
  std::vector<int> postorder_;
  std::vector<int> relidx_;
  int max_front_ = 0;
  std::size_t forward_peak_ = 0;
  std::size_t reverse_peak_ = 0;
};

using SymbolicPtr = std::shared_ptr<const SymbolicAnalysis>;

// Symbolic factorization of the pattern P raw P^T, where P maps original
// vertex order[k] to position k.
SymbolicPtr fill_pattern(const SparsityPattern& raw, std::span<const int> order);
SymbolicPtr fill_pattern(const SparsityPattern& raw);

// Analysis of a pattern that must already be filled; throws NotChordal with a
// violating triple otherwise.
SymbolicPtr etree_only(PatternPtr filled);
SymbolicPtr etree_only(const SparsityPattern& filled);

std::vector<int> monotone_degrees(const SymbolicAnalysis& sym);

// Moves a matrix given on the raw pattern onto the filled, permuted pattern of
// `sym`; fill positions receive explicit zeros.
SparseSymMatrix embed(const SparseSymMatrix& raw, const SymbolicAnalysis& sym);

// front += E U E^T where map[a] is the row of front receiving row a of U.
void extend_add(Eigen::Ref<Eigen::MatrixXd> front,
                const Eigen::Ref<const Eigen::MatrixXd>& update,
                std::span<const int> map);

// E^T big E: the principal submatrix of `big` selected by map.
Eigen::MatrixXd extract(const Eigen::Ref<const Eigen::MatrixXd>& big,
                        std::span<const int> map);

}  // namespace logdet
