#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace logdet {

// Lower-triangular positions of a symmetric sparsity pattern, stored by
// columns. Row indices are 0-based, strictly increasing within a column, and
// the diagonal entry is always the first entry of its column.
class SparsityPattern {
 public:
  SparsityPattern() = default;

  // Takes ownership of compressed-column arrays and validates them.
  SparsityPattern(int n, std::vector<int> colptr, std::vector<int> rowind);

  // Builds a pattern from per-column row lists (any order, diagonal optional;
  // duplicates and entries above the diagonal are rejected).
  static SparsityPattern from_columns(int n,
                                      const std::vector<std::vector<int>>& rows);

  static SparsityPattern diagonal(int n);
  static SparsityPattern dense(int n);

  int n() const { return n_; }
  std::size_t nnz() const { return rowind_.size(); }

  // Row indices of column j, starting with j itself.
  std::span<const int> column(int j) const {
    return {rowind_.data() + colptr_[j],
            static_cast<std::size_t>(colptr_[j + 1] - colptr_[j])};
  }
  // Row indices strictly below the diagonal of column j.
  std::span<const int> below(int j) const { return column(j).subspan(1); }

  int col_begin(int j) const { return colptr_[j]; }
  int col_end(int j) const { return colptr_[j + 1]; }
  const std::vector<int>& colptr() const { return colptr_; }
  const std::vector<int>& rowind() const { return rowind_; }

  // Storage index of (i, j), i >= j, or -1 when not in the pattern.
  std::ptrdiff_t find(int i, int j) const;
  bool contains(int i, int j) const { return find(i, j) >= 0; }

  friend bool operator==(const SparsityPattern&, const SparsityPattern&) =
      default;

 private:
  void validate() const;

  int n_ = 0;
  std::vector<int> colptr_{0};
  std::vector<int> rowind_;
};

using PatternPtr = std::shared_ptr<const SparsityPattern>;

// A symmetric matrix with sparsity pattern V: one value per stored
// lower-triangular position.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(PatternPtr pattern);
  SparseSymMatrix(PatternPtr pattern, std::vector<double> values);

  static SparseSymMatrix identity(PatternPtr pattern);

  const SparsityPattern& pattern() const { return *pattern_; }
  const PatternPtr& pattern_ptr() const { return pattern_; }
  int n() const { return pattern_->n(); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::span<double> column(int j) {
    return {values_.data() + pattern_->col_begin(j),
            static_cast<std::size_t>(pattern_->col_end(j) -
                                     pattern_->col_begin(j))};
  }
  std::span<const double> column(int j) const {
    return {values_.data() + pattern_->col_begin(j),
            static_cast<std::size_t>(pattern_->col_end(j) -
                                     pattern_->col_begin(j))};
  }
  double diag(int j) const { return values_[pattern_->col_begin(j)]; }

  // Symmetric access; zero outside the pattern.
  double operator()(int i, int j) const;
  // Reference to a stored entry; throws when (i, j) is outside the pattern.
  double& ref(int i, int j);

 private:
  PatternPtr pattern_;
  std::vector<double> values_;
};

// Trace inner product tr(AB) computed from lower-triangular storage.
double inner(const SparseSymMatrix& a, const SparseSymMatrix& b);
// Frobenius norm of the full symmetric matrix.
double norm(const SparseSymMatrix& a);
// ||a - b||_F / max(||b||_F, tiny).
double relative_difference(const SparseSymMatrix& a, const SparseSymMatrix& b);

// a + alpha * b on a shared pattern.
SparseSymMatrix axpy(const SparseSymMatrix& a, double alpha,
                     const SparseSymMatrix& b);

}  // namespace logdet
