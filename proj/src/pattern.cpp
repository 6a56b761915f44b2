#include "logdet/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logdet/errors.hpp"

namespace logdet {

SparsityPattern::SparsityPattern(int n, std::vector<int> colptr,
                                 std::vector<int> rowind)
    : n_(n), colptr_(std::move(colptr)), rowind_(std::move(rowind)) {
  validate();
}

void SparsityPattern::validate() const {
  if (n_ < 0) throw InvalidArgument("negative matrix order");
  if (colptr_.size() != static_cast<std::size_t>(n_) + 1 || colptr_[0] != 0 ||
      colptr_.back() != static_cast<int>(rowind_.size()))
    throw InvalidArgument("malformed column pointer array");
  for (int j = 0; j < n_; ++j) {
    const int b = colptr_[j], e = colptr_[j + 1];
    if (e <= b || rowind_[b] != j)
      throw InvalidArgument("missing diagonal entry in column " +
                            std::to_string(j + 1));
    for (int p = b + 1; p < e; ++p) {
      if (rowind_[p] <= rowind_[p - 1])
        throw InvalidArgument("unsorted or duplicate row index in column " +
                              std::to_string(j + 1));
      if (rowind_[p] >= n_)
        throw InvalidArgument("row index out of range in column " +
                              std::to_string(j + 1));
    }
  }
}

SparsityPattern SparsityPattern::from_columns(
    int n, const std::vector<std::vector<int>>& rows) {
  if (static_cast<int>(rows.size()) != n)
    throw InvalidArgument("column list size does not match matrix order");
  std::vector<int> colptr(n + 1, 0), rowind;
  for (int j = 0; j < n; ++j) {
    std::vector<int> col(rows[j]);
    std::sort(col.begin(), col.end());
    if (std::adjacent_find(col.begin(), col.end()) != col.end())
      throw InvalidArgument("duplicate entry in column " + std::to_string(j + 1));
    if (!col.empty() && col.front() < j)
      throw InvalidArgument("entry above the diagonal in column " +
                            std::to_string(j + 1));
    if (col.empty() || col.front() != j) rowind.push_back(j);
    rowind.insert(rowind.end(), col.begin(), col.end());
    colptr[j + 1] = static_cast<int>(rowind.size());
  }
  return SparsityPattern(n, std::move(colptr), std::move(rowind));
}

SparsityPattern SparsityPattern::diagonal(int n) {
  std::vector<int> colptr(n + 1), rowind(n);
  for (int j = 0; j <= n; ++j) colptr[j] = j;
  for (int j = 0; j < n; ++j) rowind[j] = j;
  return SparsityPattern(n, std::move(colptr), std::move(rowind));
}

SparsityPattern SparsityPattern::dense(int n) {
  std::vector<int> colptr(n + 1, 0), rowind;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) rowind.push_back(i);
    colptr[j + 1] = static_cast<int>(rowind.size());
  }
  return SparsityPattern(n, std::move(colptr), std::move(rowind));
}

std::ptrdiff_t SparsityPattern::find(int i, int j) const {
  if (i < j) std::swap(i, j);
  if (j < 0 || i >= n_) return -1;
  auto first = rowind_.begin() + colptr_[j];
  auto last = rowind_.begin() + colptr_[j + 1];
  auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return -1;
  return it - rowind_.begin();
}

SparseSymMatrix::SparseSymMatrix(PatternPtr pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

SparseSymMatrix::SparseSymMatrix(PatternPtr pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
  if (values_.size() != pattern_->nnz())
    throw InvalidArgument("value array length does not match pattern");
}

SparseSymMatrix SparseSymMatrix::identity(PatternPtr pattern) {
  SparseSymMatrix a(std::move(pattern));
  for (int j = 0; j < a.n(); ++j) a.values_[a.pattern_->col_begin(j)] = 1.0;
  return a;
}

double SparseSymMatrix::operator()(int i, int j) const {
  const auto p = pattern_->find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

double& SparseSymMatrix::ref(int i, int j) {
  const auto p = pattern_->find(i, j);
  if (p < 0)
    throw InvalidArgument("position (" + std::to_string(i + 1) + "," +
                          std::to_string(j + 1) + ") outside the pattern");
  return values_[p];
}

namespace {

void require_same_pattern(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  if (a.pattern_ptr() != b.pattern_ptr() && a.pattern() != b.pattern())
    throw InvalidArgument("operands have different sparsity patterns");
}

}  // namespace

double inner(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  require_same_pattern(a, b);
  const auto& pat = a.pattern();
  double diag = 0.0, off = 0.0;
  for (int j = 0; j < pat.n(); ++j) {
    const int p0 = pat.col_begin(j);
    diag += a.values()[p0] * b.values()[p0];
    for (int p = p0 + 1; p < pat.col_end(j); ++p)
      off += a.values()[p] * b.values()[p];
  }
  return diag + 2.0 * off;
}

double norm(const SparseSymMatrix& a) { return std::sqrt(inner(a, a)); }

double relative_difference(const SparseSymMatrix& a, const SparseSymMatrix& b) {
  require_same_pattern(a, b);
  const auto d = axpy(a, -1.0, b);
  return norm(d) / std::max(norm(b), 1e-300);
}

SparseSymMatrix axpy(const SparseSymMatrix& a, double alpha,
                     const SparseSymMatrix& b) {
  require_same_pattern(a, b);
  std::vector<double> v(a.values());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += alpha * b.values()[k];
  return SparseSymMatrix(a.pattern_ptr(), std::move(v));
}

}  // namespace logdet
