#pragma once

// Internal helpers shared by the frontal sweeps. Frontal and update matrices
// are stored as full square column-major blocks of which only the lower
// triangle is referenced.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "logdet/symbolic.hpp"

namespace logdet::detail {

using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
// Square block inside a larger column-major front.
using BlockMap = Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>>;
using ConstBlockMap = Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>;

// Trailing (m-1)-block of an m-by-m front.
inline BlockMap trailing(double* f, int m) {
  return BlockMap(f + 1 + m, m - 1, m - 1, Eigen::OuterStride<>(m));
}

// LIFO store of dense square blocks backed by one buffer. Blocks are
// addressed by offset so growth never leaves dangling views behind.
class FrontStack {
 public:
  explicit FrontStack(std::size_t reserve_doubles) : buf_(reserve_doubles) {}

  // Pushes an uninitialized m-by-m block (times `count` blocks laid out
  // contiguously) and returns a pointer to it.
  double* push(int m, int count = 1) {
    const std::size_t off = used_;
    used_ += static_cast<std::size_t>(m) * m * count;
    if (used_ > buf_.size()) buf_.resize(std::max(used_, 2 * buf_.size()));
    blocks_.push_back({off, m});
    return buf_.data() + off;
  }
  double* push_zero(int m, int count = 1) {
    double* p = push(m, count);
    std::fill(p, buf_.data() + used_, 0.0);
    return p;
  }
  double* top() { return buf_.data() + blocks_.back().offset; }
  int top_order() const { return blocks_.back().order; }
  void pop() {
    used_ = blocks_.back().offset;
    blocks_.pop_back();
  }
  bool empty() const { return blocks_.empty(); }
  std::size_t size_doubles() const { return used_; }

 private:
  struct Block {
    std::size_t offset;
    int order;
  };
  std::vector<double> buf_;
  std::size_t used_ = 0;
  std::vector<Block> blocks_;
};

// front(map[a], map[b]) += upd(a, b) for the lower triangle (map increasing).
inline void scatter_add_lower(double* front, int ldf, const double* upd, int ldu,
                              std::span<const int> map) {
  const int m = static_cast<int>(map.size());
  for (int b = 0; b < m; ++b) {
    double* fcol = front + static_cast<std::ptrdiff_t>(map[b]) * ldf;
    const double* ucol = upd + static_cast<std::ptrdiff_t>(b) * ldu;
    for (int a = b; a < m; ++a) fcol[map[a]] += ucol[a];
  }
}

// out(a, b) = big(map[a], map[b]) for the lower triangle.
inline void gather_lower(const double* big, int ldb, double* out, int ldo,
                         std::span<const int> map) {
  const int m = static_cast<int>(map.size());
  for (int b = 0; b < m; ++b) {
    const double* bcol = big + static_cast<std::ptrdiff_t>(map[b]) * ldb;
    double* ocol = out + static_cast<std::ptrdiff_t>(b) * ldo;
    for (int a = b; a < m; ++a) ocol[a] = bcol[map[a]];
  }
}

inline void zero_lower(double* a, int lda, int m) {
  for (int b = 0; b < m; ++b)
    std::fill(a + static_cast<std::ptrdiff_t>(b) * lda + b,
              a + static_cast<std::ptrdiff_t>(b) * lda + m, 0.0);
}

inline void copy_lower(const double* src, int lds, double* dst, int ldd, int m) {
  for (int b = 0; b < m; ++b)
    std::copy(src + static_cast<std::ptrdiff_t>(b) * lds + b,
              src + static_cast<std::ptrdiff_t>(b) * lds + m,
              dst + static_cast<std::ptrdiff_t>(b) * ldd + b);
}

// Children-first sweep over `nodes` (a postorder of an ancestor-closed set of
// vertices). For each j, body(j, F, m) receives the front of order m whose
// lower triangle holds the sum of the children's update matrices; after the
// call the trailing (m-1)-block of F is extend-added into the parent.
template <class Body>
void forward_sweep(const SymbolicAnalysis& sym, std::span<const int> nodes,
                   Body&& body) {
  const int mx = sym.max_front_order();
  std::vector<double> work(static_cast<std::size_t>(mx) * mx);
  std::vector<char> has_acc(sym.n(), 0);
  FrontStack stack(sym.forward_stack_peak());
  for (int j : nodes) {
    const int m = sym.front_order(j);
    double* f = work.data();
    if (has_acc[j]) {
      copy_lower(stack.top(), m, f, m, m);
      stack.pop();
    } else {
      zero_lower(f, m, m);
    }
    body(j, f, m);
    const int p = sym.parent(j);
    if (p < 0) continue;
    const int mp = sym.front_order(p);
    if (!has_acc[p]) {
      stack.push_zero(mp);
      has_acc[p] = 1;
    }
    scatter_add_lower(stack.top(), mp, f + 1 + m, m, sym.relmap(j));
  }
}

template <class Body>
void forward_sweep(const SymbolicAnalysis& sym, Body&& body) {
  forward_sweep(sym, std::span<const int>(sym.postorder()), body);
}

// Parent-first sweep keeping K fronts per vertex. gather(j, P, mp, W) reads
// the parent's fronts P (K blocks of order mp) into the workspace W; the
// parent's fronts are released afterwards if j was their last reader. Then
// body(j, W, P, m) computes column j and, when P is not null (j has
// children), writes the K fronts of j (order m each).
template <class Gather, class Body>
void reverse_sweep(const SymbolicAnalysis& sym, int K, Gather&& gather,
                   Body&& body) {
  const std::size_t mx = sym.max_front_order();
  std::vector<double> work(K * mx * mx);
  FrontStack stack(K * sym.reverse_stack_peak());
  const auto& post = sym.postorder();
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    const int j = *it, p = sym.parent(j), m = sym.front_order(j);
    if (p >= 0) {
      gather(j, static_cast<const double*>(stack.top()), sym.front_order(p),
             work.data());
      if (sym.children(p).front() == j) stack.pop();
    }
    double* front = sym.children(j).empty() ? nullptr : stack.push(m, K);
    body(j, work.data(), front, m);
  }
}

// gather for reverse sweeps whose fronts are symmetric (lower triangle):
// block k of W becomes the principal submatrix selected by relmap(j).
inline auto lower_gather(const SymbolicAnalysis& sym, int K) {
  return [&sym, K](int j, const double* pf, int mp, double* w) {
    const int mj = sym.degree(j);
    const std::size_t ps = static_cast<std::size_t>(mp) * mp;
    const std::size_t ws = static_cast<std::size_t>(mj) * mj;
    for (int k = 0; k < K; ++k)
      gather_lower(pf + k * ps, mp, w + k * ws, mj, sym.relmap(j));
  };
}

// Reverse sweep computing upper-triangular R_j with R_j R_j^T = S_{I_j I_j}
// by growing and re-triangularizing the parent factor. Calls
// visit(j, R_j, g) where g = R_j^{-1} S_{I_j j}; throws NumericalBreakdown
// via `fail(j)` when a factor cannot be grown.
void factor_sweep(const SymbolicAnalysis& sym, const std::vector<double>& s,
                  double threshold, std::size_t* reflections,
                  const std::function<void(int, ConstMatMap, ConstVecMap, double)>& visit,
                  const std::function<void(int)>& fail);

// Pattern match by identity or value.
void require_pattern(const SparsityPattern& a, const SymbolicAnalysis& sym,
                     const char* what);

}  // namespace logdet::detail
