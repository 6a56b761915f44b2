#include "logdet/symbolic.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "logdet/errors.hpp"

namespace logdet {

SymbolicPtr SymbolicAnalysis::build(PatternPtr filled, std::vector<int> parent,
                                    std::vector<int> order) {
  auto* sym = new SymbolicAnalysis();
  SymbolicPtr result(sym);
  const int n = filled->n();
  sym->pattern_ = std::move(filled);
  sym->parent_ = std::move(parent);
  sym->order_ = std::move(order);
  const auto& pat = *sym->pattern_;

  sym->child_ptr_.assign(n + 1, 0);
  for (int j = 0; j < n; ++j)
    if (sym->parent_[j] >= 0) ++sym->child_ptr_[sym->parent_[j] + 1];
  std::partial_sum(sym->child_ptr_.begin(), sym->child_ptr_.end(),
                   sym->child_ptr_.begin());
  sym->child_list_.resize(sym->child_ptr_[n]);
  {
    std::vector<int> next(sym->child_ptr_.begin(), sym->child_ptr_.end() - 1);
    for (int j = 0; j < n; ++j) {
      if (sym->parent_[j] >= 0)
        sym->child_list_[next[sym->parent_[j]]++] = j;
      else
        sym->roots_.push_back(j);
    }
  }

  // Postorder: children visited in increasing vertex order.
  sym->postorder_.reserve(n);
  std::vector<std::pair<int, int>> dfs;
  for (int r : sym->roots_) {
    dfs.emplace_back(r, 0);
    while (!dfs.empty()) {
      auto& [v, next] = dfs.back();
      const auto ch = sym->children(v);
      if (next < static_cast<int>(ch.size())) {
        const int c = ch[next++];
        dfs.emplace_back(c, 0);
      } else {
        sym->postorder_.push_back(v);
        dfs.pop_back();
      }
    }
  }

  sym->relidx_.assign(pat.nnz(), -1);
  for (int i = 0; i < n; ++i) {
    sym->max_front_ = std::max(sym->max_front_, sym->front_order(i));
    const int p = sym->parent_[i];
    if (p < 0) continue;
    const auto col = pat.column(p);
    int pos = 0;
    for (int q = pat.col_begin(i) + 1; q < pat.col_end(i); ++q) {
      const int r = pat.rowind()[q];
      while (pos < static_cast<int>(col.size()) && col[pos] < r) ++pos;
      if (pos == static_cast<int>(col.size()) || col[pos] != r)
        throw InvalidArgument("column structure is not nested in its parent");
      sym->relidx_[q] = pos;
    }
  }

  // Forward sweeps keep one partially assembled front per vertex that has a
  // finished child; reverse sweeps keep the front of every vertex whose
  // children are not all processed.
  auto sq = [&](int v) {
    const std::size_t m = sym->front_order(v);
    return m * m;
  };
  {
    std::vector<char> live(n, 0);
    std::size_t cur = 0, peak = 0;
    for (int j : sym->postorder_) {
      if (live[j]) cur -= sq(j);
      const int p = sym->parent_[j];
      if (p >= 0 && !live[p]) {
        live[p] = 1;
        cur += sq(p);
        peak = std::max(peak, cur);
      }
    }
    sym->forward_peak_ = peak;
  }
  {
    std::vector<int> remaining(n);
    for (int j = 0; j < n; ++j) remaining[j] = static_cast<int>(sym->children(j).size());
    std::size_t cur = 0, peak = 0;
    for (auto it = sym->postorder_.rbegin(); it != sym->postorder_.rend(); ++it) {
      const int j = *it, p = sym->parent_[j];
      if (p >= 0 && --remaining[p] == 0) cur -= sq(p);
      if (remaining[j] > 0) {
        cur += sq(j);
        peak = std::max(peak, cur);
      }
    }
    sym->reverse_peak_ = peak;
  }
  return result;
}

SymbolicPtr fill_pattern(const SparsityPattern& raw, std::span<const int> order) {
  const int n = raw.n();
  if (static_cast<int>(order.size()) != n)
    throw InvalidArgument("ordering has wrong length");
  std::vector<int> pos(n, -1);
  for (int k = 0; k < n; ++k) {
    const int v = order[k];
    if (v < 0 || v >= n || pos[v] >= 0)
      throw InvalidArgument("ordering is not a permutation");
    pos[v] = k;
  }

  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j) {
    for (int i : raw.below(j)) {
      const int a = pos[i], b = pos[j];
      adj[std::min(a, b)].push_back(std::max(a, b));
    }
  }

  // Column j of L is the union of column j of A and the structures of its
  // elimination-tree children with j removed.
  std::vector<int> parent(n, -1), mark(n, -1);
  std::vector<std::vector<int>> kids(n);
  std::vector<int> colptr(n + 1, 0), rowind;
  std::vector<std::vector<int>> cols(n);
  for (int j = 0; j < n; ++j) {
    auto& s = cols[j];
    mark[j] = j;
    for (int i : adj[j])
      if (mark[i] != j) {
        mark[i] = j;
        s.push_back(i);
      }
    for (int c : kids[j])
      for (int i : cols[c])
        if (mark[i] != j) {
          mark[i] = j;
          s.push_back(i);
        }
    std::sort(s.begin(), s.end());
    if (!s.empty()) {
      parent[j] = s.front();
      kids[s.front()].push_back(j);
    }
  }
  for (int j = 0; j < n; ++j) {
    rowind.push_back(j);
    rowind.insert(rowind.end(), cols[j].begin(), cols[j].end());
    colptr[j + 1] = static_cast<int>(rowind.size());
  }
  auto filled = std::make_shared<const SparsityPattern>(n, std::move(colptr),
                                                        std::move(rowind));
  return SymbolicAnalysis::build(std::move(filled), std::move(parent),
                                 std::vector<int>(order.begin(), order.end()));
}

SymbolicPtr fill_pattern(const SparsityPattern& raw) {
  std::vector<int> id(raw.n());
  std::iota(id.begin(), id.end(), 0);
  return fill_pattern(raw, id);
}

SymbolicPtr etree_only(PatternPtr filled) {
  const auto& pat = *filled;
  const int n = pat.n();
  std::vector<int> parent(n, -1);
  for (int k = 0; k < n; ++k) {
    const auto below = pat.below(k);
    if (below.empty()) continue;
    const int p = below.front();
    parent[k] = p;
    // I_k \ {p} must be contained in I_p.
    const auto ip = pat.below(p);
    std::size_t q = 0;
    for (std::size_t a = 1; a < below.size(); ++a) {
      while (q < ip.size() && ip[q] < below[a]) ++q;
      if (q == ip.size() || ip[q] != below[a]) throw NotChordal(below[a], p, k);
    }
  }
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  return SymbolicAnalysis::build(std::move(filled), std::move(parent), std::move(id));
}

SymbolicPtr etree_only(const SparsityPattern& filled) {
  return etree_only(std::make_shared<const SparsityPattern>(filled));
}

std::vector<int> monotone_degrees(const SymbolicAnalysis& sym) {
  std::vector<int> d(sym.n());
  for (int j = 0; j < sym.n(); ++j) d[j] = sym.degree(j);
  return d;
}

SparseSymMatrix embed(const SparseSymMatrix& raw, const SymbolicAnalysis& sym) {
  const int n = sym.n();
  if (raw.n() != n) throw InvalidArgument("matrix order does not match analysis");
  std::vector<int> pos(n);
  for (int k = 0; k < n; ++k) pos[sym.order()[k]] = k;
  SparseSymMatrix out(sym.pattern_ptr());
  const auto& rp = raw.pattern();
  for (int j = 0; j < n; ++j)
    for (int q = rp.col_begin(j); q < rp.col_end(j); ++q)
      out.ref(pos[rp.rowind()[q]], pos[j]) = raw.values()[q];
  return out;
}

void extend_add(Eigen::Ref<Eigen::MatrixXd> front,
                const Eigen::Ref<const Eigen::MatrixXd>& update,
                std::span<const int> map) {
  const auto m = static_cast<Eigen::Index>(map.size());
  if (update.rows() != m || update.cols() != m)
    throw InvalidArgument("update matrix order does not match index map");
  for (int a : map)
    if (a < 0 || a >= front.rows() || a >= front.cols())
      throw InvalidArgument("index map entry outside the frontal matrix");
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a) front(map[a], map[b]) += update(a, b);
}

Eigen::MatrixXd extract(const Eigen::Ref<const Eigen::MatrixXd>& big,
                        std::span<const int> map) {
  const auto m = static_cast<Eigen::Index>(map.size());
  for (int a : map)
    if (a < 0 || a >= big.rows() || a >= big.cols())
      throw InvalidArgument("index map entry outside the frontal matrix");
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a) out(a, b) = big(map[a], map[b]);
  return out;
}

}  // namespace logdet
