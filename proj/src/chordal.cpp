#include "logdet/chordal.hpp"

#include <algorithm>
#include <numeric>

namespace logdet {

namespace {

std::string one_based(int v) { return std::to_string(v + 1); }

}  // namespace

int CliqueForest::max_order() const {
  int m = 0;
  for (int c = 0; c < size(); ++c) m = std::max(m, order(c));
  return m;
}

CliqueForest CliqueForest::build(int n, std::vector<int> reps,
                                 std::vector<std::vector<int>> new_sets,
                                 std::vector<std::vector<int>> anc_sets,
                                 std::vector<int> parent) {
  CliqueForest cf;
  const int l = static_cast<int>(reps.size());
  cf.rep_ = std::move(reps);
  cf.parent_ = std::move(parent);
  cf.snode_.assign(n, -1);
  cf.first_anc_.assign(l, -1);
  for (int c = 0; c < l; ++c) {
    for (int v : new_sets[c])
      if (v >= 0 && v < n) cf.snode_[v] = c;
    cf.nnew_.push_back(static_cast<int>(new_sets[c].size()));
    cf.index_.insert(cf.index_.end(), new_sets[c].begin(), new_sets[c].end());
    cf.index_.insert(cf.index_.end(), anc_sets[c].begin(), anc_sets[c].end());
    cf.ptr_.push_back(static_cast<int>(cf.index_.size()));
    if (!anc_sets[c].empty()) cf.first_anc_[c] = anc_sets[c].front();
  }

  cf.relpos_.assign(cf.index_.size(), -1);
  for (int c = 0; c < l; ++c) {
    const int p = cf.parent_[c];
    if (p < 0 || p >= l) continue;
    const auto a = cf.anc(c);
    const auto pc = cf.clique(p);
    for (std::size_t t = 0; t < a.size(); ++t) {
      const auto it = std::lower_bound(pc.begin(), pc.end(), a[t]);
      if (it != pc.end() && *it == a[t])
        cf.relpos_[cf.ptr_[c] + cf.nnew_[c] + t] = static_cast<int>(it - pc.begin());
    }
  }

  cf.child_ptr_.assign(l + 1, 0);
  std::vector<int> roots;
  for (int c = 0; c < l; ++c) {
    const int p = cf.parent_[c];
    if (p >= 0 && p < l)
      ++cf.child_ptr_[p + 1];
    else
      roots.push_back(c);
  }
  std::partial_sum(cf.child_ptr_.begin(), cf.child_ptr_.end(), cf.child_ptr_.begin());
  cf.child_list_.resize(cf.child_ptr_[l]);
  std::vector<int> next(cf.child_ptr_.begin(), cf.child_ptr_.end() - 1);
  for (int c = 0; c < l; ++c) {
    const int p = cf.parent_[c];
    if (p >= 0 && p < l) cf.child_list_[next[p]++] = c;
  }

  std::vector<std::pair<int, int>> dfs;
  for (int r : roots) {
    dfs.emplace_back(r, 0);
    while (!dfs.empty()) {
      auto& [c, k] = dfs.back();
      const auto ch = cf.children(c);
      if (k < static_cast<int>(ch.size())) {
        dfs.emplace_back(ch[k++], 0);
      } else {
        cf.postorder_.push_back(c);
        dfs.pop_back();
      }
    }
  }
  return cf;
}

std::vector<int> representative_vertices(const SymbolicAnalysis& sym) {
  std::vector<int> reps;
  for (int j = 0; j < sym.n(); ++j) {
    bool rep = true;
    for (int k : sym.children(j))
      if (!(sym.degree(j) > sym.degree(k) - 1)) rep = false;
    if (rep) reps.push_back(j);
  }
  return reps;
}

CliqueForest clique_tree(const SymbolicAnalysis& sym, PickRule pick) {
  const int n = sym.n();
  std::vector<int> owner(n, -1), pa(n, -1);
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) {
    const auto ch = sym.children(i);
    int chosen = -1;
    auto consider = [&](int j) {
      if (sym.degree(i) != sym.degree(j) - 1) return;
      if (chosen < 0) {
        chosen = j;
      } else if (pick == PickRule::MaxDegree) {
        if (sym.degree(j) > sym.degree(chosen) ||
            (sym.degree(j) == sym.degree(chosen) && j < chosen))
          chosen = j;
      }
    };
    if (pick == PickRule::FirstEligible) {
      for (auto it = ch.rbegin(); it != ch.rend() && chosen < 0; ++it) consider(*it);
    } else {
      for (int j : ch) consider(j);
    }
    const int k = chosen < 0 ? i : owner[chosen];
    owner[i] = k;
    members[k].push_back(i);
    for (int j : ch)
      if (owner[j] != k) pa[owner[j]] = k;
  }

  std::vector<int> reps, id(n, -1);
  for (int v = 0; v < n; ++v)
    if (owner[v] == v) {
      id[v] = static_cast<int>(reps.size());
      reps.push_back(v);
    }
  const int l = static_cast<int>(reps.size());
  std::vector<std::vector<int>> news(l), ancs(l);
  std::vector<int> parent(l, -1);
  for (int c = 0; c < l; ++c) {
    const int r = reps[c];
    news[c] = members[r];
    for (int v : sym.pattern().column(r))
      if (!std::binary_search(news[c].begin(), news[c].end(), v)) ancs[c].push_back(v);
    if (pa[r] >= 0) parent[c] = id[pa[r]];
  }
  return CliqueForest::build(n, std::move(reps), std::move(news), std::move(ancs),
                             std::move(parent));
}

CliqueForest singleton_forest(const SymbolicAnalysis& sym) {
  const int n = sym.n();
  std::vector<int> reps(n);
  std::iota(reps.begin(), reps.end(), 0);
  std::vector<std::vector<int>> news(n), ancs(n);
  for (int j = 0; j < n; ++j) {
    news[j] = {j};
    const auto b = sym.pattern().below(j);
    ancs[j].assign(b.begin(), b.end());
  }
  return CliqueForest::build(n, std::move(reps), std::move(news), std::move(ancs),
                             sym.parents());
}

std::optional<std::string> verify_clique_tree(const CliqueForest& cf,
                                              const SymbolicAnalysis& sym) {
  const int n = sym.n(), l = cf.size();
  if (cf.n() != n) return "forest and analysis have different orders";
  auto name = [&](int c) { return "clique " + one_based(cf.rep(c)); };

  std::vector<int> seen(n, 0);
  for (int c = 0; c < l; ++c)
    for (int v : cf.new_set(c)) {
      if (v < 0 || v >= n) return "vertex out of range in new-set of " + name(c);
      if (seen[v]++) return "vertex " + one_based(v) + " is in two new-sets";
    }
  for (int v = 0; v < n; ++v)
    if (!seen[v]) return "vertex " + one_based(v) + " is in no new-set";

  for (int c = 0; c < l; ++c) {
    const auto nw = cf.new_set(c), an = cf.anc(c), cl = cf.clique(c);
    if (nw.empty() || nw.front() != cf.rep(c))
      return name(c) + ": new-set does not start at the representative";
    if (!std::is_sorted(nw.begin(), nw.end()) || !std::is_sorted(an.begin(), an.end()))
      return name(c) + ": unsorted index set";
    if (!an.empty() && nw.back() >= an.front())
      return name(c) + ": new-set and ancestor set are not ordered";
    const auto col = sym.pattern().column(cf.rep(c));
    if (!std::equal(cl.begin(), cl.end(), col.begin(), col.end()))
      return name(c) + ": new-set and ancestor set do not form the column structure";
    const int p = cf.parent(c);
    if (an.empty()) {
      if (p >= 0) return name(c) + ": empty ancestor set but has a parent";
      continue;
    }
    if (p < 0 || p >= l) return name(c) + ": nonempty ancestor set but no parent";
    if (cf.first_anc(c) != an.front()) return name(c) + ": wrong first ancestor";
    if (cf.clique_of(an.front()) != p)
      return name(c) + ": first ancestor is not in the new-set of the parent";
    const auto pc = cf.clique(p);
    for (int v : an)
      if (!std::binary_search(pc.begin(), pc.end(), v))
        return "anc(" + one_based(cf.rep(c)) + ") is not contained in " + name(p) +
               " (vertex " + one_based(v) + ")";
  }
  if (static_cast<int>(cf.postorder().size()) != l) return "clique parent links contain a cycle";

  // Induced subtree: the cliques holding v are connected and rooted at the
  // clique whose new-set holds v.
  std::vector<int> count(n, 0), edges(n, 0);
  for (int c = 0; c < l; ++c) {
    const int p = cf.parent(c);
    for (int v : cf.clique(c)) {
      ++count[v];
      const bool in_parent =
          p >= 0 && std::binary_search(cf.clique(p).begin(), cf.clique(p).end(), v);
      if (in_parent)
        ++edges[v];
      else if (cf.clique_of(v) != c)
        return "vertex " + one_based(v) + ": subtree of cliques is not rooted at its new-set";
    }
  }
  for (int v = 0; v < n; ++v)
    if (edges[v] != count[v] - 1)
      return "vertex " + one_based(v) + ": cliques containing it are not connected";
  return std::nullopt;
}

std::vector<int> relabel_contiguous(const CliqueForest& cf) {
  std::vector<int> order;
  order.reserve(cf.n());
  for (int c : cf.postorder())
    for (int v : cf.new_set(c)) order.push_back(v);
  return order;
}

}  // namespace logdet
