#include "logdet/ordering.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <utility>

namespace logdet {

std::vector<int> order_heuristic(const SparsityPattern& raw) {
  const int n = raw.n();
  std::vector<std::vector<int>> adj(n);
  for (int j = 0; j < n; ++j)
    for (int i : raw.below(j)) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < n; ++v) queue.emplace(static_cast<int>(adj[v].size()), v);

  std::vector<int> order;
  order.reserve(n);
  std::vector<int> merged;
  while (!queue.empty()) {
    const int v = queue.begin()->second;
    queue.erase(queue.begin());
    order.push_back(v);
    const std::vector<int> nb = std::move(adj[v]);
    adj[v].clear();
    // The remaining neighbours of v become a clique.
    for (int u : nb) {
      queue.erase({static_cast<int>(adj[u].size()), u});
      merged.clear();
      std::set_union(adj[u].begin(), adj[u].end(), nb.begin(), nb.end(),
                     std::back_inserter(merged));
      merged.erase(std::remove_if(merged.begin(), merged.end(),
                                  [&](int w) { return w == u || w == v; }),
                   merged.end());
      adj[u].swap(merged);
      queue.emplace(static_cast<int>(adj[u].size()), u);
    }
  }
  return order;
}

}  // namespace logdet
