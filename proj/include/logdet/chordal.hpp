#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logdet/symbolic.hpp"

namespace logdet {

// Child selection when a vertex can join the supernode of more than one child.
enum class PickRule {
  // Largest |I_j|, ties to the smallest vertex.
  MaxDegree,
  // First eligible child when scanning from the largest vertex down.
  FirstEligible,
};

// Supernode partition and clique tree of a filled pattern. Cliques are
// numbered 0..size()-1 in increasing order of their representative vertex.
// The index set of clique c is new(c) followed by anc(c); since every vertex
// of new(c) precedes every vertex of anc(c), that array is sorted.
class CliqueForest {
 public:
  int size() const { return static_cast<int>(rep_.size()); }
  int n() const { return static_cast<int>(snode_.size()); }

  int rep(int c) const { return rep_[c]; }
  const std::vector<int>& reps() const { return rep_; }
  // Clique whose new-set holds vertex v.
  int clique_of(int v) const { return snode_[v]; }

  std::span<const int> new_set(int c) const { return slice(c, 0, nnew_[c]); }
  std::span<const int> anc(int c) const {
    return slice(c, nnew_[c], ptr_[c + 1] - ptr_[c] - nnew_[c]);
  }
  std::span<const int> clique(int c) const { return slice(c, 0, ptr_[c + 1] - ptr_[c]); }
  int order(int c) const { return ptr_[c + 1] - ptr_[c]; }
  int max_order() const;

  // Parent clique, -1 for roots.
  int parent(int c) const { return parent_[c]; }
  // min anc(c), -1 when anc(c) is empty.
  int first_anc(int c) const { return first_anc_[c]; }
  std::span<const int> children(int c) const {
    return {child_list_.data() + child_ptr_[c],
            static_cast<std::size_t>(child_ptr_[c + 1] - child_ptr_[c])};
  }
  // Children before parents; DFS with children in increasing order.
  const std::vector<int>& postorder() const { return postorder_; }
  // Positions of anc(c) inside clique(parent(c)).
  std::span<const int> anc_map(int c) const {
    return {relpos_.data() + ptr_[c] + nnew_[c],
            static_cast<std::size_t>(ptr_[c + 1] - ptr_[c] - nnew_[c])};
  }

  // Assembles a forest from per-clique data. The input is not validated; see
  // verify_clique_tree.
  static CliqueForest build(int n, std::vector<int> reps,
                            std::vector<std::vector<int>> new_sets,
                            std::vector<std::vector<int>> anc_sets,
                            std::vector<int> parent);

 private:
  std::span<const int> slice(int c, int off, int len) const {
    return {index_.data() + ptr_[c] + off, static_cast<std::size_t>(len)};
  }

  std::vector<int> rep_, snode_;
  std::vector<int> ptr_{0}, nnew_, index_, relpos_;
  std::vector<int> parent_, first_anc_;
  std::vector<int> child_ptr_, child_list_;
  std::vector<int> postorder_;
};

// Vertices j with |I_j| > |I_k| - 1 for every child k, in increasing order.
std::vector<int> representative_vertices(const SymbolicAnalysis& sym);

CliqueForest clique_tree(const SymbolicAnalysis& sym,
                         PickRule pick = PickRule::MaxDegree);

// Every vertex its own supernode: new(j) = {j}, anc(j) = I_j, with the
// elimination tree as clique tree.
CliqueForest singleton_forest(const SymbolicAnalysis& sym);

// Brute-force check of the partition, the clique index sets, the parent
// containment anc(c) in clique(parent(c)), and the induced subtree property.
// Returns a description of the first violation, or nothing.
std::optional<std::string> verify_clique_tree(const CliqueForest& cf,
                                              const SymbolicAnalysis& sym);

// Ordering (position k holds vertex order[k]) that lists the supernodes
// contiguously in clique postorder. It is a topological ordering of the
// elimination tree, so refilling with it adds no fill.
std::vector<int> relabel_contiguous(const CliqueForest& cf);

}  // namespace logdet
