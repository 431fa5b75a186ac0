#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ultragap/metric.hpp"

namespace ultragap {

/// Sorted list of point indices.
using Block = std::vector<std::size_t>;
/// Blocks sorted by their smallest element.
using Partition = std::vector<Block>;

/// Proximity dendrogram: heights 0 = a_0 < a_1 < ... < a_l and one partition
/// per height, running from all singletons to the single block X, each a
/// proper refinement of the next.
template <class T>
class Dendrogram {
 public:
  /// Validates and canonicalizes. When `heights` does not start at 0, a
  /// height-0 level of singletons is prepended. Throws StructuralError.
  static Dendrogram make(std::vector<std::string> labels, std::vector<T> heights,
                         std::vector<Partition> partitions);

  std::size_t size() const noexcept { return labels_.size(); }
  /// Number of non-zero heights, l.
  std::size_t levels() const noexcept { return heights_.size() - 1; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<T>& heights() const noexcept { return heights_; }
  const std::vector<Partition>& partitions() const noexcept { return partitions_; }

  friend bool operator==(const Dendrogram& a, const Dendrogram& b) {
    return a.labels_ == b.labels_ && a.heights_ == b.heights_ && a.partitions_ == b.partitions_;
  }

 private:
  Dendrogram() = default;

  std::vector<std::string> labels_;
  std::vector<T> heights_;
  std::vector<Partition> partitions_;
};

/// Threshold-graph construction: heights are 0 and the sorted distinct
/// distances, and the partition at a_k is the set of connected components of
/// {(i,j) : d(i,j) <= a_k}. Refuses non-ultrametric input.
template <class T>
Dendrogram<T> build_dendrogram(const FiniteMetric<T>& m);

/// d(x,y) = smallest height at which x and y share a block.
template <class T>
FiniteMetric<T> dendrogram_to_metric(const Dendrogram<T>& d);

struct TreeNode {
  Block members;
  std::size_t level = 0;
  /// Left-adjacent nodes Adj(v), i.e. the blocks of the previous partition inside v.
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
};

/// Rooted tree generated by a dendrogram.
///
/// Nodes are ordered by level, then by smallest member, so node i is the leaf
/// {i} for i < n and the last node is the root X. Children always precede
/// their parent, which makes a forward sweep a valid bottom-up traversal.
template <class T>
class DendroTree {
 public:
  explicit DendroTree(const Dendrogram<T>& d);

  std::size_t points() const noexcept { return points_; }
  std::size_t levels() const noexcept { return heights_.size() - 1; }
  const std::vector<T>& heights() const noexcept { return heights_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t root() const noexcept { return nodes_.size() - 1; }
  std::size_t leaf(std::size_t point) const { return point; }
  /// Left-degree b(v).
  std::size_t left_degree(std::size_t id) const { return nodes_.at(id).children.size(); }
  /// Node ids of the level-k nodes.
  std::vector<std::size_t> level_nodes(std::size_t k) const;
  /// Level-1 nodes: the coteries.
  std::vector<std::size_t> coteries() const { return level_nodes(1); }

 private:
  std::size_t points_ = 0;
  std::vector<T> heights_;
  std::vector<TreeNode> nodes_;
};

template <class T>
DendroTree<T> build_tree(const Dendrogram<T>& d) {
  return DendroTree<T>(d);
}

struct CoterieProfile {
  /// Coterie sizes in node order.
  std::vector<std::size_t> sizes;
  std::size_t covered = 0;
  /// Points that belong to no coterie.
  std::vector<std::size_t> uncovered;
};

template <class T>
CoterieProfile coterie_profile(const DendroTree<T>& t);

}  // namespace ultragap
