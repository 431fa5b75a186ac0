#include "ultragap/dendrogram.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ultragap/errors.hpp"

namespace ultragap {
namespace {

bool is_zero(double v) { return v == 0.0; }
bool is_zero(const Rational& v) { return sgn(v) == 0; }

void canonicalize(Partition& partition) {
  for (auto& block : partition) std::sort(block.begin(), block.end());
  std::sort(partition.begin(), partition.end());
}

// Every point appears exactly once; blocks are non-empty.
void check_partition(const Partition& partition, std::size_t n, std::size_t k) {
  std::vector<int> seen(n, 0);
  for (const auto& block : partition) {
    if (block.empty()) throw StructuralError("empty block at level " + std::to_string(k));
    for (std::size_t x : block) {
      if (x >= n) throw StructuralError("point index " + std::to_string(x) + " out of range at level " + std::to_string(k));
      if (seen[x]++) throw StructuralError("point " + std::to_string(x) + " repeated at level " + std::to_string(k));
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (!seen[x]) throw StructuralError("point " + std::to_string(x) + " missing at level " + std::to_string(k));
  }
}

// Fine refines coarse, and not equal.
void check_proper_refinement(const Partition& fine, const Partition& coarse, std::size_t n, std::size_t k) {
  std::vector<std::size_t> owner(n);
  for (std::size_t b = 0; b < coarse.size(); ++b) {
    for (std::size_t x : coarse[b]) owner[x] = b;
  }
  for (const auto& block : fine) {
    for (std::size_t x : block) {
      if (owner[x] != owner[block.front()]) {
        throw StructuralError("level " + std::to_string(k - 1) + " does not refine level " + std::to_string(k));
      }
    }
  }
  if (fine == coarse) throw StructuralError("level " + std::to_string(k - 1) + " equals level " + std::to_string(k));
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  Partition partition() {
    std::map<std::size_t, Block> groups;
    for (std::size_t x = 0; x < parent_.size(); ++x) groups[find(x)].push_back(x);
    Partition out;
    for (auto& [root, block] : groups) out.push_back(std::move(block));
    canonicalize(out);
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

template <class T>
Dendrogram<T> Dendrogram<T>::make(std::vector<std::string> labels, std::vector<T> heights,
                                  std::vector<Partition> partitions) {
  const std::size_t n = labels.size();
  if (n < 2) throw StructuralError("a dendrogram needs at least two points");
  if (heights.size() != partitions.size()) throw StructuralError("one partition per height is required");
  for (auto& p : partitions) canonicalize(p);

  Partition singletons;
  for (std::size_t x = 0; x < n; ++x) singletons.push_back({x});
  if (heights.empty() || !is_zero(heights.front())) {
    heights.insert(heights.begin(), T(0));
    partitions.insert(partitions.begin(), singletons);
  }
  if (heights.size() < 2) throw StructuralError("a dendrogram needs a non-zero height");
  for (std::size_t k = 1; k < heights.size(); ++k) {
    if (!(heights[k - 1] < heights[k])) throw StructuralError("heights must be strictly increasing");
  }
  for (std::size_t k = 0; k < partitions.size(); ++k) check_partition(partitions[k], n, k);
  if (partitions.front() != singletons) throw StructuralError("the height-0 partition must be all singletons");
  if (partitions.back().size() != 1) throw StructuralError("the top partition must be the single block X");
  for (std::size_t k = 1; k < partitions.size(); ++k) {
    check_proper_refinement(partitions[k - 1], partitions[k], n, k);
  }

  Dendrogram d;
  d.labels_ = std::move(labels);
  d.heights_ = std::move(heights);
  d.partitions_ = std::move(partitions);
  return d;
}

template <class T>
Dendrogram<T> build_dendrogram(const FiniteMetric<T>& m) {
  if (!m.is_ultrametric()) throw DomainError("dendrograms exist only for ultrametrics");
  const std::size_t n = m.size();
  if (n < 2) throw DomainError("a dendrogram needs at least two points");

  struct Edge {
    T weight;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({m(i, j), i, j});
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.weight < b.weight; });

  std::vector<T> heights{T(0)};
  std::vector<Partition> partitions;
  DisjointSets sets(n);
  partitions.push_back(sets.partition());
  for (std::size_t e = 0; e < edges.size();) {
    const T height = edges[e].weight;
    for (; e < edges.size() && edges[e].weight == height; ++e) sets.unite(edges[e].i, edges[e].j);
    heights.push_back(height);
    partitions.push_back(sets.partition());
  }
  return Dendrogram<T>::make(m.labels(), std::move(heights), std::move(partitions));
}

template <class T>
FiniteMetric<T> dendrogram_to_metric(const Dendrogram<T>& d) {
  const std::size_t n = d.size();
  std::vector<T> dist(n * n, T(0));
  std::vector<bool> set(n * n, false);
  for (std::size_t k = 1; k < d.heights().size(); ++k) {
    for (const auto& block : d.partitions()[k]) {
      for (std::size_t a : block) {
        for (std::size_t b : block) {
          if (a != b && !set[a * n + b]) {
            dist[a * n + b] = d.heights()[k];
            set[a * n + b] = true;
          }
        }
      }
    }
  }
  return detail::MetricAccess::make<T>(d.labels(), std::move(dist), MetricKind::Ultrametric);
}

template <class T>
DendroTree<T>::DendroTree(const Dendrogram<T>& d) : points_(d.size()), heights_(d.heights()) {
  // A block is a node at the first level where it appears; its children are
  // the blocks of the previous partition it contains.
  std::map<Block, std::size_t> first_level;
  for (std::size_t k = 0; k < d.partitions().size(); ++k) {
    for (const auto& block : d.partitions()[k]) first_level.emplace(block, k);
  }
  std::vector<std::pair<std::size_t, Block>> order;
  for (const auto& [block, level] : first_level) order.emplace_back(level, block);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.front() < b.second.front();
  });

  std::map<Block, std::size_t> id_of;
  for (const auto& [level, block] : order) {
    id_of.emplace(block, nodes_.size());
    nodes_.push_back(TreeNode{block, level, {}, std::nullopt});
  }
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    TreeNode& v = nodes_[id];
    if (v.level == 0) continue;
    for (const auto& block : d.partitions()[v.level - 1]) {
      if (std::binary_search(v.members.begin(), v.members.end(), block.front())) {
        const std::size_t child = id_of.at(block);
        v.children.push_back(child);
        nodes_[child].parent = id;
      }
    }
  }
}

template <class T>
std::vector<std::size_t> DendroTree<T>::level_nodes(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].level == k) out.push_back(id);
  }
  return out;
}

template <class T>
CoterieProfile coterie_profile(const DendroTree<T>& t) {
  CoterieProfile profile;
  std::vector<bool> covered(t.points(), false);
  for (std::size_t id : t.coteries()) {
    const auto& members = t.node(id).members;
    profile.sizes.push_back(members.size());
    profile.covered += members.size();
    for (std::size_t x : members) covered[x] = true;
  }
  for (std::size_t x = 0; x < t.points(); ++x) {
    if (!covered[x]) profile.uncovered.push_back(x);
  }
  return profile;
}

template class Dendrogram<double>;
template class Dendrogram<Rational>;
template class DendroTree<double>;
template class DendroTree<Rational>;
template Dendrogram<double> build_dendrogram<double>(const FiniteMetric<double>&);
template Dendrogram<Rational> build_dendrogram<Rational>(const FiniteMetric<Rational>&);
template FiniteMetric<double> dendrogram_to_metric<double>(const Dendrogram<double>&);
template FiniteMetric<Rational> dendrogram_to_metric<Rational>(const Dendrogram<Rational>&);
template CoterieProfile coterie_profile<double>(const DendroTree<double>&);
template CoterieProfile coterie_profile<Rational>(const DendroTree<Rational>&);

}  // namespace ultragap
