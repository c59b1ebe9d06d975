#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace treeinv {

using NodeId = std::int32_t;
inline constexpr NodeId kNoParent = -1;

using BigInt = boost::multiprecision::cpp_int;

/// Immutable rooted tree on nodes 0..n-1, stored as flat arrays.
///
/// Children of a node are kept in increasing index order; dfs_order() is the preorder
/// that visits children in that order, so every parent precedes its children.
class Tree {
 public:
  /// Builds a tree from a parent array (kNoParent marks the root).
  /// Throws std::invalid_argument on an empty array, several roots, an out-of-range
  /// index, or a cycle.
  static Tree from_parents(std::vector<NodeId> parents);

  std::size_t size() const { return parent_.size(); }
  NodeId root() const { return root_; }
  NodeId parent(NodeId v) const { return parent_[static_cast<std::size_t>(v)]; }
  std::span<const NodeId> parents() const { return parent_; }
  std::span<const NodeId> children(NodeId v) const {
    const auto i = static_cast<std::size_t>(v);
    return std::span<const NodeId>(child_list_).subspan(child_offset_[i],
                                                       child_offset_[i + 1] - child_offset_[i]);
  }
  std::size_t child_count(NodeId v) const {
    const auto i = static_cast<std::size_t>(v);
    return child_offset_[i + 1] - child_offset_[i];
  }
  std::span<const NodeId> dfs_order() const { return dfs_; }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::size_t> child_offset_;
  std::vector<NodeId> child_list_;
  std::vector<NodeId> dfs_;
  NodeId root_ = kNoParent;
};

/// Subtree sizes z_v, depths h(v) and the height of a tree.
struct TreeProfile {
  std::vector<std::int64_t> subtree_size;
  std::vector<std::int32_t> depth;
  std::int32_t height = 0;
};

TreeProfile profile(const Tree& t);

/// Sum of depths, i.e. the total path length.
std::int64_t total_path_length(const TreeProfile& p);

/// k-total common ancestors: sum over all ordered k-tuples of their number of common
/// ancestors, computed as sum_v z_v^k. Requires k >= 1.
BigInt upsilon(const TreeProfile& p, int k);
BigInt upsilon(const Tree& t, int k);

/// Brute-force k-total common ancestors by enumerating all n^k ordered tuples.
/// Throws std::length_error when n^k exceeds 10^7.
BigInt upsilon_tuple_oracle(const Tree& t, int k);

/// k-common path length: sum over ordered k-tuples of the depth of their last common
/// ancestor, equal to sum over non-root v of z_v^k.
BigInt common_path_length(const TreeProfile& p, int k);
BigInt common_path_length(const Tree& t, int k);

/// {"parents":[-1,0,...]}
nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);
Tree read_tree_file(const std::string& path);

/// Canonical string of the unordered rooted shape (AHU encoding).
std::string canonical_shape(const Tree& t);

}  // namespace treeinv
