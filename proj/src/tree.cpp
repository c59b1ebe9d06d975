#include "treeinv/tree.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace treeinv {

Tree Tree::from_parents(std::vector<NodeId> parents) {
  const std::size_t n = parents.size();
  if (n == 0) throw std::invalid_argument("tree: parent array is empty");
  if (n > static_cast<std::size_t>(std::numeric_limits<NodeId>::max()))
    throw std::invalid_argument("tree: too many nodes");

  Tree t;
  std::vector<std::size_t> counts(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const NodeId p = parents[v];
    if (p == kNoParent) {
      if (t.root_ != kNoParent)
        throw std::invalid_argument("tree: multiple roots (nodes " + std::to_string(t.root_) +
                                    " and " + std::to_string(v) + ")");
      t.root_ = static_cast<NodeId>(v);
      continue;
    }
    if (p < 0 || static_cast<std::size_t>(p) >= n)
      throw std::invalid_argument("tree: parent index " + std::to_string(p) + " of node " +
                                  std::to_string(v) + " out of range");
    if (static_cast<std::size_t>(p) == v)
      throw std::invalid_argument("tree: cycle detected (node " + std::to_string(v) +
                                  " is its own parent)");
    ++counts[static_cast<std::size_t>(p) + 1];
  }
  if (t.root_ == kNoParent) throw std::invalid_argument("tree: no root (cycle detected)");

  t.child_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) t.child_offset_[v + 1] = t.child_offset_[v] + counts[v + 1];
  t.child_list_.resize(n - 1);
  std::vector<std::size_t> fill(t.child_offset_.begin(), t.child_offset_.end() - 1);
  for (std::size_t v = 0; v < n; ++v) {
    const NodeId p = parents[v];
    if (p != kNoParent) t.child_list_[fill[static_cast<std::size_t>(p)]++] = static_cast<NodeId>(v);
  }

  t.dfs_.reserve(n);
  std::vector<NodeId> stack{t.root_};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    t.dfs_.push_back(v);
    const auto i = static_cast<std::size_t>(v);
    for (std::size_t c = t.child_offset_[i + 1]; c > t.child_offset_[i]; --c)
      stack.push_back(t.child_list_[c - 1]);
  }
  // Nodes on a cycle are unreachable from the root.
  if (t.dfs_.size() != n) throw std::invalid_argument("tree: cycle detected");

  t.parent_ = std::move(parents);
  return t;
}

TreeProfile profile(const Tree& t) {
  const std::size_t n = t.size();
  TreeProfile p;
  p.subtree_size.assign(n, 1);
  p.depth.assign(n, 0);
  const auto order = t.dfs_order();
  for (const NodeId v : order) {
    const NodeId par = t.parent(v);
    if (par != kNoParent) {
      const std::int32_t d = p.depth[static_cast<std::size_t>(par)] + 1;
      p.depth[static_cast<std::size_t>(v)] = d;
      p.height = std::max(p.height, d);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId par = t.parent(*it);
    if (par != kNoParent)
      p.subtree_size[static_cast<std::size_t>(par)] += p.subtree_size[static_cast<std::size_t>(*it)];
  }
  return p;
}

std::int64_t total_path_length(const TreeProfile& p) {
  std::int64_t sum = 0;
  for (const auto d : p.depth) sum += d;
  return sum;
}

namespace {

void require_order(int k) {
  if (k < 1) throw std::invalid_argument("order k must be >= 1");
}

// sum of z^k over the given sizes, grouping equal sizes so each power is taken once.
BigInt power_sum(std::vector<std::int64_t> sizes, int k) {
  std::sort(sizes.begin(), sizes.end());
  BigInt total = 0;
  for (std::size_t i = 0; i < sizes.size();) {
    std::size_t j = i;
    while (j < sizes.size() && sizes[j] == sizes[i]) ++j;
    BigInt term = boost::multiprecision::pow(BigInt(sizes[i]), static_cast<unsigned>(k));
    total += term * static_cast<std::int64_t>(j - i);
    i = j;
  }
  return total;
}

}  // namespace

BigInt upsilon(const TreeProfile& p, int k) {
  require_order(k);
  return power_sum(p.subtree_size, k);
}

BigInt upsilon(const Tree& t, int k) { return upsilon(profile(t), k); }

BigInt common_path_length(const TreeProfile& p, int k) {
  require_order(k);
  std::vector<std::int64_t> sizes(p.subtree_size);
  // the root is the unique node with z_v = n
  const auto n = static_cast<std::int64_t>(sizes.size());
  auto root = std::find(sizes.begin(), sizes.end(), n);
  sizes.erase(root);
  return power_sum(std::move(sizes), k);
}

BigInt common_path_length(const Tree& t, int k) { return common_path_length(profile(t), k); }

BigInt upsilon_tuple_oracle(const Tree& t, int k) {
  require_order(k);
  const std::size_t n = t.size();
  double work = 1;
  for (int i = 0; i < k; ++i) work *= static_cast<double>(n);
  if (work > 1e7) throw std::length_error("upsilon_tuple_oracle: n^k exceeds the 10^7 budget");

  const TreeProfile p = profile(t);
  // Common ancestors of a set of nodes = depth of their last common ancestor + 1.
  auto lca = [&](NodeId a, NodeId b) {
    while (p.depth[static_cast<std::size_t>(a)] > p.depth[static_cast<std::size_t>(b)]) a = t.parent(a);
    while (p.depth[static_cast<std::size_t>(b)] > p.depth[static_cast<std::size_t>(a)]) b = t.parent(b);
    while (a != b) {
      a = t.parent(a);
      b = t.parent(b);
    }
    return a;
  };

  std::vector<NodeId> tuple(static_cast<std::size_t>(k), 0);
  std::uint64_t total = 0;
  for (;;) {
    NodeId meet = tuple[0];
    for (std::size_t i = 1; i < tuple.size(); ++i) meet = lca(meet, tuple[i]);
    total += static_cast<std::uint64_t>(p.depth[static_cast<std::size_t>(meet)]) + 1;
    std::size_t pos = 0;
    while (pos < tuple.size() && static_cast<std::size_t>(++tuple[pos]) == n) tuple[pos++] = 0;
    if (pos == tuple.size()) break;
  }
  return BigInt(total);
}

nlohmann::json tree_to_json(const Tree& t) {
  return nlohmann::json{{"parents", std::vector<NodeId>(t.parents().begin(), t.parents().end())}};
}

Tree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("parents") || !j["parents"].is_array())
    throw std::invalid_argument("tree JSON: expected an object with a \"parents\" array");
  std::vector<NodeId> parents;
  parents.reserve(j["parents"].size());
  for (const auto& v : j["parents"]) {
    if (!v.is_number_integer()) throw std::invalid_argument("tree JSON: parents must be integers");
    parents.push_back(v.get<NodeId>());
  }
  return Tree::from_parents(std::move(parents));
}

Tree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("tree file " + path + ": " + e.what());
  }
  return tree_from_json(j);
}

std::string canonical_shape(const Tree& t) {
  std::vector<std::string> code(t.size());
  const auto order = t.dfs_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::vector<std::string> kids;
    for (const NodeId c : t.children(*it)) kids.push_back(std::move(code[static_cast<std::size_t>(c)]));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& k : kids) s += k;
    s += ")";
    code[static_cast<std::size_t>(*it)] = std::move(s);
  }
  return code[static_cast<std::size_t>(t.root())];
}

}  // namespace treeinv
