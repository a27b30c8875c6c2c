#include "glcb/ctree.hpp"

#include <cmath>
#include <stdexcept>

namespace glcb {

std::vector<double> midpoints(int depth, double r_min, double r_max) {
  if (depth < 1) throw std::invalid_argument("midpoints: depth must be >= 1");
  if (!(r_min < r_max))
    throw std::invalid_argument("midpoints: r_min must be < r_max");
  const int bins = 1 << depth;
  const double width = (r_max - r_min) / bins;
  std::vector<double> v(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k)
    v[static_cast<std::size_t>(k)] = r_min + (k + 0.5) * width;
  return v;
}

int node_index(std::string_view b) {
  int value = 0;
  for (char c : b) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("node_index: address must be binary");
    value = (value << 1) | (c - '0');
  }
  return (1 << b.size()) - 1 + value;
}

std::shared_ptr<const TreeGating> sample_tree_gating(int depth, int dim,
                                                     int units_per_node,
                                                     int planes_per_unit,
                                                     double bias_scale,
                                                     Rng& rng) {
  if (depth < 1)
    throw std::invalid_argument("sample_tree_gating: depth must be >= 1");
  auto gating = std::make_shared<TreeGating>();
  const int nodes = (1 << depth) - 1;
  gating->reserve(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n)
    gating->push_back(
        sample_gating(dim, units_per_node, planes_per_unit, bias_scale, rng));
  return gating;
}

RewardTree make_reward_tree(const GlnConfig& config, int depth, double r_min,
                            double r_max,
                            std::shared_ptr<const TreeGating> gating) {
  if (depth < 1)
    throw std::invalid_argument("make_reward_tree: depth must be >= 1");
  if (!(r_min < r_max))
    throw std::invalid_argument("make_reward_tree: r_min must be < r_max");
  const int nodes = (1 << depth) - 1;
  if (!gating || static_cast<int>(gating->size()) != nodes)
    throw std::invalid_argument("make_reward_tree: need one gating set per node");
  RewardTree tree;
  tree.depth = depth;
  tree.r_min = r_min;
  tree.r_max = r_max;
  tree.node_gating = std::move(gating);
  tree.nodes.reserve(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n) {
    const auto S = (*tree.node_gating)[static_cast<std::size_t>(n)]
                       .unit(0)
                       .signature_count();
    tree.nodes.emplace_back(config, S);
  }
  tree.midpoints = midpoints(depth, r_min, r_max);
  return tree;
}

namespace {

int units_per_node(const RewardTree& tree) {
  return tree.nodes.front().unit_count();
}

// Signature slice of one node out of the tree-wide concatenation.
Signature node_sig(const Signature& tree_sig, int node, int units) {
  const auto begin = tree_sig.begin() + static_cast<std::ptrdiff_t>(node) * units;
  return Signature(begin, begin + units);
}

}  // namespace

void tree_signature(const RewardTree& tree, const Vec& x, Signature& out) {
  out.clear();
  Signature tmp;
  for (const GatingSet& gset : *tree.node_gating) {
    total_signature(gset, x, tmp);
    out.insert(out.end(), tmp.begin(), tmp.end());
  }
}

Signature tree_signature(const RewardTree& tree, const Vec& x) {
  Signature s;
  tree_signature(tree, x, s);
  return s;
}

double leaf_probability(const RewardTree& tree, const Vec& x,
                        std::string_view leaf) {
  if (static_cast<int>(leaf.size()) != tree.depth)
    throw std::invalid_argument("leaf_probability: leaf string length mismatch");
  const Signature sig = tree_signature(tree, x);
  const int units = units_per_node(tree);
  double prob = 1.0;
  for (int i = 0; i < tree.depth; ++i) {
    const char c = leaf[static_cast<std::size_t>(i)];
    if (c != '0' && c != '1')
      throw std::invalid_argument("leaf_probability: leaf string must be binary");
    const int node = node_index(leaf.substr(0, static_cast<std::size_t>(i)));
    const double out = forward(tree.nodes[static_cast<std::size_t>(node)],
                               node_sig(sig, node, units), x);
    prob *= (c == '1') ? out : 1.0 - out;
  }
  return prob;
}

double expected_reward(const RewardTree& tree, const Signature& tree_sig,
                       const Vec& x) {
  const int units = units_per_node(tree);
  if (static_cast<int>(tree_sig.size()) != units * tree.node_count())
    throw std::invalid_argument("expected_reward: signature length mismatch");
  double total = 0.0;
  // Depth-first accumulation of path products; node index 2k+1 / 2k+2 are
  // the children of k, leaves numbered by dec(b) with b1 most significant.
  const auto recurse = [&](auto&& self, int node, int level, int prefix,
                           double path_prob) -> void {
    if (level == tree.depth) {
      total += path_prob * tree.midpoints[static_cast<std::size_t>(prefix)];
      return;
    }
    const double out = forward(tree.nodes[static_cast<std::size_t>(node)],
                               node_sig(tree_sig, node, units), x);
    self(self, 2 * node + 1, level + 1, prefix << 1, path_prob * (1.0 - out));
    self(self, 2 * node + 2, level + 1, (prefix << 1) | 1, path_prob * out);
  };
  recurse(recurse, 0, 0, 0, 1.0);
  return total;
}

double expected_reward(const RewardTree& tree, const Vec& x) {
  return expected_reward(tree, tree_signature(tree, x), x);
}

std::string target_path(double r, const RewardTree& tree) {
  if (!(r >= tree.r_min && r <= tree.r_max))
    throw std::invalid_argument("target_path: reward outside [r_min, r_max]");
  const int bins = tree.leaf_count();
  int k = static_cast<int>(
      std::floor((r - tree.r_min) / (tree.r_max - tree.r_min) * bins));
  if (k >= bins) k = bins - 1;  // r == r_max falls in the top bin
  std::string b(static_cast<std::size_t>(tree.depth), '0');
  for (int i = tree.depth - 1; i >= 0; --i) {
    b[static_cast<std::size_t>(i)] = static_cast<char>('0' + (k & 1));
    k >>= 1;
  }
  return b;
}

void tree_update(RewardTree& tree, const Signature& tree_sig, const Vec& x,
                 double r, double lr) {
  const std::string b = target_path(r, tree);
  const int units = units_per_node(tree);
  for (int i = 0; i < tree.depth; ++i) {
    const int node = node_index(std::string_view(b).substr(0, static_cast<std::size_t>(i)));
    const double target = (b[static_cast<std::size_t>(i)] == '1') ? 1.0 : 0.0;
    forward_update(tree.nodes[static_cast<std::size_t>(node)],
                   node_sig(tree_sig, node, units), x, target, lr);
  }
}

void tree_update(RewardTree& tree, const Vec& x, double r, double lr) {
  tree_update(tree, tree_signature(tree, x), x, r, lr);
}

}  // namespace glcb
