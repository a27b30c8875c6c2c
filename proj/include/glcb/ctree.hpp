#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "glcb/gln.hpp"

namespace glcb {

/// Shared per-node gating for a tree, in address order (root, 0, 1, 00, ...).
using TreeGating = std::vector<GatingSet>;

/// Depth-D complete binary tree of GLNs estimating E[r|x] for rewards in
/// [r_min, r_max]. Internal nodes are addressed by binary strings (left=0,
/// right=1, root = empty string) stored level by level; leaf b selects the
/// bin whose midpoint is midpoints[dec(b)] with b1 the most significant bit.
struct RewardTree {
  int depth = 0;
  double r_min = 0.0;
  double r_max = 1.0;
  std::shared_ptr<const TreeGating> node_gating;  // 2^depth - 1 sets
  std::vector<GlnParams> nodes;                   // 2^depth - 1 networks
  std::vector<double> midpoints;                  // 2^depth bin midpoints

  int node_count() const { return (1 << depth) - 1; }
  int leaf_count() const { return 1 << depth; }
};

/// True bin midpoints: v_k = r_min + (k + 1/2) (r_max - r_min) / 2^D.
std::vector<double> midpoints(int depth, double r_min, double r_max);

/// Level-order index of the internal node addressed by binary string b.
int node_index(std::string_view b);

/// Samples an independent gating set per internal node (same hyperparameters).
std::shared_ptr<const TreeGating> sample_tree_gating(int depth, int dim,
                                                     int units_per_node,
                                                     int planes_per_unit,
                                                     double bias_scale,
                                                     Rng& rng);

/// Fresh tree over existing (possibly shared) node gating.
RewardTree make_reward_tree(const GlnConfig& config, int depth, double r_min,
                            double r_max,
                            std::shared_ptr<const TreeGating> gating);

/// Concatenated total signatures of all nodes (node-major: node * U + u).
void tree_signature(const RewardTree& tree, const Vec& x, Signature& out);
Signature tree_signature(const RewardTree& tree, const Vec& x);

/// P(b|x): product over the root-to-leaf path of the node output if the
/// branch bit is 1, else one minus it. `leaf` is a string of '0'/'1' of
/// length depth.
double leaf_probability(const RewardTree& tree, const Vec& x,
                        std::string_view leaf);

/// sum_b P(b|x) v_dec(b), computed in one depth-first pass (each node
/// evaluated exactly once). Always lies within [r_min, r_max].
double expected_reward(const RewardTree& tree, const Vec& x);
double expected_reward(const RewardTree& tree, const Signature& tree_sig,
                       const Vec& x);

/// D-bit big-endian address of the bin containing r (clamped to the top
/// bin at r = r_max).
std::string target_path(double r, const RewardTree& tree);

/// Updates the D networks along the path to r's bin, each with the binary
/// branch target; all other nodes untouched.
void tree_update(RewardTree& tree, const Vec& x, double r, double lr);
void tree_update(RewardTree& tree, const Signature& tree_sig, const Vec& x,
                 double r, double lr);

}  // namespace glcb
