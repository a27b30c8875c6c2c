#include "glcb/agent.hpp"

#include <cmath>
#include <stdexcept>

namespace glcb {

GlcbConfig GlcbConfig::bernoulli_defaults() { return GlcbConfig{}; }

GlcbConfig GlcbConfig::continuous_defaults(double r_min, double r_max) {
  GlcbConfig cfg;
  cfg.mode = RewardMode::kContinuous;
  cfg.exploration_c = 0.1;
  cfg.lr_init = 1.0;
  cfg.lr_decay = 0.01;
  cfg.switching_init = 1.0;
  cfg.switching_decay = 0.1;
  cfg.planes_per_unit = 2;
  cfg.bias_scale = 0.001;
  cfg.tree_depth = 3;
  cfg.r_min = r_min;
  cfg.r_max = r_max;
  return cfg;
}

void GlcbConfig::validate() const {
  // C = 0 is the greedy policy (the zero-pseudocount sentinel still forces
  // initial exploration).
  if (exploration_c < 0.0)
    throw std::invalid_argument("GlcbConfig: exploration_c must be >= 0");
  if (!(lr_init > 0.0))
    throw std::invalid_argument("GlcbConfig: lr_init must be > 0");
  if (lr_decay < 0.0)
    throw std::invalid_argument("GlcbConfig: lr_decay must be >= 0");
  if (planes_per_unit < 1)
    throw std::invalid_argument("GlcbConfig: planes_per_unit must be >= 1");
  if (bias_scale < 0.0)
    throw std::invalid_argument("GlcbConfig: bias_scale must be >= 0");
  if (mode == RewardMode::kContinuous) {
    if (tree_depth < 1 || tree_depth > 6)
      throw std::invalid_argument("GlcbConfig: tree_depth must be in [1, 6]");
    if (!(r_min < r_max))
      throw std::invalid_argument("GlcbConfig: r_min must be < r_max");
  }
  gln.validate();
}

double schedule(double initial, double decay, std::uint64_t n) {
  if (!(initial > 0.0))
    throw std::invalid_argument("schedule: initial must be > 0");
  if (decay < 0.0) throw std::invalid_argument("schedule: decay must be >= 0");
  return initial / (1.0 + decay * static_cast<double>(n));
}

GlcbAgent::GlcbAgent(GlcbConfig config, int num_actions, std::uint64_t seed)
    : config_(std::move(config)), num_actions_(num_actions) {
  if (num_actions_ < 1)
    throw std::invalid_argument("GlcbAgent: num_actions must be >= 1");
  config_.validate();
  Rng rng = Rng::stream(seed, "gating-init");
  const int dim = config_.gln.input_dim;
  const int units = config_.gln.unit_count();
  if (config_.mode == RewardMode::kBernoulli) {
    gating_ = sample_gating(dim, units, config_.planes_per_unit,
                            config_.bias_scale, rng);
    const auto S = gating_.unit(0).signature_count();
    glns_.reserve(static_cast<std::size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a) glns_.emplace_back(config_.gln, S);
  } else {
    // One gating set per tree node, shared by every action's tree.
    node_gating_ = sample_tree_gating(config_.tree_depth, dim, units,
                                      config_.planes_per_unit,
                                      config_.bias_scale, rng);
    trees_.reserve(static_cast<std::size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a)
      trees_.push_back(make_reward_tree(config_.gln, config_.tree_depth,
                                        config_.r_min, config_.r_max,
                                        node_gating_));
  }
  counts_ = CountTable(unit_count(), num_actions_);
}

int GlcbAgent::unit_count() const {
  const int units = config_.gln.unit_count();
  return config_.mode == RewardMode::kBernoulli
             ? units
             : units * ((1 << config_.tree_depth) - 1);
}

const GlnParams& GlcbAgent::gln_params(int action) const {
  return glns_.at(static_cast<std::size_t>(action));
}
GlnParams& GlcbAgent::gln_params(int action) {
  return glns_.at(static_cast<std::size_t>(action));
}
const RewardTree& GlcbAgent::tree(int action) const {
  return trees_.at(static_cast<std::size_t>(action));
}
RewardTree& GlcbAgent::tree(int action) {
  return trees_.at(static_cast<std::size_t>(action));
}

Signature GlcbAgent::signature(const Vec& x) const {
  if (config_.mode == RewardMode::kBernoulli) return total_signature(gating_, x);
  return tree_signature(trees_.front(), x);
}

int GlcbAgent::select_action(const Vec& x) const {
  return select_action(x, nullptr);
}

int GlcbAgent::select_action(const Vec& x,
                             std::vector<ActionScore>* scores) const {
  const Signature sig = signature(x);
  // During step t (1-based): pseudocount weights use max(t-1, 1), the bonus
  // numerator uses ln t.
  const std::uint64_t t_now = t_ + 1;
  const std::uint64_t t_weights = t_ == 0 ? 1 : t_;

  if (scores) scores->assign(static_cast<std::size_t>(num_actions_), {});
  int best = 0;
  bool best_unexplored = false;
  double best_total = 0.0;
  for (int a = 0; a < num_actions_; ++a) {
    double value;
    if (config_.mode == RewardMode::kBernoulli) {
      value = forward(glns_[static_cast<std::size_t>(a)], sig, x);
    } else {
      value = expected_reward(trees_[static_cast<std::size_t>(a)], sig, x);
    }
    const double nhat = pseudocount(counts_, sig, a, t_weights);
    const bool unexplored = nhat == 0.0;
    const double bonus = exploration_bonus(t_now, nhat, config_.exploration_c);
    if (scores)
      (*scores)[static_cast<std::size_t>(a)] = {value, bonus, unexplored};

    // Unexplored actions outrank every explored one; ties keep the lowest
    // index (strict comparisons below).
    if (a == 0) {
      best_unexplored = unexplored;
      best_total = value + bonus;
      continue;
    }
    if (unexplored) {
      if (!best_unexplored) {
        best = a;
        best_unexplored = true;
      }
    } else if (!best_unexplored) {
      const double total = value + bonus;
      if (total > best_total) {
        best = a;
        best_total = total;
      }
    }
  }
  return best;
}

void GlcbAgent::observe(const Vec& x, int action, double reward) {
  if (action < 0 || action >= num_actions_)
    throw std::invalid_argument("GlcbAgent::observe: action out of range");
  const Signature sig = signature(x);
  const double lr =
      schedule(config_.lr_init, config_.lr_decay, counts_.pulls(action));
  if (config_.mode == RewardMode::kBernoulli) {
    if (reward != 0.0 && reward != 1.0)
      throw std::invalid_argument(
          "GlcbAgent::observe: Bernoulli reward must be 0 or 1");
    forward_update(glns_[static_cast<std::size_t>(action)], sig, x, reward, lr);
  } else {
    double r = reward;
    // Clamp only floating-point dust back into range; reject real violations.
    constexpr double kTol = 1e-9;
    if (r < config_.r_min || r > config_.r_max) {
      if (r >= config_.r_min - kTol && r <= config_.r_max + kTol)
        r = clip(r, config_.r_min, config_.r_max);
      else
        throw std::invalid_argument(
            "GlcbAgent::observe: reward outside [r_min, r_max]");
    }
    tree_update(trees_[static_cast<std::size_t>(action)], sig, x, r, lr);
  }
  counts_.increment(sig, action);
  ++t_;
}

GlcbAgent GlcbAgent::restore(GlcbConfig config, int num_actions,
                             GatingSet gating,
                             std::shared_ptr<const TreeGating> node_gating,
                             std::vector<GlnParams> glns,
                             std::vector<std::vector<GlnParams>> tree_nodes,
                             CountTable counts, std::uint64_t t) {
  GlcbAgent agent;
  agent.config_ = std::move(config);
  agent.config_.validate();
  agent.num_actions_ = num_actions;
  agent.counts_ = std::move(counts);
  agent.t_ = t;
  if (agent.config_.mode == RewardMode::kBernoulli) {
    if (static_cast<int>(glns.size()) != num_actions)
      throw std::invalid_argument("GlcbAgent::restore: estimator count mismatch");
    agent.gating_ = std::move(gating);
    agent.glns_ = std::move(glns);
  } else {
    if (static_cast<int>(tree_nodes.size()) != num_actions)
      throw std::invalid_argument("GlcbAgent::restore: estimator count mismatch");
    agent.node_gating_ = std::move(node_gating);
    for (auto& nodes : tree_nodes) {
      RewardTree tree;
      tree.depth = agent.config_.tree_depth;
      tree.r_min = agent.config_.r_min;
      tree.r_max = agent.config_.r_max;
      tree.node_gating = agent.node_gating_;
      if (static_cast<int>(nodes.size()) != tree.node_count())
        throw std::invalid_argument("GlcbAgent::restore: tree node count mismatch");
      tree.nodes = std::move(nodes);
      tree.midpoints = midpoints(tree.depth, tree.r_min, tree.r_max);
      agent.trees_.push_back(std::move(tree));
    }
  }
  if (agent.counts_.unit_count() != agent.unit_count() ||
      agent.counts_.num_actions() != num_actions)
    throw std::invalid_argument("GlcbAgent::restore: count table shape mismatch");
  return agent;
}

}  // namespace glcb
