#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "glcb/ctree.hpp"
#include "glcb/gln.hpp"
#include "glcb/pseudocount.hpp"

namespace glcb {

enum class RewardMode { kBernoulli, kContinuous };

/// Agent hyperparameters. Defaults follow the per-mode benchmark settings:
/// Bernoulli: C=0.03, 8 planes/unit, bias scale 0.05, lr 0.1 / decay 0.1.
/// Continuous: C=0.1, 2 planes/unit, bias scale 0.001, lr 1 / decay 0.01, D=3.
/// The switching-rate constants are carried for config round-tripping but
/// drive nothing.
struct GlcbConfig {
  RewardMode mode = RewardMode::kBernoulli;
  double exploration_c = 0.03;
  double lr_init = 0.1;
  double lr_decay = 0.1;
  double switching_init = 10.0;
  double switching_decay = 1.0;
  GlnConfig gln;  // input_dim filled at agent construction if left 0
  int planes_per_unit = 8;
  double bias_scale = 0.05;
  int tree_depth = 3;     // continuous mode
  double r_min = 0.0;     // continuous mode
  double r_max = 1.0;

  static GlcbConfig bernoulli_defaults();
  static GlcbConfig continuous_defaults(double r_min = 0.0, double r_max = 1.0);
  void validate() const;
};

/// initial / (1 + decay * n): per-action decay of the learning rate (and of
/// the unused switching alpha) in the number of pulls so far.
double schedule(double initial, double decay, std::uint64_t n);

/// The GLCB agent: per-action GLN (Bernoulli) or reward-tree (continuous)
/// estimators over one shared set of gating functions, with soft-min
/// pseudocount exploration bonuses. Owned by a single thread; selection is
/// read-only, observation requires exclusive access.
class GlcbAgent {
 public:
  GlcbAgent(GlcbConfig config, int num_actions, std::uint64_t seed);

  struct ActionScore {
    double value = 0.0;
    double bonus = 0.0;        // +infinity when unexplored
    bool unexplored = false;   // pseudocount was exactly zero
    double total() const { return value + bonus; }
  };

  /// argmax over value + bonus; unexplored actions beat all explored ones
  /// and ties resolve to the lowest action index. Pure.
  int select_action(const Vec& x) const;
  int select_action(const Vec& x, std::vector<ActionScore>* scores) const;

  /// Updates only action a's estimator (learning rate schedule(lr, decay,
  /// pulls(a))), then increments the signature counts at (sig(x), a) and
  /// advances the step counter.
  void observe(const Vec& x, int action, double reward);

  std::uint64_t step() const { return t_; }
  int num_actions() const { return num_actions_; }
  int context_dim() const { return config_.gln.input_dim; }
  /// Number of counting units: U in Bernoulli mode, U * (2^D - 1) in
  /// continuous mode (counts aggregate over every node's gating units).
  int unit_count() const;
  const GlcbConfig& config() const { return config_; }
  const CountTable& counts() const { return counts_; }

  const GatingSet& gating() const { return gating_; }
  const std::shared_ptr<const TreeGating>& node_gating() const {
    return node_gating_;
  }
  const GlnParams& gln_params(int action) const;
  GlnParams& gln_params(int action);
  const RewardTree& tree(int action) const;
  RewardTree& tree(int action);

  /// Total signature used for counting (and, in Bernoulli mode, prediction).
  Signature signature(const Vec& x) const;

  /// Reconstructs an agent from snapshot pieces; used by serialization.
  static GlcbAgent restore(GlcbConfig config, int num_actions,
                           GatingSet gating,
                           std::shared_ptr<const TreeGating> node_gating,
                           std::vector<GlnParams> glns,
                           std::vector<std::vector<GlnParams>> tree_nodes,
                           CountTable counts, std::uint64_t t);

 private:
  GlcbAgent() = default;

  GlcbConfig config_;
  int num_actions_ = 0;
  GatingSet gating_;                              // Bernoulli mode
  std::shared_ptr<const TreeGating> node_gating_; // continuous mode
  std::vector<GlnParams> glns_;
  std::vector<RewardTree> trees_;
  CountTable counts_;
  std::uint64_t t_ = 0;  // completed observe calls
};

}  // namespace glcb
