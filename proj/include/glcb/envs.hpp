#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glcb/agent.hpp"
#include "glcb/rng.hpp"

namespace glcb {

struct RewardKindInfo {
  RewardMode mode = RewardMode::kBernoulli;
  double r_min = 0.0;
  double r_max = 1.0;
};

/// One step of a bandit task: the context shown to the policy and the
/// realized reward of every action. Only the chosen entry is revealed to
/// the policy; the full vector stays harness-side for regret accounting.
struct TaskStep {
  Vec context;
  Vec rewards;
};

class BanditTask {
 public:
  virtual ~BanditTask() = default;
  virtual std::string name() const = 0;
  virtual int num_actions() const = 0;
  virtual int context_dim() const = 0;
  virtual RewardKindInfo reward_kind() const = 0;
  virtual long horizon() const = 0;
  virtual TaskStep next() = 0;
};

/// Column-wise affine map onto [0, 1]; constant columns map to all zeros.
Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& m);

/// 1 if the action names the row's class, else 0.
inline int classification_reward(int label, int action) {
  return action == label ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Wheel bandit: 2-d contexts on the unit disk, 5 actions. Action 0 pays
// mu_low everywhere; inside radius delta actions 1-4 pay mu_mid; outside,
// the action matching the context's quadrant pays mu_high and the rest
// mu_mid. Quadrants map (+,+) -> 1, (+,-) -> 2, (-,+) -> 3, (-,-) -> 4.
// Contexts are served rescaled to [0,1]^2 via (x+1)/2.
// ---------------------------------------------------------------------------

struct WheelConfig {
  double delta = 0.95;
  double mu_low = 0.24;
  double mu_mid = 0.2;
  double mu_high = 10.0;
  double noise_sigma = 0.01;
  double reward_min = 0.0;
  double reward_max = 10.0;
  long horizon = 5000;

  void validate() const;
};

struct WheelDraw {
  Vec raw;      // disk coordinates in [-1,1]^2
  Vec context;  // rescaled to [0,1]^2
  Vec means;    // mean reward per action
};

/// Mean reward vector at a raw disk point.
Vec wheel_means(const WheelConfig& config, const Vec& raw);

/// Draws a context uniform on the unit disk and its mean-reward vector.
WheelDraw wheel_step(const WheelConfig& config, Rng& rng);

class WheelBandit : public BanditTask {
 public:
  WheelBandit(WheelConfig config, std::uint64_t seed);

  std::string name() const override { return "wheel"; }
  int num_actions() const override { return 5; }
  int context_dim() const override { return 2; }
  RewardKindInfo reward_kind() const override;
  long horizon() const override { return config_.horizon; }
  TaskStep next() override;

 private:
  WheelConfig config_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Dataset-backed bandits. CSV input: UTF-8, header row, comma-separated.
// Features are column-wise min-max normalized; declared categorical columns
// are one-hot encoded first (category order = sorted category set). Rows are
// served without replacement under a seeded permutation, for
// T = min(horizon_cap, |D|) steps.
// ---------------------------------------------------------------------------

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 if absent
};

Csv read_csv(const std::string& path);

struct ClassificationData {
  Eigen::MatrixXd features;  // normalized
  std::vector<int> labels;
  int num_classes = 0;
};

ClassificationData build_classification(
    const Csv& csv, const std::string& label_column,
    const std::vector<std::string>& categorical_columns);

struct RegressionData {
  Eigen::MatrixXd features;  // normalized
  Eigen::MatrixXd rewards;   // T x num_actions, rescaled into [0,1] globally
};

RegressionData build_regression(const Csv& csv,
                                const std::vector<std::string>& reward_columns,
                                const std::vector<std::string>& categorical_columns);

class ClassificationBandit : public BanditTask {
 public:
  ClassificationBandit(std::string name, std::shared_ptr<const ClassificationData> data,
                       long horizon_cap, std::uint64_t seed);

  std::string name() const override { return name_; }
  int num_actions() const override { return data_->num_classes; }
  int context_dim() const override { return static_cast<int>(data_->features.cols()); }
  RewardKindInfo reward_kind() const override { return {RewardMode::kBernoulli, 0.0, 1.0}; }
  long horizon() const override { return horizon_; }
  TaskStep next() override;

 private:
  std::string name_;
  std::shared_ptr<const ClassificationData> data_;
  std::vector<long> order_;
  long horizon_ = 0;
  long pos_ = 0;
};

class RegressionBandit : public BanditTask {
 public:
  RegressionBandit(std::string name, std::shared_ptr<const RegressionData> data,
                   long horizon_cap, std::uint64_t seed);

  std::string name() const override { return name_; }
  int num_actions() const override { return static_cast<int>(data_->rewards.cols()); }
  int context_dim() const override { return static_cast<int>(data_->features.cols()); }
  RewardKindInfo reward_kind() const override { return {RewardMode::kContinuous, 0.0, 1.0}; }
  long horizon() const override { return horizon_; }
  TaskStep next() override;

 private:
  std::string name_;
  std::shared_ptr<const RegressionData> data_;
  std::vector<long> order_;
  long horizon_ = 0;
  long pos_ = 0;
};

/// Task construction manifest. `kind` is "wheel", "classification" or
/// "regression"; when empty it is inferred from well-known names (wheel;
/// statlog/adult/census/covertype -> classification; jester/financial ->
/// regression). Dataset tasks need `path`; the label column defaults to the
/// last CSV column.
struct TaskSpec {
  std::string name;
  std::string kind;
  std::string path;
  std::string label_column;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> reward_columns;
  long horizon = 0;  // 0 -> default cap of 5000
  WheelConfig wheel;
};

std::unique_ptr<BanditTask> make_task(const TaskSpec& spec, std::uint64_t seed);

/// Seeded Fisher-Yates permutation of {0, ..., n-1}.
std::vector<long> permutation(long n, Rng& rng);

}  // namespace glcb
