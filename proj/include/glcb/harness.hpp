#pragma once

#include <cstdint>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "glcb/envs.hpp"

namespace glcb {

/// A policy as the harness sees it: pick an arm, then learn from the
/// revealed reward. One instance per (seed, run); never shared.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual int select(const Vec& x) = 0;
  virtual void observe(const Vec& x, int action, double reward) = 0;
};

struct PolicySpec {
  std::string name;         // "glcb" | "uniform" | "linear_ts"
  nlohmann::json params;    // policy hyperparameters (glcb config keys, ...)
};

/// Builds a policy for a task instance. GLCB's mode, context dimension and
/// reward range come from the task unless overridden; an explicit mode that
/// contradicts the task's reward kind is a configuration error.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditTask& task,
                                    std::uint64_t seed);

struct RunConfig {
  TaskSpec task;
  PolicySpec policy;
  std::vector<std::uint64_t> seeds;
  long horizon_override = 0;
  std::string out_dir;
  int parallelism = 1;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct StepRecord {
  std::uint64_t seed = 0;
  long t = 0;
  int action = 0;
  double reward = 0.0;
  double cum_reward = 0.0;
  double optimal_reward = 0.0;  // best realized arm this step
};

struct RunSummary {
  std::string algorithm;
  std::string task;
  int seeds = 0;
  double mean_cum_reward = 0.0;
  double stderr_mean = 0.0;  // sample stdev / sqrt(seeds); 0 for one seed
  int rank = 1;
};

/// Per-step file schema, in column order:
///   seed,t,action,reward,cum_reward,optimal_reward
void write_step_csv(const std::string& path, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_step_csv(const std::string& path);

void write_summary_csv(const std::string& path, const std::vector<RunSummary>& rows);
std::vector<RunSummary> read_summary_csv(const std::string& path);

struct RunResult {
  std::vector<std::string> step_files;  // one per seed, seed order
  std::string summary_file;
  RunSummary summary;
};

/// Runs every seed (fresh task + fresh policy each) for T steps, writing
/// steps_seed<k>.csv per seed plus summary.csv, regret_curve.csv and a copy
/// of the config. Seeds run in parallel but outputs are byte-identical for
/// any parallelism degree.
RunResult run(const RunConfig& config);

/// Mean +/- stderr of final cumulative rewards across the given step files;
/// also returns the mean cumulative pseudo-regret curve (one value per t).
RunSummary summarize(const std::vector<std::string>& step_files,
                     const std::string& algorithm, const std::string& task,
                     std::vector<double>* regret_curve = nullptr);

/// Re-derives the summary (and regret curve) of a finished run directory.
RunSummary summarize_dir(const std::string& dir);

/// Fills ranks per task: rank 1 = highest mean cumulative reward; exact
/// ties share the smaller rank and the next rank skips. Duplicate
/// (algorithm, task) pairs are an error.
std::vector<RunSummary> rank_table(std::vector<RunSummary> summaries);

/// Mean rank per algorithm over the tasks it ran, ascending.
std::vector<std::pair<std::string, double>> mean_ranks(
    const std::vector<RunSummary>& ranked);

}  // namespace glcb
