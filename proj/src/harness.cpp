#include "glcb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "glcb/baselines.hpp"
#include "glcb/serialize.hpp"

namespace glcb {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

namespace {

class UniformPolicy : public Policy {
 public:
  UniformPolicy(int num_actions, std::uint64_t seed)
      : num_actions_(num_actions), rng_(Rng::stream(seed, "baseline-sampling")) {}

  std::string name() const override { return "uniform"; }
  int select(const Vec&) override { return uniform_select(num_actions_, rng_); }
  void observe(const Vec&, int, double) override {}

 private:
  int num_actions_;
  Rng rng_;
};

class LinearTsPolicy : public Policy {
 public:
  LinearTsPolicy(int context_dim, int num_actions, double ridge_lambda,
                 double noise_var, std::uint64_t seed)
      : posterior_(context_dim, num_actions, ridge_lambda, noise_var),
        rng_(Rng::stream(seed, "baseline-sampling")) {}

  std::string name() const override { return "linear_ts"; }
  int select(const Vec& x) override { return posterior_.select(x, rng_); }
  void observe(const Vec& x, int action, double reward) override {
    posterior_.update(x, action, reward);
  }

 private:
  LinearPosterior posterior_;
  Rng rng_;
};

class GlcbPolicy : public Policy {
 public:
  GlcbPolicy(GlcbConfig config, int num_actions, std::uint64_t seed)
      : agent_(std::move(config), num_actions, seed) {}

  std::string name() const override { return "glcb"; }
  int select(const Vec& x) override { return agent_.select_action(x); }
  void observe(const Vec& x, int action, double reward) override {
    agent_.observe(x, action, reward);
  }

 private:
  GlcbAgent agent_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec,
                                    const BanditTask& task,
                                    std::uint64_t seed) {
  const RewardKindInfo kind = task.reward_kind();
  if (spec.name == "uniform")
    return std::make_unique<UniformPolicy>(task.num_actions(), seed);
  if (spec.name == "linear_ts") {
    double ridge_lambda = 1.0;
    double noise_var = 0.25;
    if (spec.params.contains("ridge_lambda"))
      ridge_lambda = spec.params.at("ridge_lambda").get<double>();
    if (spec.params.contains("noise_var"))
      noise_var = spec.params.at("noise_var").get<double>();
    return std::make_unique<LinearTsPolicy>(task.context_dim(),
                                            task.num_actions(), ridge_lambda,
                                            noise_var, seed);
  }
  if (spec.name == "glcb") {
    json params = spec.params.is_null() ? json::object() : spec.params;
    if (params.contains("mode")) {
      const std::string mode = params.at("mode").get<std::string>();
      const bool task_bernoulli = kind.mode == RewardMode::kBernoulli;
      if ((mode == "bernoulli") != task_bernoulli)
        throw std::runtime_error("make_policy: policy mode '" + mode +
                                 "' does not match the task's reward kind");
    } else {
      params["mode"] =
          kind.mode == RewardMode::kBernoulli ? "bernoulli" : "continuous";
    }
    GlcbConfig cfg = glcb_config_from_json(params);
    if (cfg.mode == RewardMode::kContinuous &&
        !params.contains("r_min") && !params.contains("r_max")) {
      cfg.r_min = kind.r_min;
      cfg.r_max = kind.r_max;
    }
    if (cfg.gln.input_dim == 0) cfg.gln.input_dim = task.context_dim();
    return std::make_unique<GlcbPolicy>(std::move(cfg), task.num_actions(), seed);
  }
  throw std::runtime_error("make_policy: unknown policy '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

TaskSpec task_spec_from_json(const json& j) {
  TaskSpec spec;
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  if (j.contains("kind")) spec.kind = j.at("kind").get<std::string>();
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  if (j.contains("label_column"))
    spec.label_column = j.at("label_column").get<std::string>();
  if (j.contains("categorical_columns"))
    spec.categorical_columns =
        j.at("categorical_columns").get<std::vector<std::string>>();
  if (j.contains("reward_columns"))
    spec.reward_columns = j.at("reward_columns").get<std::vector<std::string>>();
  if (j.contains("horizon")) spec.horizon = j.at("horizon").get<long>();
  if (j.contains("wheel")) {
    const json& w = j.at("wheel");
    if (w.contains("delta")) spec.wheel.delta = w.at("delta").get<double>();
    if (w.contains("mu_low")) spec.wheel.mu_low = w.at("mu_low").get<double>();
    if (w.contains("mu_mid")) spec.wheel.mu_mid = w.at("mu_mid").get<double>();
    if (w.contains("mu_high")) spec.wheel.mu_high = w.at("mu_high").get<double>();
    if (w.contains("noise_sigma"))
      spec.wheel.noise_sigma = w.at("noise_sigma").get<double>();
    if (w.contains("reward_min"))
      spec.wheel.reward_min = w.at("reward_min").get<double>();
    if (w.contains("reward_max"))
      spec.wheel.reward_max = w.at("reward_max").get<double>();
  }
  return spec;
}

json task_spec_to_json(const TaskSpec& spec) {
  json j = {{"name", spec.name}};
  if (!spec.kind.empty()) j["kind"] = spec.kind;
  if (!spec.path.empty()) j["path"] = spec.path;
  if (!spec.label_column.empty()) j["label_column"] = spec.label_column;
  if (!spec.categorical_columns.empty())
    j["categorical_columns"] = spec.categorical_columns;
  if (!spec.reward_columns.empty()) j["reward_columns"] = spec.reward_columns;
  if (spec.horizon > 0) j["horizon"] = spec.horizon;
  if (spec.name == "wheel" || spec.kind == "wheel")
    j["wheel"] = {{"delta", spec.wheel.delta},
                  {"mu_low", spec.wheel.mu_low},
                  {"mu_mid", spec.wheel.mu_mid},
                  {"mu_high", spec.wheel.mu_high},
                  {"noise_sigma", spec.wheel.noise_sigma},
                  {"reward_min", spec.wheel.reward_min},
                  {"reward_max", spec.wheel.reward_max}};
  return j;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  cfg.task = task_spec_from_json(j.at("task"));
  const json& p = j.at("policy");
  cfg.policy.name = p.at("name").get<std::string>();
  cfg.policy.params = p.contains("params") ? p.at("params") : json::object();
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("horizon")) cfg.horizon_override = j.at("horizon").get<long>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("parallelism")) cfg.parallelism = j.at("parallelism").get<int>();
  return cfg;
}

json RunConfig::to_json() const {
  return {{"task", task_spec_to_json(task)},
          {"policy", {{"name", policy.name}, {"params", policy.params}}},
          {"seeds", seeds},
          {"horizon", horizon_override},
          {"out_dir", out_dir},
          {"parallelism", parallelism}};
}

void RunConfig::validate() const {
  if (task.name.empty() && task.kind.empty())
    throw std::runtime_error("RunConfig: task needs a name or kind");
  if (policy.name.empty()) throw std::runtime_error("RunConfig: policy name missing");
  if (seeds.empty()) throw std::runtime_error("RunConfig: seed list is empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw std::runtime_error("RunConfig: seeds must be distinct");
  if (out_dir.empty()) throw std::runtime_error("RunConfig: out_dir missing");
  if (parallelism < 1)
    throw std::runtime_error("RunConfig: parallelism must be >= 1");
  if (horizon_override < 0)
    throw std::runtime_error("RunConfig: horizon must be >= 0");
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

namespace {

// Shortest round-trip formatting, locale independent.
std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("CSV: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  return fields;
}

constexpr const char* kStepHeader = "seed,t,action,reward,cum_reward,optimal_reward";

}  // namespace

void write_step_csv(const std::string& path,
                    const std::vector<StepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_step_csv: cannot open " + path);
  out << kStepHeader << '\n';
  for (const auto& r : records)
    out << r.seed << ',' << r.t << ',' << r.action << ',' << fmt(r.reward)
        << ',' << fmt(r.cum_reward) << ',' << fmt(r.optimal_reward) << '\n';
}

std::vector<StepRecord> read_step_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_step_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kStepHeader))
    throw std::runtime_error("read_step_csv: bad header in " + path);
  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6)
      throw std::runtime_error("read_step_csv: bad row in " + path);
    StepRecord r;
    r.seed = static_cast<std::uint64_t>(std::stoull(f[0]));
    r.t = std::stol(f[1]);
    r.action = std::stoi(f[2]);
    r.reward = parse_double(f[3]);
    r.cum_reward = parse_double(f[4]);
    r.optimal_reward = parse_double(f[5]);
    records.push_back(r);
  }
  return records;
}

void write_summary_csv(const std::string& path,
                       const std::vector<RunSummary>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "algorithm,task,seeds,mean_cum_reward,stderr,rank\n";
  for (const auto& s : rows)
    out << s.algorithm << ',' << s.task << ',' << s.seeds << ','
        << fmt(s.mean_cum_reward) << ',' << fmt(s.stderr_mean) << ',' << s.rank
        << '\n';
}

std::vector<RunSummary> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_summary_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_summary_csv: empty file " + path);
  std::vector<RunSummary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6)
      throw std::runtime_error("read_summary_csv: bad row in " + path);
    rows.push_back({f[0], f[1], std::stoi(f[2]), parse_double(f[3]),
                    parse_double(f[4]), std::stoi(f[5])});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

namespace {

std::vector<StepRecord> run_one_seed(const RunConfig& config, std::uint64_t seed) {
  TaskSpec task_spec = config.task;
  if (config.horizon_override > 0) task_spec.horizon = config.horizon_override;
  const std::unique_ptr<BanditTask> task = make_task(task_spec, seed);
  const std::unique_ptr<Policy> policy = make_policy(config.policy, *task, seed);

  const long T = task->horizon();
  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(T));
  double cum = 0.0;
  for (long t = 1; t <= T; ++t) {
    const TaskStep step = task->next();
    const int action = policy->select(step.context);
    if (action < 0 || action >= task->num_actions())
      throw std::runtime_error("run: policy returned an invalid action");
    const double reward = step.rewards[action];
    policy->observe(step.context, action, reward);
    cum += reward;
    records.push_back({seed, t, action, reward, cum, step.rewards.maxCoeff()});
  }
  return records;
}

std::string step_file_name(std::uint64_t seed) {
  return "steps_seed" + std::to_string(seed) + ".csv";
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  save_json(config.to_json(), (fs::path(config.out_dir) / "run_config.json").string());

  const int workers =
      std::min<int>(config.parallelism, static_cast<int>(config.seeds.size()));
  std::vector<std::vector<StepRecord>> results(config.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.seeds.size()) return;
      try {
        results[i] = run_one_seed(config, config.seeds[i]);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  RunResult out;
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    const std::string path =
        (fs::path(config.out_dir) / step_file_name(config.seeds[i])).string();
    write_step_csv(path, results[i]);
    out.step_files.push_back(path);
  }

  std::vector<double> regret_curve;
  out.summary = summarize(out.step_files, config.policy.name, config.task.name,
                          &regret_curve);
  out.summary_file = (fs::path(config.out_dir) / "summary.csv").string();
  write_summary_csv(out.summary_file, {out.summary});

  std::ofstream regret((fs::path(config.out_dir) / "regret_curve.csv").string());
  regret << "t,mean_cum_regret\n";
  for (std::size_t t = 0; t < regret_curve.size(); ++t)
    regret << (t + 1) << ',' << fmt(regret_curve[t]) << '\n';
  return out;
}

RunSummary summarize(const std::vector<std::string>& step_files,
                     const std::string& algorithm, const std::string& task,
                     std::vector<double>* regret_curve) {
  if (step_files.empty()) throw std::runtime_error("summarize: no step files");
  std::vector<double> finals;
  std::vector<double> curve;
  for (const auto& path : step_files) {
    const std::vector<StepRecord> records = read_step_csv(path);
    if (records.empty())
      throw std::runtime_error("summarize: empty step file " + path);
    finals.push_back(records.back().cum_reward);
    if (regret_curve) {
      if (curve.size() < records.size()) curve.resize(records.size(), 0.0);
      double regret = 0.0;
      for (std::size_t i = 0; i < records.size(); ++i) {
        regret += records[i].optimal_reward - records[i].reward;
        curve[i] += regret;
      }
    }
  }
  RunSummary s;
  s.algorithm = algorithm;
  s.task = task;
  s.seeds = static_cast<int>(finals.size());
  double mean = 0.0;
  for (double v : finals) mean += v;
  mean /= static_cast<double>(finals.size());
  s.mean_cum_reward = mean;
  if (finals.size() > 1) {
    double ss = 0.0;
    for (double v : finals) ss += (v - mean) * (v - mean);
    const double stdev = std::sqrt(ss / static_cast<double>(finals.size() - 1));
    s.stderr_mean = stdev / std::sqrt(static_cast<double>(finals.size()));
  }
  if (regret_curve) {
    for (double& v : curve) v /= static_cast<double>(finals.size());
    *regret_curve = std::move(curve);
  }
  return s;
}

RunSummary summarize_dir(const std::string& dir) {
  const json cfg_json = load_json((fs::path(dir) / "run_config.json").string());
  const RunConfig config = RunConfig::from_json(cfg_json);
  std::vector<std::string> files;
  for (std::uint64_t seed : config.seeds) {
    const std::string path = (fs::path(dir) / step_file_name(seed)).string();
    if (!fs::exists(path))
      throw std::runtime_error("summarize_dir: missing step file " + path);
    files.push_back(path);
  }
  std::vector<double> regret_curve;
  RunSummary summary =
      summarize(files, config.policy.name, config.task.name, &regret_curve);
  write_summary_csv((fs::path(dir) / "summary.csv").string(), {summary});
  std::ofstream regret((fs::path(dir) / "regret_curve.csv").string());
  regret << "t,mean_cum_regret\n";
  for (std::size_t t = 0; t < regret_curve.size(); ++t)
    regret << (t + 1) << ',' << fmt(regret_curve[t]) << '\n';
  return summary;
}

std::vector<RunSummary> rank_table(std::vector<RunSummary> summaries) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : summaries)
    if (!seen.insert({s.algorithm, s.task}).second)
      throw std::runtime_error("rank_table: duplicate (algorithm, task) pair " +
                               s.algorithm + "/" + s.task);
  std::map<std::string, std::vector<RunSummary*>> by_task;
  for (auto& s : summaries) by_task[s.task].push_back(&s);
  for (auto& [task, rows] : by_task) {
    std::sort(rows.begin(), rows.end(), [](const RunSummary* a, const RunSummary* b) {
      return a->mean_cum_reward > b->mean_cum_reward;
    });
    // Exact ties share the smaller rank; the next rank skips.
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i]->mean_cum_reward == rows[i - 1]->mean_cum_reward)
        rows[i]->rank = rows[i - 1]->rank;
      else
        rows[i]->rank = static_cast<int>(i) + 1;
    }
  }
  return summaries;
}

std::vector<std::pair<std::string, double>> mean_ranks(
    const std::vector<RunSummary>& ranked) {
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& s : ranked) {
    acc[s.algorithm].first += s.rank;
    acc[s.algorithm].second += 1;
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [algo, sum_count] : acc)
    out.emplace_back(algo, sum_count.first / sum_count.second);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second < b.second || (a.second == b.second && a.first < b.first);
  });
  return out;
}

}  // namespace glcb
