#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "glcb/harness.hpp"
#include "glcb/serialize.hpp"

using namespace glcb;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
  const auto path = fs::temp_directory_path() / name;
  fs::remove_all(path);
  fs::create_directories(path);
  return path.string();
}

std::string write_class_csv(const std::string& name, int rows, int classes) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << "f1,f2,label\n";
  for (int i = 0; i < rows; ++i)
    out << (i % 29) / 29.0 << ',' << (i % 31) / 31.0 << ',' << i % classes << '\n';
  return path.string();
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig uniform_on_csv(const std::string& csv, const std::string& out,
                         std::vector<std::uint64_t> seeds, long horizon = 0) {
  RunConfig cfg;
  cfg.task.name = "toy7";
  cfg.task.kind = "classification";
  cfg.task.path = csv;
  cfg.policy.name = "uniform";
  cfg.policy.params = nlohmann::json::object();
  cfg.seeds = std::move(seeds);
  cfg.horizon_override = horizon;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("harness: config validation") {
  RunConfig cfg = uniform_on_csv("x.csv", "out", {1, 2, 3});
  CHECK_NOTHROW(cfg.validate());
  SUBCASE("duplicate seeds rejected") {
    cfg.seeds = {1, 1};
    CHECK_THROWS(cfg.validate());
  }
  SUBCASE("empty seeds rejected") {
    cfg.seeds.clear();
    CHECK_THROWS(cfg.validate());
  }
  SUBCASE("missing out dir rejected") {
    cfg.out_dir.clear();
    CHECK_THROWS(cfg.validate());
  }
  SUBCASE("json round-trip") {
    cfg.policy.params = {{"mode", "bernoulli"}};
    const RunConfig back = RunConfig::from_json(cfg.to_json());
    CHECK(back.task.name == cfg.task.name);
    CHECK(back.task.path == cfg.task.path);
    CHECK(back.seeds == cfg.seeds);
    CHECK(back.policy.name == cfg.policy.name);
    CHECK(back.policy.params == cfg.policy.params);
  }
}

TEST_CASE("harness: step csv round-trip") {
  const std::vector<StepRecord> records = {
      {1, 1, 0, 1.0, 1.0, 1.0},
      {1, 2, 3, 0.0, 1.0, 1.0},
      {1, 3, 2, 0.25, 1.25, 0.75},
  };
  const auto path = (fs::temp_directory_path() / "glcb_steps.csv").string();
  write_step_csv(path, records);
  const auto back = read_step_csv(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].t == records[i].t);
    CHECK(back[i].action == records[i].action);
    CHECK(back[i].reward == records[i].reward);
    CHECK(back[i].cum_reward == records[i].cum_reward);
    CHECK(back[i].optimal_reward == records[i].optimal_reward);
  }
  CHECK_THROWS(read_step_csv("/nonexistent/steps.csv"));
}

TEST_CASE("harness: uniform policy on a 7-class dataset scores about T/7") {
  const std::string csv = write_class_csv("glcb_h7.csv", 2100, 7);
  const std::string out = temp_dir("glcb_run_u7");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const RunConfig cfg = uniform_on_csv(csv, out, seeds);
  const RunResult result = run(cfg);
  CHECK(result.summary.seeds == 20);
  const double expect = 2100.0 / 7.0;
  CHECK(result.summary.mean_cum_reward > expect * 0.95);
  CHECK(result.summary.mean_cum_reward < expect * 1.05);
}

TEST_CASE("harness: horizon override limits row counts") {
  const std::string csv = write_class_csv("glcb_hh.csv", 200, 3);
  const std::string out = temp_dir("glcb_run_h10");
  const RunConfig cfg = uniform_on_csv(csv, out, {4, 9}, /*horizon=*/10);
  const RunResult result = run(cfg);
  for (const auto& file : result.step_files)
    CHECK(read_step_csv(file).size() == 10);
}

TEST_CASE("harness: reruns are byte-identical and parallelism-invariant") {
  const std::string csv = write_class_csv("glcb_hdet.csv", 300, 4);
  const std::string out1 = temp_dir("glcb_run_det1");
  const std::string out2 = temp_dir("glcb_run_det2");
  const std::string out3 = temp_dir("glcb_run_det3");

  RunConfig cfg = uniform_on_csv(csv, out1, {1, 2, 3, 4, 5, 6}, 50);
  cfg.policy.name = "linear_ts";
  const RunResult r1 = run(cfg);
  cfg.out_dir = out2;
  const RunResult r2 = run(cfg);
  cfg.out_dir = out3;
  cfg.parallelism = 4;
  const RunResult r3 = run(cfg);

  REQUIRE(r1.step_files.size() == r2.step_files.size());
  for (std::size_t i = 0; i < r1.step_files.size(); ++i) {
    CHECK(file_bytes(r1.step_files[i]) == file_bytes(r2.step_files[i]));
    CHECK(file_bytes(r1.step_files[i]) == file_bytes(r3.step_files[i]));
  }
  CHECK(file_bytes(r1.summary_file) == file_bytes(r3.summary_file));
}

TEST_CASE("harness: pseudo-regret proxy is nondecreasing in every step file") {
  const std::string out = temp_dir("glcb_run_regret");
  RunConfig cfg;
  cfg.task.name = "wheel";
  cfg.task.wheel.horizon = 120;
  cfg.policy.name = "uniform";
  cfg.seeds = {3, 5};
  cfg.out_dir = out;
  const RunResult result = run(cfg);
  for (const auto& file : result.step_files) {
    double regret = 0.0;
    double prev = 0.0;
    for (const auto& rec : read_step_csv(file)) {
      CHECK(rec.optimal_reward >= rec.reward);
      regret += rec.optimal_reward - rec.reward;
      CHECK(regret >= prev - 1e-12);
      prev = regret;
    }
  }
  SUBCASE("summarize_dir recomputes the same summary") {
    const RunSummary again = summarize_dir(out);
    CHECK(again.mean_cum_reward == result.summary.mean_cum_reward);
    CHECK(again.stderr_mean == result.summary.stderr_mean);
  }
}

TEST_CASE("harness: policy/task compatibility is validated") {
  const std::string out = temp_dir("glcb_run_mismatch");
  RunConfig cfg;
  cfg.task.name = "wheel";  // continuous rewards
  cfg.policy.name = "glcb";
  cfg.policy.params = {{"mode", "bernoulli"}};
  cfg.seeds = {1};
  cfg.out_dir = out;
  CHECK_THROWS(run(cfg));
  SUBCASE("unknown policy") {
    cfg.policy.name = "mystery";
    CHECK_THROWS(run(cfg));
  }
}

TEST_CASE("harness: summarize statistics") {
  // Two synthetic seeds with final cumulative rewards 4 and 6.
  const auto dir = fs::temp_directory_path() / "glcb_sumstats";
  fs::create_directories(dir);
  const std::string f1 = (dir / "steps_seed1.csv").string();
  const std::string f2 = (dir / "steps_seed2.csv").string();
  write_step_csv(f1, {{1, 1, 0, 4.0, 4.0, 4.0}});
  write_step_csv(f2, {{2, 1, 0, 6.0, 6.0, 6.0}});

  const RunSummary s = summarize({f1, f2}, "algo", "task");
  CHECK(s.mean_cum_reward == doctest::Approx(5.0));
  CHECK(s.stderr_mean == doctest::Approx(1.0));  // stdev sqrt(2) / sqrt(2)

  SUBCASE("single seed has zero standard error") {
    const RunSummary one = summarize({f1}, "algo", "task");
    CHECK(one.stderr_mean == 0.0);
  }
  SUBCASE("missing file is an error") {
    CHECK_THROWS(summarize({f1, (dir / "steps_seed3.csv").string()}, "a", "t"));
  }
  SUBCASE("empty input is an error") {
    CHECK_THROWS(summarize({}, "a", "t"));
  }
}

TEST_CASE("harness: rank table") {
  const auto mk = [](const std::string& algo, const std::string& task, double score) {
    RunSummary s;
    s.algorithm = algo;
    s.task = task;
    s.seeds = 1;
    s.mean_cum_reward = score;
    return s;
  };
  SUBCASE("two algorithms on one task") {
    auto ranked = rank_table({mk("a", "t1", 10.0), mk("b", "t1", 5.0)});
    CHECK(ranked[0].rank == 1);
    CHECK(ranked[1].rank == 2);
  }
  SUBCASE("exact ties share the smaller rank and the next rank skips") {
    auto ranked = rank_table(
        {mk("a", "t1", 7.0), mk("b", "t1", 7.0), mk("c", "t1", 3.0)});
    int rank_a = 0, rank_b = 0, rank_c = 0;
    for (const auto& s : ranked) {
      if (s.algorithm == "a") rank_a = s.rank;
      if (s.algorithm == "b") rank_b = s.rank;
      if (s.algorithm == "c") rank_c = s.rank;
    }
    CHECK(rank_a == 1);
    CHECK(rank_b == 1);
    CHECK(rank_c == 3);
  }
  SUBCASE("mean rank across tasks") {
    auto ranked = rank_table({mk("a", "t1", 2.0), mk("b", "t1", 1.0),
                              mk("a", "t2", 2.0), mk("b", "t2", 1.0),
                              mk("a", "t3", 1.0), mk("b", "t3", 2.0)});
    const auto means = mean_ranks(ranked);
    REQUIRE(means.size() == 2);
    CHECK(means[0].first == "a");
    CHECK(means[0].second == doctest::Approx((1.0 + 1.0 + 2.0) / 3.0));
    CHECK(means[1].first == "b");
  }
  SUBCASE("duplicate pair is an error") {
    CHECK_THROWS(rank_table({mk("a", "t1", 1.0), mk("a", "t1", 2.0)}));
  }
}

TEST_CASE("harness: summaries are invariant to seed order") {
  const std::string csv = write_class_csv("glcb_hord.csv", 120, 3);
  RunConfig cfg = uniform_on_csv(csv, temp_dir("glcb_run_ord1"), {1, 2, 3}, 40);
  const RunSummary a = run(cfg).summary;
  cfg.seeds = {3, 1, 2};
  cfg.out_dir = temp_dir("glcb_run_ord2");
  const RunSummary b = run(cfg).summary;
  CHECK(a.mean_cum_reward == b.mean_cum_reward);
  CHECK(a.stderr_mean == b.stderr_mean);
}

TEST_CASE("harness: glcb continuous mode runs on a regression csv") {
  const auto path = fs::temp_directory_path() / "glcb_hreg.csv";
  {
    std::ofstream out(path);
    out << "f1,f2,r0,r1,r2\n";
    for (int i = 0; i < 250; ++i) {
      const double x1 = (i % 17) / 17.0;
      const double x2 = (i % 23) / 23.0;
      out << x1 << ',' << x2 << ',' << x1 * 0.8 << ',' << x2 * 0.9 << ','
          << 0.3 << '\n';
    }
  }
  RunConfig cfg;
  cfg.task.name = "toyreg";
  cfg.task.kind = "regression";
  cfg.task.path = path.string();
  cfg.task.reward_columns = {"r0", "r1", "r2"};
  cfg.policy.name = "glcb";
  cfg.policy.params = {{"network_shape", {8, 4, 1}}, {"tree_depth", 2}};
  cfg.seeds = {1, 2};
  cfg.out_dir = temp_dir("glcb_run_reg");
  const RunResult result = run(cfg);
  CHECK(result.summary.seeds == 2);
  CHECK(result.summary.mean_cum_reward > 0.0);
  for (const auto& file : result.step_files) {
    for (const auto& rec : read_step_csv(file)) {
      CHECK(rec.reward >= 0.0);
      CHECK(rec.reward <= 1.0);
      CHECK(rec.optimal_reward >= rec.reward);
    }
  }
}

TEST_CASE("harness: glcb policy runs end to end on a small dataset") {
  const std::string csv = write_class_csv("glcb_hglcb.csv", 400, 3);
  const std::string out = temp_dir("glcb_run_glcb");
  RunConfig cfg;
  cfg.task.name = "toy3";
  cfg.task.kind = "classification";
  cfg.task.path = csv;
  cfg.policy.name = "glcb";
  cfg.policy.params = {{"network_shape", {8, 4, 1}}, {"planes_per_unit", 3}};
  cfg.seeds = {1, 2};
  cfg.horizon_override = 150;
  cfg.out_dir = out;
  const RunResult result = run(cfg);
  CHECK(result.summary.seeds == 2);
  CHECK(result.summary.mean_cum_reward > 0.0);
  CHECK(fs::exists(fs::path(out) / "run_config.json"));
  CHECK(fs::exists(fs::path(out) / "regret_curve.csv"));
}
