// glcb: run bandit experiments, summarize their outputs, and rank policies.
//
//   glcb run --config cfg.json [--seeds a..b] [--out dir]
//   glcb summarize <dir>
//   glcb rank <summary.csv>...

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "glcb/harness.hpp"
#include "glcb/serialize.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const std::size_t dots = text.find("..");
  if (dots == std::string::npos)
    return {static_cast<std::uint64_t>(std::stoull(text))};
  const std::uint64_t lo = std::stoull(text.substr(0, dots));
  const std::uint64_t hi = std::stoull(text.substr(dots + 2));
  if (hi < lo) throw std::runtime_error("--seeds: empty range " + text);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

void print_summary(const glcb::RunSummary& s) {
  std::cout << s.algorithm << " on " << s.task << ": mean cumulative reward "
            << s.mean_cum_reward << " +/- " << s.stderr_mean << " over "
            << s.seeds << " seeds\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gated linear contextual bandit benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed_range;
  std::string out_dir;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one policy/task config");
  run_cmd->add_option("--config", config_path, "Run config JSON")->required();
  run_cmd->add_option("--seeds", seed_range, "Seed range a..b (overrides config)");
  run_cmd->add_option("--out", out_dir, "Output directory (overrides config)");

  std::string summarize_dir_arg;
  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Recompute the summary of a run directory");
  summarize_cmd->add_option("dir", summarize_dir_arg, "Run directory")->required();

  std::vector<std::string> summary_files;
  CLI::App* rank_cmd =
      app.add_subcommand("rank", "Rank policies across summary files");
  rank_cmd->add_option("files", summary_files, "summary.csv files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      glcb::RunConfig config = glcb::RunConfig::from_json(glcb::load_json(config_path));
      if (!seed_range.empty()) config.seeds = parse_seed_range(seed_range);
      if (!out_dir.empty()) config.out_dir = out_dir;
      const glcb::RunResult result = glcb::run(config);
      print_summary(result.summary);
      std::cout << "outputs in " << config.out_dir << "\n";
    } else if (summarize_cmd->parsed()) {
      print_summary(glcb::summarize_dir(summarize_dir_arg));
    } else if (rank_cmd->parsed()) {
      std::vector<glcb::RunSummary> rows;
      for (const auto& path : summary_files)
        for (auto& row : glcb::read_summary_csv(path)) rows.push_back(row);
      const auto ranked = glcb::rank_table(std::move(rows));
      std::cout << "algorithm,task,mean_cum_reward,stderr,rank\n";
      for (const auto& s : ranked)
        std::cout << s.algorithm << ',' << s.task << ',' << s.mean_cum_reward
                  << ',' << s.stderr_mean << ',' << s.rank << '\n';
      std::cout << "\nalgorithm,mean_rank\n";
      for (const auto& [algo, rank] : glcb::mean_ranks(ranked))
        std::cout << algo << ',' << rank << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
