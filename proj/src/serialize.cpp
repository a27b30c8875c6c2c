#include "glcb/serialize.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace glcb {

namespace {

constexpr int kSnapshotVersion = 1;

void check_version(const Json& j, const char* kind) {
  if (!j.contains("version") || j.at("version").get<int>() != kSnapshotVersion)
    throw std::runtime_error(std::string(kind) + ": unsupported snapshot version");
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec vec_from_json(const Json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

/// Accepts the canonical key or its hyperparameter-table alias.
const Json* find_key(const Json& j, const char* canonical, const char* alias) {
  if (j.contains(canonical)) return &j.at(canonical);
  if (alias != nullptr && j.contains(alias)) return &j.at(alias);
  return nullptr;
}

template <typename T>
void read_key(const Json& j, const char* canonical, const char* alias, T& out) {
  if (const Json* v = find_key(j, canonical, alias)) out = v->get<T>();
}

}  // namespace

Json gating_to_json(const GatingSet& gset) {
  Json units = Json::array();
  for (const auto& unit : gset.units()) {
    Json planes = Json::array();
    for (const auto& plane : unit.planes)
      planes.push_back({{"normal", vec_to_json(plane.normal)},
                        {"offset", plane.offset}});
    units.push_back({{"planes", std::move(planes)}});
  }
  return {{"version", kSnapshotVersion},
          {"kind", "gating_set"},
          {"dim", gset.dim()},
          {"units", std::move(units)}};
}

GatingSet gating_from_json(const Json& j) {
  check_version(j, "gating_from_json");
  std::vector<GatingUnit> units;
  for (const auto& ju : j.at("units")) {
    GatingUnit unit;
    for (const auto& jp : ju.at("planes"))
      unit.planes.push_back(
          {vec_from_json(jp.at("normal")), jp.at("offset").get<double>()});
    units.push_back(std::move(unit));
  }
  return GatingSet(std::move(units), j.at("dim").get<int>());
}

Json gln_config_to_json(const GlnConfig& cfg) {
  return {{"layer_widths", cfg.layer_widths}, {"input_dim", cfg.input_dim},
          {"eps", cfg.eps},                   {"beta", cfg.beta},
          {"weight_bound", cfg.weight_bound}};
}

GlnConfig gln_config_from_json(const Json& j) {
  GlnConfig cfg;
  read_key(j, "layer_widths", "GLN network shape", cfg.layer_widths);
  j.at("input_dim").get_to(cfg.input_dim);
  read_key(j, "eps", nullptr, cfg.eps);
  read_key(j, "beta", nullptr, cfg.beta);
  read_key(j, "weight_bound", nullptr, cfg.weight_bound);
  cfg.validate();
  return cfg;
}

Json gln_params_to_json(const GlnParams& params) {
  Json layers = Json::array();
  for (int i = 0; i < params.config().layer_count(); ++i) {
    const RowMatrix& table = params.layer_table(i);
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < table.cols(); ++c) row.push_back(table(r, c));
      rows.push_back(std::move(row));
    }
    layers.push_back(std::move(rows));
  }
  return {{"version", kSnapshotVersion},
          {"kind", "gln_params"},
          {"config", gln_config_to_json(params.config())},
          {"signature_count", params.signature_count()},
          {"layers", std::move(layers)}};
}

GlnParams gln_params_from_json(const Json& j) {
  check_version(j, "gln_params_from_json");
  GlnParams params(gln_config_from_json(j.at("config")),
                   j.at("signature_count").get<std::uint32_t>());
  const Json& layers = j.at("layers");
  if (static_cast<int>(layers.size()) != params.config().layer_count())
    throw std::runtime_error("gln_params_from_json: layer count mismatch");
  for (int i = 0; i < params.config().layer_count(); ++i) {
    RowMatrix& table = params.layer_table(i);
    const Json& rows = layers[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(rows.size()) != table.rows())
      throw std::runtime_error("gln_params_from_json: row count mismatch");
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
      const Json& row = rows[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != table.cols())
        throw std::runtime_error("gln_params_from_json: row length mismatch");
      for (Eigen::Index c = 0; c < table.cols(); ++c)
        table(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return params;
}

Json counts_to_json(const CountTable& table) {
  Json pulls = Json::array();
  for (int a = 0; a < table.num_actions(); ++a) pulls.push_back(table.pulls(a));
  Json entries = Json::array();
  for (const auto& e : table.entries()) entries.push_back({e[0], e[1], e[2], e[3]});
  return {{"version", kSnapshotVersion}, {"kind", "count_table"},
          {"units", table.unit_count()}, {"step", table.step()},
          {"pulls", std::move(pulls)},   {"entries", std::move(entries)}};
}

CountTable counts_from_json(const Json& j) {
  check_version(j, "counts_from_json");
  const Json& pulls = j.at("pulls");
  CountTable table(j.at("units").get<int>(), static_cast<int>(pulls.size()));
  for (int a = 0; a < static_cast<int>(pulls.size()); ++a)
    table.set_pulls(a, pulls[static_cast<std::size_t>(a)].get<std::uint64_t>());
  for (const auto& e : j.at("entries"))
    table.set_entry(e[0].get<int>(), e[1].get<std::uint32_t>(), e[2].get<int>(),
                    e[3].get<std::uint64_t>());
  table.set_step(j.at("step").get<std::uint64_t>());
  return table;
}

Json tree_to_json(const RewardTree& tree) {
  Json nodes = Json::array();
  for (int n = 0; n < tree.node_count(); ++n)
    nodes.push_back(
        {{"gating", gating_to_json((*tree.node_gating)[static_cast<std::size_t>(n)])},
         {"params", gln_params_to_json(tree.nodes[static_cast<std::size_t>(n)])}});
  return {{"version", kSnapshotVersion},
          {"kind", "reward_tree"},
          {"depth", tree.depth},
          {"r_min", tree.r_min},
          {"r_max", tree.r_max},
          {"nodes", std::move(nodes)}};
}

RewardTree tree_from_json(const Json& j) {
  check_version(j, "tree_from_json");
  RewardTree tree;
  tree.depth = j.at("depth").get<int>();
  tree.r_min = j.at("r_min").get<double>();
  tree.r_max = j.at("r_max").get<double>();
  auto gating = std::make_shared<TreeGating>();
  const Json& nodes = j.at("nodes");
  if (static_cast<int>(nodes.size()) != tree.node_count())
    throw std::runtime_error("tree_from_json: node count mismatch");
  for (const auto& jn : nodes) {
    gating->push_back(gating_from_json(jn.at("gating")));
    tree.nodes.push_back(gln_params_from_json(jn.at("params")));
  }
  tree.node_gating = std::move(gating);
  tree.midpoints = midpoints(tree.depth, tree.r_min, tree.r_max);
  return tree;
}

Json glcb_config_to_json(const GlcbConfig& cfg) {
  Json j = {{"mode", cfg.mode == RewardMode::kBernoulli ? "bernoulli" : "continuous"},
            {"exploration_c", cfg.exploration_c},
            {"lr_init", cfg.lr_init},
            {"lr_decay", cfg.lr_decay},
            {"switching_init", cfg.switching_init},
            {"switching_decay", cfg.switching_decay},
            {"planes_per_unit", cfg.planes_per_unit},
            {"bias_scale", cfg.bias_scale},
            {"network_shape", cfg.gln.layer_widths},
            {"eps", cfg.gln.eps},
            {"beta", cfg.gln.beta},
            {"weight_bound", cfg.gln.weight_bound},
            {"input_dim", cfg.gln.input_dim}};
  if (cfg.mode == RewardMode::kContinuous) {
    j["tree_depth"] = cfg.tree_depth;
    j["r_min"] = cfg.r_min;
    j["r_max"] = cfg.r_max;
  }
  return j;
}

GlcbConfig glcb_config_from_json(const Json& j) {
  std::string mode = "bernoulli";
  read_key(j, "mode", nullptr, mode);
  GlcbConfig cfg;
  if (mode == "bernoulli") {
    cfg = GlcbConfig::bernoulli_defaults();
  } else if (mode == "continuous") {
    cfg = GlcbConfig::continuous_defaults();
  } else {
    throw std::runtime_error("glcb config: unknown mode '" + mode + "'");
  }
  read_key(j, "exploration_c", "UCB exploration bonus", cfg.exploration_c);
  read_key(j, "lr_init", "initial learning rate", cfg.lr_init);
  read_key(j, "lr_decay", "learning rate decay parameter", cfg.lr_decay);
  read_key(j, "switching_init", "initial switching rate", cfg.switching_init);
  read_key(j, "switching_decay", "switching rate decay parameter", cfg.switching_decay);
  read_key(j, "planes_per_unit", "number of hyperplanes per unit", cfg.planes_per_unit);
  read_key(j, "bias_scale", "bias scale", cfg.bias_scale);
  read_key(j, "network_shape", "GLN network shape", cfg.gln.layer_widths);
  read_key(j, "eps", nullptr, cfg.gln.eps);
  read_key(j, "beta", nullptr, cfg.gln.beta);
  read_key(j, "weight_bound", nullptr, cfg.gln.weight_bound);
  read_key(j, "input_dim", nullptr, cfg.gln.input_dim);
  read_key(j, "tree_depth", "tree depth", cfg.tree_depth);
  read_key(j, "r_min", nullptr, cfg.r_min);
  read_key(j, "r_max", nullptr, cfg.r_max);
  return cfg;
}

Json agent_to_json(const GlcbAgent& agent) {
  Json j = {{"version", kSnapshotVersion},
            {"kind", "glcb_agent"},
            {"config", glcb_config_to_json(agent.config())},
            {"num_actions", agent.num_actions()},
            {"t", agent.step()},
            {"counts", counts_to_json(agent.counts())}};
  if (agent.config().mode == RewardMode::kBernoulli) {
    j["gating"] = gating_to_json(agent.gating());
    Json estimators = Json::array();
    for (int a = 0; a < agent.num_actions(); ++a)
      estimators.push_back(gln_params_to_json(agent.gln_params(a)));
    j["estimators"] = std::move(estimators);
  } else {
    Json gating = Json::array();
    for (const auto& gset : *agent.node_gating())
      gating.push_back(gating_to_json(gset));
    j["node_gating"] = std::move(gating);
    Json estimators = Json::array();
    for (int a = 0; a < agent.num_actions(); ++a) {
      Json nodes = Json::array();
      for (const auto& params : agent.tree(a).nodes)
        nodes.push_back(gln_params_to_json(params));
      estimators.push_back({{"nodes", std::move(nodes)}});
    }
    j["estimators"] = std::move(estimators);
  }
  return j;
}

GlcbAgent agent_from_json(const Json& j) {
  check_version(j, "agent_from_json");
  GlcbConfig cfg = glcb_config_from_json(j.at("config"));
  const int num_actions = j.at("num_actions").get<int>();
  CountTable counts = counts_from_json(j.at("counts"));
  const std::uint64_t t = j.at("t").get<std::uint64_t>();

  if (cfg.mode == RewardMode::kBernoulli) {
    std::vector<GlnParams> glns;
    for (const auto& je : j.at("estimators"))
      glns.push_back(gln_params_from_json(je));
    return GlcbAgent::restore(std::move(cfg), num_actions,
                              gating_from_json(j.at("gating")), nullptr,
                              std::move(glns), {}, std::move(counts), t);
  }
  auto gating = std::make_shared<TreeGating>();
  for (const auto& jg : j.at("node_gating"))
    gating->push_back(gating_from_json(jg));
  std::vector<std::vector<GlnParams>> trees;
  for (const auto& je : j.at("estimators")) {
    std::vector<GlnParams> nodes;
    for (const auto& jn : je.at("nodes"))
      nodes.push_back(gln_params_from_json(jn));
    trees.push_back(std::move(nodes));
  }
  return GlcbAgent::restore(std::move(cfg), num_actions, GatingSet(),
                            std::move(gating), {}, std::move(trees),
                            std::move(counts), t);
}

void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_json: cannot open " + path);
  out << j.dump(2) << '\n';
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_json: cannot open " + path);
  Json j;
  in >> j;
  return j;
}

}  // namespace glcb
