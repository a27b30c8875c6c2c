#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "glcb/agent.hpp"
#include "glcb/ctree.hpp"
#include "glcb/gating.hpp"
#include "glcb/gln.hpp"
#include "glcb/pseudocount.hpp"

namespace glcb {

using Json = nlohmann::json;

Json gating_to_json(const GatingSet& gset);
GatingSet gating_from_json(const Json& j);

Json gln_config_to_json(const GlnConfig& cfg);
GlnConfig gln_config_from_json(const Json& j);

Json gln_params_to_json(const GlnParams& params);
GlnParams gln_params_from_json(const Json& j);

Json counts_to_json(const CountTable& table);
CountTable counts_from_json(const Json& j);

/// Tree snapshot: depth, range, per-node gating and parameters in address
/// order.
Json tree_to_json(const RewardTree& tree);
RewardTree tree_from_json(const Json& j);

/// Agent config. Emits canonical snake_case keys; parsing also accepts the
/// benchmark hyperparameter-table row names ("UCB exploration bonus",
/// "number of hyperplanes per unit", ...) so such files round-trip.
Json glcb_config_to_json(const GlcbConfig& cfg);
GlcbConfig glcb_config_from_json(const Json& j);

/// Full agent snapshot (config + gating + estimators + counts + step), one
/// self-contained document.
Json agent_to_json(const GlcbAgent& agent);
GlcbAgent agent_from_json(const Json& j);

void save_json(const Json& j, const std::string& path);
Json load_json(const std::string& path);

}  // namespace glcb
