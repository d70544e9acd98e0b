#pragma once

#include <string>
#include <string_view>

#include "json.hpp"  // vendored nlohmann/json

#include "cpsrl/fmdp.hpp"
#include "cpsrl/graph.hpp"
#include "cpsrl/posterior.hpp"

namespace cpsrl {

// Graphs serialize as {"d_x": ..., "d_y": ..., "parents": [[...], ...]}.
nlohmann::json graph_to_json(const CausalGraph& g);
CausalGraph graph_from_json(const nlohmann::json& j);

nlohmann::json fmdp_to_json(const Fmdp& f);
Fmdp fmdp_from_json(const nlohmann::json& j);

// Per factor: candidate scopes, log-weights, Dirichlet tables, Beta tables.
nlohmann::json hierarchy_snapshot(const Hierarchy& h);

std::string update_mode_name(UpdateMode mode);
UpdateMode update_mode_from_name(std::string_view name);

}  // namespace cpsrl
