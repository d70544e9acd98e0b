#include "cpsrl/serialize.hpp"

#include <stdexcept>

namespace cpsrl {

using nlohmann::json;

json graph_to_json(const CausalGraph& g) {
  return json{{"d_x", g.d_x}, {"d_y", g.d_y}, {"parents", g.parents}};
}

CausalGraph graph_from_json(const json& j) {
  CausalGraph g;
  g.d_x = j.at("d_x").get<int>();
  g.d_y = j.at("d_y").get<int>();
  g.parents = j.at("parents").get<std::vector<Scope>>();
  g.check();
  return g;
}

json fmdp_to_json(const Fmdp& f) {
  json transition = json::array();
  json reward = json::array();
  for (int j = 0; j < f.graph.d_y; ++j) {
    const long long rows = f.factor_rows(j);
    const int n = f.outcome_support(j);
    json factor_rows = json::array();
    for (long long row = 0; row < rows; ++row) {
      json probs = json::array();
      for (int v = 0; v < n; ++v) {
        probs.push_back(f.transition[static_cast<std::size_t>(j)]
                                     [static_cast<std::size_t>(row * n + v)]);
      }
      factor_rows.push_back(std::move(probs));
    }
    transition.push_back(std::move(factor_rows));
    reward.push_back(f.reward[static_cast<std::size_t>(j)]);
  }
  return json{{"graph", graph_to_json(f.graph)},
              {"supports", f.supports},
              {"action_vars", f.action_vars},
              {"max_parents", f.max_parents},
              {"horizon", f.horizon},
              {"bernoulli_rewards", f.bernoulli_rewards},
              {"transition", std::move(transition)},
              {"reward", std::move(reward)},
              {"initial", f.initial}};
}

Fmdp fmdp_from_json(const json& j) {
  Fmdp f;
  f.graph = graph_from_json(j.at("graph"));
  f.supports = j.at("supports").get<std::vector<int>>();
  f.action_vars = j.at("action_vars").get<int>();
  f.max_parents = j.at("max_parents").get<int>();
  f.horizon = j.at("horizon").get<int>();
  f.bernoulli_rewards = j.value("bernoulli_rewards", false);
  const json& transition = j.at("transition");
  const json& reward = j.at("reward");
  f.transition.resize(static_cast<std::size_t>(f.graph.d_y));
  f.reward.resize(static_cast<std::size_t>(f.graph.d_y));
  for (int factor = 0; factor < f.graph.d_y; ++factor) {
    const json& rows = transition.at(static_cast<std::size_t>(factor));
    std::vector<double>& table = f.transition[static_cast<std::size_t>(factor)];
    for (const json& row : rows) {
      for (const json& p : row) table.push_back(p.get<double>());
    }
    f.reward[static_cast<std::size_t>(factor)] =
        reward.at(static_cast<std::size_t>(factor)).get<std::vector<double>>();
  }
  f.initial = j.at("initial").get<std::vector<double>>();
  const std::vector<std::string> violations = validate(f);
  if (!violations.empty()) {
    throw std::invalid_argument("fmdp_from_json: " + violations.front());
  }
  return f;
}

json hierarchy_snapshot(const Hierarchy& h) {
  json factors = json::array();
  for (const FactorHyper& fh : h.factors) {
    json dirichlet = json::array();
    json beta = json::array();
    for (const FactorPosterior& fp : fh.posteriors) {
      json rows = json::array();
      for (const DirichletRow& row : fp.transitions) rows.push_back(row.alpha);
      dirichlet.push_back(std::move(rows));
      json reward_rows = json::array();
      for (const BetaRow& row : fp.rewards) {
        reward_rows.push_back(json::array({row.a, row.b}));
      }
      beta.push_back(std::move(reward_rows));
    }
    factors.push_back(json{{"candidates", fh.candidates},
                           {"log_weights", fh.log_weight},
                           {"dirichlet", std::move(dirichlet)},
                           {"beta", std::move(beta)}});
  }
  return json{{"mode", update_mode_name(h.mode)},
              {"supports", h.supports},
              {"max_parents", h.max_parents},
              {"factors", std::move(factors)}};
}

std::string update_mode_name(UpdateMode mode) {
  return mode == UpdateMode::kExactBayes ? "exact-bayes" : "paper-literal";
}

UpdateMode update_mode_from_name(std::string_view name) {
  if (name == "exact-bayes") return UpdateMode::kExactBayes;
  if (name == "paper-literal") return UpdateMode::kPaperLiteral;
  throw std::invalid_argument("unknown update mode \"" + std::string(name) +
                              "\" (expected exact-bayes or paper-literal)");
}

}  // namespace cpsrl
