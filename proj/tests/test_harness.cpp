#include <stdexcept>
#include <sstream>

#include "doctest.h"

#include "cpsrl/envs.hpp"
#include "cpsrl/harness.hpp"
#include "test_util.hpp"

using namespace cpsrl;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.environment.name = "random_fmdp";
  config.environment.params =
      nlohmann::json{{"d_x", 4}, {"d_y", 2}, {"Z", 2}, {"N", 2}, {"H", 5}};
  config.agents = {"cpsrl", "psrl"};
  config.episodes = 3;
  config.seeds = {1, 2};
  return config;
}

}  // namespace

TEST_CASE("per-episode regret against hand-built policies") {
  Rng env_rng(3);
  const RunContext ctx = make_run_context(make_random_fmdp(4, 2, 2, 2, 4, env_rng));
  CHECK(per_episode_regret(ctx, ctx.optimal.policy) == doctest::Approx(0.0));

  // worst deterministic policy on a tiny instance, found by enumeration
  const long long S = ctx.flat_env.num_states;
  const long long A = ctx.flat_env.num_actions;
  Policy policy(static_cast<std::size_t>(ctx.env.horizon),
                std::vector<int>(static_cast<std::size_t>(S), 0));
  double worst_value = ctx.optimal.initial_value;
  Rng pick(5);
  for (int trial = 0; trial < 200; ++trial) {
    for (auto& step : policy) {
      for (int& a : step) a = static_cast<int>(pick.uniform_below(static_cast<std::uint64_t>(A)));
    }
    const double regret = per_episode_regret(ctx, policy);
    CHECK(regret >= -1e-9);
    CHECK(regret <= ctx.env.graph.d_y * ctx.env.horizon);
    worst_value = std::min(worst_value, ctx.optimal.initial_value - regret);
  }
  CHECK(worst_value < ctx.optimal.initial_value);
}

TEST_CASE("model error metric on point masses and random models") {
  Rng rng(7);
  const TabularMdp a = test::random_tabular(rng, 3, 2, 2);
  CHECK(model_error_l1(a, a) == doctest::Approx(0.0));

  TabularMdp left = a;
  TabularMdp right = a;
  for (long long i = 0; i < 3 * 2; ++i) {
    for (long long s2 = 0; s2 < 3; ++s2) {
      left.transition[static_cast<std::size_t>(i * 3 + s2)] = s2 == 0 ? 1.0 : 0.0;
      right.transition[static_cast<std::size_t>(i * 3 + s2)] = s2 == 2 ? 1.0 : 0.0;
    }
  }
  CHECK(model_error_l1(left, right) == doctest::Approx(2.0));

  TabularMdp b = test::random_tabular(rng, 3, 2, 2);
  // direct per-row oracle
  double expected = 0.0;
  for (long long i = 0; i < 3 * 2; ++i) {
    for (long long s2 = 0; s2 < 3; ++s2) {
      expected += std::abs(a.transition[static_cast<std::size_t>(i * 3 + s2)] -
                           b.transition[static_cast<std::size_t>(i * 3 + s2)]);
    }
  }
  CHECK(model_error_l1(a, b) == doctest::Approx(expected / 6.0));

  TabularMdp wrong = test::random_tabular(rng, 4, 2, 2);
  CHECK_THROWS_AS(model_error_l1(a, wrong), std::invalid_argument);
}

TEST_CASE("factored and flat model error agree on factored instances") {
  Rng rng(11);
  const Fmdp truth = make_random_fmdp(4, 2, 2, 2, 3, rng);
  Fmdp other = truth;
  // perturb one factor row and renormalize
  auto& row0 = other.transition[0];
  row0[0] = 0.9;
  row0[1] = 0.1;
  const TabularMdp flat_truth = flatten(truth);
  const TabularMdp flat_other = flatten(other);
  const double metric = model_error_l1(flat_truth, flat_other);

  double oracle = 0.0;
  const long long S = flat_truth.num_states;
  const long long A = flat_truth.num_actions;
  for (long long i = 0; i < S * A; ++i) {
    for (long long s2 = 0; s2 < S; ++s2) {
      oracle += std::abs(flat_truth.transition[static_cast<std::size_t>(i * S + s2)] -
                         flat_other.transition[static_cast<std::size_t>(i * S + s2)]);
    }
  }
  CHECK(metric == doctest::Approx(oracle / double(S * A)).epsilon(1e-12));
}

TEST_CASE("discovery extraction returns a sampled factorization") {
  Rng env_rng(13);
  RunContext ctx = make_run_context(make_random_fmdp(4, 2, 2, 2, 5, env_rng));
  AgentConfig config;
  config.kind = AgentKind::kFpsrl;
  config.total_episodes = 8;
  auto agent = make_fpsrl(ctx, config);
  Rng rng(17);
  std::vector<EpisodeLog> logs;
  for (int k = 0; k < 8; ++k) logs.push_back(agent->run_episode(rng));

  Rng pick(19);
  const DiscoveryResult result =
      extract_discovered_graph(logs, ctx.env.graph.d_x, pick, &ctx.env.graph);
  CHECK(result.graph == ctx.env.graph);           // oracle logs hold the true graph
  CHECK(result.supergraph_fraction == doctest::Approx(1.0));
  CHECK(result.graph.sparseness() <= ctx.env.max_parents);

  const std::vector<EpisodeLog> empty;
  CHECK_THROWS_AS(extract_discovered_graph(empty, 4, pick), std::invalid_argument);
}

TEST_CASE("run_experiment emits one row per agent, seed and episode") {
  const ExperimentConfig config = tiny_config();
  const ExperimentResult result = run_experiment(config);
  REQUIRE(result.runs.size() == 4);
  CHECK(result.all_rows().size() == 12);

  for (const RunOutput& run : result.runs) {
    CHECK(run.error.empty());
    REQUIRE(run.rows.size() == 3);
    double cumulative = 0.0;
    for (std::size_t k = 0; k < run.rows.size(); ++k) {
      const MetricRow& row = run.rows[k];
      CHECK(row.episode == static_cast<int>(k) + 1);
      CHECK(row.algorithm == run.algorithm);
      CHECK(row.run_id == run.algorithm + "-s" + std::to_string(run.seed));
      cumulative += row.per_episode_regret;
      CHECK(row.cumulative_regret == doctest::Approx(cumulative).epsilon(1e-12));
      CHECK(row.elapsed_ms == 0.0);  // timing is off by default
    }
  }
}

TEST_CASE("experiment CSV is byte deterministic and parses back") {
  const ExperimentConfig config = tiny_config();
  std::ostringstream first, second;
  write_csv(run_experiment(config).all_rows(), first);
  write_csv(run_experiment(config).all_rows(), second);
  CHECK(first.str() == second.str());
  CHECK(!first.str().empty());

  std::istringstream in(first.str());
  const std::vector<MetricRow> parsed = read_csv(in);
  const std::vector<MetricRow> original = run_experiment(config).all_rows();
  REQUIRE(parsed.size() == original.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i] == original[i]);
}

TEST_CASE("runs are independent of which other runs share the config") {
  ExperimentConfig solo = tiny_config();
  solo.agents = {"cpsrl"};
  ExperimentConfig joint = tiny_config();

  const ExperimentResult a = run_experiment(solo);
  const ExperimentResult b = run_experiment(joint);
  for (std::uint64_t seed : solo.seeds) {
    const RunOutput* ra = a.find("cpsrl", seed);
    const RunOutput* rb = b.find("cpsrl", seed);
    REQUIRE(ra != nullptr);
    REQUIRE(rb != nullptr);
    REQUIRE(ra->rows.size() == rb->rows.size());
    for (std::size_t k = 0; k < ra->rows.size(); ++k) {
      CHECK(ra->rows[k] == rb->rows[k]);
    }
  }
}

TEST_CASE("summary aggregates means and confidence intervals per episode") {
  const ExperimentConfig config = tiny_config();
  const ExperimentResult result = run_experiment(config);
  const nlohmann::json summary = summarize(config, result);
  CHECK(summary.at("errors").empty());
  for (const std::string& agent : config.agents) {
    const nlohmann::json& block = summary.at("agents").at(agent);
    CHECK(block.at("seeds_completed") == 2);
    CHECK(block.at("per_episode").at("cumulative_regret_mean").size() == 3);
    CHECK(block.at("per_episode").at("cumulative_regret_ci95").size() == 3);

    // mean of the two seeds at the final episode
    double total = 0.0;
    for (std::uint64_t seed : config.seeds) {
      total += result.find(agent, seed)->rows.back().cumulative_regret;
    }
    CHECK(block.at("final").at("cumulative_regret_mean").get<double>() ==
          doctest::Approx(total / 2.0));
  }
}

TEST_CASE("config round trip and validation") {
  const ExperimentConfig config = tiny_config();
  const ExperimentConfig back = config_from_json(config_to_json(config));
  CHECK(back.agents == config.agents);
  CHECK(back.episodes == config.episodes);
  CHECK(back.seeds == config.seeds);
  CHECK(back.environment.name == config.environment.name);

  nlohmann::json bad = config_to_json(config);
  bad["agents"] = nlohmann::json::array({"nonsense"});
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
  bad = config_to_json(config);
  bad["episodes"] = 0;
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("environments resolve by name with parameter overrides") {
  Rng rng(23);
  const Fmdp taxi = build_environment({"taxi3", nlohmann::json::object()}, rng);
  CHECK(taxi.state_count() == 18);
  CHECK(taxi.horizon == 10);

  const Fmdp taxi_long =
      build_environment({"taxi3", nlohmann::json{{"H", 12}}}, rng);
  CHECK(taxi_long.horizon == 12);

  const Fmdp taxi5 = build_environment({"taxi5", nlohmann::json::object()}, rng);
  CHECK(taxi5.state_count() == 50);
  CHECK(taxi5.horizon == 15);

  CHECK_THROWS_AS(build_environment({"gridworld", nlohmann::json::object()}, rng),
                  std::invalid_argument);
}

TEST_CASE("sampled-model error trends downward over a run") {
  ExperimentConfig config;
  config.environment.name = "random_fmdp";
  config.environment.params =
      nlohmann::json{{"d_x", 5}, {"d_y", 3}, {"Z", 3}, {"N", 2}, {"H", 10}};
  config.agents = {"cpsrl"};
  config.episodes = 150;
  config.seeds = {0, 1, 2, 3, 4, 5};
  const ExperimentResult result = run_experiment(config);

  double first = 0.0, last = 0.0;
  int runs = 0;
  for (const RunOutput& run : result.runs) {
    REQUIRE(run.error.empty());
    ++runs;
    for (int k = 0; k < 30; ++k) {
      first += run.rows[static_cast<std::size_t>(k)].model_error_l1;
      last += run.rows[static_cast<std::size_t>(150 - 30 + k)].model_error_l1;
    }
  }
  CHECK(last / runs < first / runs);
}

TEST_CASE("the shifted-multiplier mode runs end to end") {
  ExperimentConfig config = tiny_config();
  config.mode = UpdateMode::kPaperLiteral;
  const ExperimentResult result = run_experiment(config);
  for (const RunOutput& run : result.runs) {
    CHECK(run.error.empty());
    CHECK(run.rows.size() == 3);
  }
  const ExperimentConfig parsed = config_from_json(config_to_json(config));
  CHECK(parsed.mode == UpdateMode::kPaperLiteral);
}

TEST_CASE("failed runs are recorded while others proceed") {
  ExperimentConfig config = tiny_config();
  config.planner_state_cap = 2;  // the 4-state instance exceeds this
  const ExperimentResult result = run_experiment(config);
  int failed = 0;
  for (const RunOutput& run : result.runs) {
    if (!run.error.empty()) ++failed;
  }
  CHECK(failed == static_cast<int>(result.runs.size()));
  const nlohmann::json summary = summarize(config, result);
  CHECK(summary.at("errors").size() == result.runs.size());
}
