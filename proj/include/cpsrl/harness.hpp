#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpsrl/agents.hpp"
#include "cpsrl/serialize.hpp"

namespace cpsrl {

// Environment addressed by name ("random_fmdp", "taxi3", "taxi5") with
// optional parameter overrides.
struct EnvironmentSpec {
  std::string name = "random_fmdp";
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::vector<std::string> agents;  // subset of {"cpsrl", "fpsrl", "psrl"}
  int episodes = 1;
  std::vector<std::uint64_t> seeds;
  UpdateMode mode = UpdateMode::kExactBayes;
  int revealed_edges = 2;  // per-factor prior edges for the cpsrl agent
  long long planner_state_cap = kDefaultStateCap;
  // Wall-clock timings are off by default so repeated runs of the same
  // configuration produce byte-identical CSV output; when enabled, the
  // elapsed_ms column carries real measurements and determinism of that
  // column is waived.
  bool record_timing = false;
  bool keep_trajectories = false;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct MetricRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string algorithm;
  int episode = 0;  // 1-based
  double per_episode_regret = 0.0;
  double cumulative_regret = 0.0;
  double model_error_l1 = 0.0;
  double hyper_entropy_mean = 0.0;
  double elapsed_ms = 0.0;

  bool operator==(const MetricRow&) const = default;
};

struct RunOutput {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<MetricRow> rows;
  std::vector<EpisodeLog> episodes;
  CausalGraph true_graph;
  std::string error;  // nonempty if the run aborted
};

struct ExperimentResult {
  std::vector<RunOutput> runs;  // agent-major, seed-minor, config order

  const RunOutput* find(std::string_view algorithm, std::uint64_t seed) const;
  std::vector<MetricRow> all_rows() const;
};

// Builds the named environment. Seeded generators draw from `rng`; the taxi
// grids are deterministic and ignore it.
Fmdp build_environment(const EnvironmentSpec& spec, Rng& rng);

// V_opt - V(policy), both evaluated exactly on the true flattened model.
double per_episode_regret(const RunContext& ctx, const Policy& policy);

struct DiscoveryResult {
  CausalGraph graph;
  std::size_t chosen_episode = 0;
  // Fraction of episodes whose sampled graph contains the true graph;
  // negative when no true graph was supplied.
  double supergraph_fraction = -1.0;
};

// Uniformly selects one episode of the run and returns its sampled
// factorization as a graph.
DiscoveryResult extract_discovered_graph(const std::vector<EpisodeLog>& logs,
                                         int d_x, Rng& rng,
                                         const CausalGraph* truth = nullptr);

// Full protocol: for every (agent, seed) pair, runs `episodes` episodes and
// emits one MetricRow per episode. Runs execute in parallel with isolated
// state; a failed run is recorded and the others proceed.
ExperimentResult run_experiment(const ExperimentConfig& config);

// CSV with the fixed MetricRow schema: header row, UTF-8, LF line endings,
// shortest round-trip float formatting.
void write_csv(const std::vector<MetricRow>& rows, std::ostream& out);
std::vector<MetricRow> read_csv(std::istream& in);

// Mean and 95% normal-approximation confidence intervals per episode across
// seeds, per agent, plus any run errors.
nlohmann::json summarize(const ExperimentConfig& config,
                         const ExperimentResult& result);

// Writes metrics.csv and summary.json under `out_dir`.
void run_experiment_to_files(const ExperimentConfig& config,
                             const std::filesystem::path& out_dir);

// Built-in fixture checks for the `validate` CLI subcommand; prints one line
// per suite and returns true when everything passed.
bool run_validation(std::ostream& out);

}  // namespace cpsrl
