#include "cpsrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cpsrl/envs.hpp"

namespace cpsrl {

using nlohmann::json;

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig config;
  const json& env = j.at("environment");
  config.environment.name = env.at("name").get<std::string>();
  config.environment.params = env.value("params", json::object());
  config.agents = j.at("agents").get<std::vector<std::string>>();
  config.episodes = j.at("episodes").get<int>();
  config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("mode")) {
    config.mode = update_mode_from_name(j.at("mode").get<std::string>());
  }
  config.revealed_edges = j.value("eta", 2);
  config.planner_state_cap = j.value("planner_state_cap", kDefaultStateCap);
  config.record_timing = j.value("record_timing", false);
  config.keep_trajectories = j.value("keep_trajectories", false);
  if (config.episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (config.seeds.empty()) throw std::invalid_argument("config: at least one seed required");
  if (config.agents.empty()) throw std::invalid_argument("config: at least one agent required");
  for (const std::string& name : config.agents) agent_kind_from_name(name);
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  return json{{"environment",
               json{{"name", config.environment.name}, {"params", config.environment.params}}},
              {"agents", config.agents},
              {"episodes", config.episodes},
              {"seeds", config.seeds},
              {"mode", update_mode_name(config.mode)},
              {"eta", config.revealed_edges},
              {"planner_state_cap", config.planner_state_cap},
              {"record_timing", config.record_timing},
              {"keep_trajectories", config.keep_trajectories}};
}

Fmdp build_environment(const EnvironmentSpec& spec, Rng& rng) {
  const json& p = spec.params;
  if (spec.name == "random_fmdp") {
    return make_random_fmdp(p.value("d_x", 9), p.value("d_y", 6), p.value("Z", 5),
                            p.value("N", 2), p.value("H", 100), rng);
  }
  if (spec.name == "taxi3") {
    return make_taxi(p.value("rows", 3), p.value("cols", 3), p.value("H", 10));
  }
  if (spec.name == "taxi5") {
    return make_taxi(p.value("rows", 5), p.value("cols", 5), p.value("H", 15));
  }
  throw std::invalid_argument("unknown environment \"" + spec.name + "\"");
}

double per_episode_regret(const RunContext& ctx, const Policy& policy) {
  return ctx.optimal.initial_value - evaluate_policy(ctx.flat_env, policy);
}

DiscoveryResult extract_discovered_graph(const std::vector<EpisodeLog>& logs,
                                         int d_x, Rng& rng,
                                         const CausalGraph* truth) {
  if (logs.empty()) {
    throw std::invalid_argument("extract_discovered_graph: empty episode log");
  }
  DiscoveryResult result;
  result.chosen_episode = static_cast<std::size_t>(rng.uniform_below(logs.size()));
  const EpisodeLog& chosen = logs[result.chosen_episode];
  if (chosen.factorization.empty()) {
    throw std::invalid_argument(
        "extract_discovered_graph: selected episode has no sampled factorization");
  }
  result.graph.d_x = d_x;
  result.graph.d_y = static_cast<int>(chosen.factorization.size());
  result.graph.parents = chosen.factorization;
  if (truth != nullptr) {
    long long matches = 0;
    for (const EpisodeLog& log : logs) {
      CausalGraph g;
      g.d_x = d_x;
      g.d_y = static_cast<int>(log.factorization.size());
      g.parents = log.factorization;
      if (is_subgraph(*truth, g)) ++matches;
    }
    result.supergraph_fraction =
        static_cast<double>(matches) / static_cast<double>(logs.size());
  }
  return result;
}

namespace {

RunOutput execute_run(const ExperimentConfig& config, const std::string& algorithm,
                      std::uint64_t seed) {
  RunOutput out;
  out.algorithm = algorithm;
  out.seed = seed;
  out.rows.reserve(static_cast<std::size_t>(config.episodes));
  try {
    Rng env_rng = Rng::derive(seed, "env");
    const RunContext ctx =
        make_run_context(build_environment(config.environment, env_rng),
                         config.planner_state_cap);
    out.true_graph = ctx.env.graph;

    AgentConfig agent_config;
    agent_config.kind = agent_kind_from_name(algorithm);
    agent_config.mode = config.mode;
    agent_config.total_episodes = config.episodes;
    agent_config.planner_state_cap = config.planner_state_cap;
    if (agent_config.kind == AgentKind::kCpsrl) {
      Rng prior_rng = Rng::derive(seed, "prior");
      agent_config.prior =
          reveal_prior_clamped(ctx.env.graph, config.revealed_edges, prior_rng);
    }
    const std::unique_ptr<Agent> agent = make_agent(ctx, agent_config);

    Rng agent_rng = Rng::derive(seed, "agent/" + algorithm);
    const std::string run_id = algorithm + "-s" + std::to_string(seed);
    double cumulative = 0.0;
    for (int k = 0; k < config.episodes; ++k) {
      const auto start = std::chrono::steady_clock::now();
      EpisodeLog log = agent->run_episode(agent_rng);
      const auto stop = std::chrono::steady_clock::now();

      cumulative += log.regret;
      MetricRow row;
      row.run_id = run_id;
      row.seed = seed;
      row.algorithm = algorithm;
      row.episode = k + 1;
      row.per_episode_regret = log.regret;
      row.cumulative_regret = cumulative;
      row.model_error_l1 = log.model_error;
      double entropy = 0.0;
      for (double e : log.diagnostics.hyper_entropy) entropy += e;
      if (!log.diagnostics.hyper_entropy.empty()) {
        entropy /= static_cast<double>(log.diagnostics.hyper_entropy.size());
      }
      row.hyper_entropy_mean = entropy;
      if (config.record_timing) {
        row.elapsed_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
      }
      out.rows.push_back(std::move(row));
      if (!config.keep_trajectories) log.trajectory.clear();
      out.episodes.push_back(std::move(log));
    }
  } catch (const std::exception& e) {
    out.error = e.what();
    out.rows.clear();
    out.episodes.clear();
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("CSV: bad number \"" + std::string(text) + "\"");
  }
  return value;
}

constexpr std::string_view kCsvHeader =
    "run_id,seed,algorithm,episode,per_episode_regret,cumulative_regret,"
    "model_error_l1,hyper_entropy_mean,elapsed_ms";

struct Welford {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  double ci95() const {
    if (n < 2) return 0.0;
    const double variance = m2 / static_cast<double>(n - 1);
    return 1.96 * std::sqrt(variance / static_cast<double>(n));
  }
};

}  // namespace

const RunOutput* ExperimentResult::find(std::string_view algorithm,
                                        std::uint64_t seed) const {
  for (const RunOutput& run : runs) {
    if (run.algorithm == algorithm && run.seed == seed) return &run;
  }
  return nullptr;
}

std::vector<MetricRow> ExperimentResult::all_rows() const {
  std::vector<MetricRow> rows;
  for (const RunOutput& run : runs) {
    rows.insert(rows.end(), run.rows.begin(), run.rows.end());
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  struct RunSpec {
    std::string algorithm;
    std::uint64_t seed;
  };
  std::vector<RunSpec> specs;
  for (const std::string& algorithm : config.agents) {
    for (std::uint64_t seed : config.seeds) specs.push_back({algorithm, seed});
  }

  ExperimentResult result;
  result.runs.resize(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      result.runs[i] = execute_run(config, specs[i].algorithm, specs[i].seed);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, specs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

void write_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const MetricRow& row : rows) {
    out << row.run_id << ',' << row.seed << ',' << row.algorithm << ','
        << row.episode << ',' << format_double(row.per_episode_regret) << ','
        << format_double(row.cumulative_regret) << ','
        << format_double(row.model_error_l1) << ','
        << format_double(row.hyper_entropy_mean) << ','
        << format_double(row.elapsed_ms) << '\n';
  }
}

std::vector<MetricRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("CSV: missing or unexpected header");
  }
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 9) throw std::invalid_argument("CSV: expected 9 fields");
    MetricRow row;
    row.run_id = fields[0];
    row.seed = static_cast<std::uint64_t>(std::stoull(fields[1]));
    row.algorithm = fields[2];
    row.episode = std::stoi(fields[3]);
    row.per_episode_regret = parse_double(fields[4]);
    row.cumulative_regret = parse_double(fields[5]);
    row.model_error_l1 = parse_double(fields[6]);
    row.hyper_entropy_mean = parse_double(fields[7]);
    row.elapsed_ms = parse_double(fields[8]);
    rows.push_back(std::move(row));
  }
  return rows;
}

json summarize(const ExperimentConfig& config, const ExperimentResult& result) {
  json agents = json::object();
  for (const std::string& algorithm : config.agents) {
    std::vector<Welford> cumulative(static_cast<std::size_t>(config.episodes));
    std::vector<Welford> model_error(static_cast<std::size_t>(config.episodes));
    int completed = 0;
    for (const RunOutput& run : result.runs) {
      if (run.algorithm != algorithm || !run.error.empty()) continue;
      ++completed;
      for (const MetricRow& row : run.rows) {
        cumulative[static_cast<std::size_t>(row.episode - 1)].add(row.cumulative_regret);
        model_error[static_cast<std::size_t>(row.episode - 1)].add(row.model_error_l1);
      }
    }
    json cum_mean = json::array();
    json cum_ci = json::array();
    json err_mean = json::array();
    for (int k = 0; k < config.episodes; ++k) {
      cum_mean.push_back(cumulative[static_cast<std::size_t>(k)].mean);
      cum_ci.push_back(cumulative[static_cast<std::size_t>(k)].ci95());
      err_mean.push_back(model_error[static_cast<std::size_t>(k)].mean);
    }
    const Welford& last = cumulative.back();
    agents[algorithm] =
        json{{"seeds_completed", completed},
             {"final", json{{"cumulative_regret_mean", last.mean},
                            {"cumulative_regret_ci95", last.ci95()}}},
             {"per_episode", json{{"cumulative_regret_mean", std::move(cum_mean)},
                                  {"cumulative_regret_ci95", std::move(cum_ci)},
                                  {"model_error_mean", std::move(err_mean)}}}};
  }
  json errors = json::array();
  for (const RunOutput& run : result.runs) {
    if (!run.error.empty()) {
      errors.push_back(json{{"run_id", run.algorithm + "-s" + std::to_string(run.seed)},
                            {"message", run.error}});
    }
  }
  return json{{"config", config_to_json(config)},
              {"agents", std::move(agents)},
              {"errors", std::move(errors)}};
}

void run_experiment_to_files(const ExperimentConfig& config,
                             const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ExperimentResult result = run_experiment(config);
  {
    std::ofstream csv(out_dir / "metrics.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open metrics.csv for writing");
    write_csv(result.all_rows(), csv);
  }
  {
    std::ofstream summary(out_dir / "summary.json", std::ios::binary);
    if (!summary) throw std::runtime_error("cannot open summary.json for writing");
    summary << summarize(config, result).dump(2) << '\n';
  }
}

namespace {

// Independent marginal-likelihood computation used by the self-check below:
// log prod_cells B(params + counts) / B(params), over the Dirichlet(1, ..., 1)
// transition rows (integer outcome counts) and, when `with_rewards` is set,
// the Beta(1, 1) reward cells (fractional counts sum_r, sum_(1-r)).
double log_marginal_likelihood(const std::vector<std::vector<int>>& counts,
                               const std::vector<std::pair<double, long long>>& rewards,
                               bool with_rewards) {
  double log_ml = 0.0;
  for (const std::vector<int>& row : counts) {
    int total = 0;
    const int n = static_cast<int>(row.size());
    for (int c : row) {
      for (int i = 0; i < c; ++i) log_ml += std::log(1.0 + i);
      total += c;
    }
    for (int i = 0; i < total; ++i) log_ml -= std::log(static_cast<double>(n + i));
  }
  if (with_rewards) {
    for (const auto& [reward_sum, visits] : rewards) {
      log_ml += std::lgamma(1.0 + reward_sum) +
                std::lgamma(1.0 + static_cast<double>(visits) - reward_sum) +
                std::lgamma(2.0) - 2.0 * std::lgamma(1.0) -
                std::lgamma(2.0 + static_cast<double>(visits));
    }
  }
  return log_ml;
}

TabularMdp random_tabular(Rng& rng, long long states, long long actions, int horizon) {
  TabularMdp m;
  m.num_states = states;
  m.num_actions = actions;
  m.horizon = horizon;
  m.transition.resize(static_cast<std::size_t>(states * actions * states));
  m.reward.resize(static_cast<std::size_t>(states * actions));
  const std::vector<double> ones(static_cast<std::size_t>(states), 1.0);
  for (long long i = 0; i < states * actions; ++i) {
    rng.dirichlet_into(ones, {m.transition.data() + i * states,
                              static_cast<std::size_t>(states)});
    m.reward[static_cast<std::size_t>(i)] = rng.uniform01();
  }
  m.initial = rng.dirichlet(ones);
  return m;
}

bool report(std::ostream& out, const std::string& name, bool ok,
            const std::string& detail) {
  out << (ok ? "[PASS] " : "[FAIL] ") << name;
  if (!detail.empty()) out << ": " << detail;
  out << '\n';
  return ok;
}

}  // namespace

bool run_validation(std::ostream& out) {
  bool all_ok = true;
  Rng rng(20240101);

  {  // scope counting identity against exhaustive enumeration
    bool ok = true;
    for (int d_x = 1; d_x <= 8 && ok; ++d_x) {
      for (int max_parents = 0; max_parents <= d_x && ok; ++max_parents) {
        for (int known = 0; known <= max_parents && ok; ++known) {
          std::vector<int> all(static_cast<std::size_t>(d_x));
          for (int i = 0; i < d_x; ++i) all[static_cast<std::size_t>(i)] = i;
          Scope fixed;
          for (int i = 0; i < known; ++i) {
            const std::size_t pick = static_cast<std::size_t>(i) +
                static_cast<std::size_t>(rng.uniform_below(all.size() - static_cast<std::size_t>(i)));
            std::swap(all[static_cast<std::size_t>(i)], all[pick]);
            fixed.push_back(all[static_cast<std::size_t>(i)]);
          }
          std::sort(fixed.begin(), fixed.end());
          const auto scopes = enumerate_consistent_scopes(d_x, fixed, max_parents);
          ok = scopes.size() == count_consistent_scopes(d_x, known, max_parents) &&
               scopes.size() <= consistent_scopes_bound(d_x, known);
        }
      }
    }
    all_ok &= report(out, "scope-counting", ok,
                     "closed form matches enumeration for d_x <= 8");
  }

  {  // assignment encoding bijection
    bool ok = true;
    const std::vector<std::vector<int>> support_sets = {{2, 2}, {3, 2, 4}, {5}, {2, 3, 2, 2}};
    for (const auto& supports : support_sets) {
      const long long total = support_product(supports);
      for (long long i = 0; i < total && ok; ++i) {
        ok = assignment_index(assignment_decode(i, supports), supports) == i;
      }
    }
    all_ok &= report(out, "assignment-encoding", ok, "decode/encode round trips");
  }

  {  // planner against the brute-force oracle
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
      const long long S = 2 + static_cast<long long>(rng.uniform_below(3));
      const long long A = 1 + static_cast<long long>(rng.uniform_below(2));
      const int H = 1 + static_cast<int>(rng.uniform_below(3));
      const TabularMdp m = random_tabular(rng, S, A, H);
      const double dp = backward_induction(m).initial_value;
      const double brute = brute_force_optimal(m);
      worst = std::max(worst, std::abs(dp - brute));
      ok = worst <= 1e-12;
    }
    all_ok &= report(out, "planner-oracle", ok,
                     "max |dp - brute force| = " + format_double(worst));
  }

  {  // hyper-posterior equals brute-force Bayes in exact-bayes mode
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      CausalGraph prior;
      prior.d_x = 2;
      prior.d_y = 1;
      prior.parents = {Scope{}};
      const std::vector<int> supports = {2, 2};
      Hierarchy h = init_hierarchy(prior, 1, supports, UpdateMode::kExactBayes);
      const std::size_t n_candidates = h.factors[0].candidates.size();
      std::vector<std::vector<std::vector<int>>> counts(n_candidates);
      std::vector<std::vector<std::pair<double, long long>>> rewards(n_candidates);
      for (std::size_t c = 0; c < n_candidates; ++c) {
        counts[c].assign(h.factors[0].posteriors[c].transitions.size(),
                         std::vector<int>(2, 0));
        rewards[c].assign(h.factors[0].posteriors[c].transitions.size(), {0.0, 0});
      }
      for (int obs = 0; obs < 10; ++obs) {
        Transition t;
        t.x = {static_cast<int>(rng.uniform_below(2)),
               static_cast<int>(rng.uniform_below(2))};
        t.next = {static_cast<int>(rng.uniform_below(2))};
        t.reward = {rng.uniform01()};
        for (std::size_t c = 0; c < n_candidates; ++c) {
          const long long row =
              scoped_row_index(t.x, h.factors[0].candidates[c], supports);
          ++counts[c][static_cast<std::size_t>(row)][static_cast<std::size_t>(t.next[0])];
          rewards[c][static_cast<std::size_t>(row)].first += t.reward[0];
          ++rewards[c][static_cast<std::size_t>(row)].second;
        }
        observe(h, t);
      }
      std::vector<double> log_ml(n_candidates);
      double max_lml = -1e300;
      for (std::size_t c = 0; c < n_candidates; ++c) {
        log_ml[c] = log_marginal_likelihood(counts[c], rewards[c], true);
        max_lml = std::max(max_lml, log_ml[c]);
      }
      double total = 0.0;
      for (double& v : log_ml) {
        v = std::exp(v - max_lml);
        total += v;
      }
      const std::vector<double> weights = h.factors[0].weights();
      for (std::size_t c = 0; c < n_candidates; ++c) {
        worst = std::max(worst, std::abs(weights[c] - log_ml[c] / total));
      }
      ok = worst <= 1e-9;
    }
    all_ok &= report(out, "conjugacy-oracle", ok,
                     "max weight deviation = " + format_double(worst));
  }

  {  // environments are well formed
    Rng env_rng(7);
    const Fmdp random_env = make_random_fmdp(6, 4, 3, 2, 10, env_rng);
    const Fmdp taxi = make_taxi(3, 3, 10);
    bool ok = validate(random_env).empty() && validate(taxi).empty() &&
              taxi.state_count() == 18 && taxi.action_count() == 6;
    if (ok) {
      const TabularMdp flat = flatten(random_env);
      for (long long i = 0; i < flat.num_states * flat.num_actions && ok; ++i) {
        double sum = 0.0;
        for (long long s2 = 0; s2 < flat.num_states; ++s2) {
          sum += flat.transition[static_cast<std::size_t>(i * flat.num_states + s2)];
        }
        ok = std::abs(sum - 1.0) <= 1e-12;
      }
    }
    all_ok &= report(out, "environments", ok,
                     "generators validate; flattened rows are stochastic");
  }

  {  // byte-identical CSV on repeated runs
    ExperimentConfig config;
    config.environment.name = "random_fmdp";
    config.environment.params = json{{"d_x", 4}, {"d_y", 2}, {"Z", 2}, {"N", 2}, {"H", 5}};
    config.agents = {"cpsrl", "psrl"};
    config.episodes = 3;
    config.seeds = {1, 2};
    std::ostringstream first;
    std::ostringstream second;
    write_csv(run_experiment(config).all_rows(), first);
    write_csv(run_experiment(config).all_rows(), second);
    const bool ok = first.str() == second.str() && !first.str().empty();
    all_ok &= report(out, "determinism", ok, "repeated runs give identical CSV bytes");
  }

  return all_ok;
}

}  // namespace cpsrl
