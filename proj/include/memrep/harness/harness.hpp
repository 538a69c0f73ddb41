#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memrep/learner/learner.hpp"

namespace memrep::harness {

/// A named target concept and what the learner needs to search for it.
struct Target {
  std::string name;
  Concept truth;
  Alphabet alphabet;
  /// Grid family for monotone targets.
  std::optional<monotone::GridFamily> grid;
  /// Assumed constraint conjoined with every hypothesis.
  std::optional<dfa::Dfa> prior;

  bool is_dfa() const { return truth.is_dfa(); }
};

/// tomita_1..tomita_7, bby, rymask, modulo_k(k), scaled_tomita4(n),
/// grid(d,i,seed). Throws InvalidArgument on anything else.
Target build_target(const std::string& name);

struct TeacherSpec {
  /// random_memrep | tomita_semantic | cost_threshold | human
  std::string kind = "tomita_semantic";
  double frac_incomparable = 0.1;
  double frac_strict_unforced = 0.9;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const TeacherSpec& spec);
TeacherSpec teacher_from_json(const nlohmann::json& j);
/// The teacher each benchmark uses unless configured otherwise.
TeacherSpec default_teacher(const Target& target);

std::unique_ptr<oracles::Teacher> make_teacher(const Target& target, const TeacherSpec& spec);
std::unique_ptr<oracles::EquivalenceOracle> make_equivalence(const Target& target, std::uint64_t seed);
std::unique_ptr<learner::ConceptClass> make_class(const Target& target, std::size_t max_states, std::uint64_t seed);

struct Benchmark {
  std::string name;
  std::string target = "tomita_5";
  std::optional<TeacherSpec> teacher;
  std::vector<strategy::CostModel> costs{{1, 1}};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::size_t max_states = 10;
  std::size_t max_rounds = 10000;
  learner::RecoveryMode recovery = learner::RecoveryMode::Off;
  std::size_t recovery_slack = 3;
  strategy::StrategyConfig strategy;

  void validate() const;
};

/// Keys: name, target, teacher, costs ([[a,b],...] or {"a":[..],"b":..}),
/// trials, seed, max_states, max_rounds, recovery, recovery_slack, strategy
/// ({alpha, beta, eta, softmax_temp, mc_samples}). Costs may be "inf".
Benchmark benchmark_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Benchmark& b);

struct TrialResult {
  std::string benchmark;
  double a = 1;
  double b = 1;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double noise_rate = 0;
  learner::Counts counts;
  double cost_total = 0;
  bool success = false;
  std::string status;
  std::vector<nlohmann::json> records;
};

/// One end-to-end run. The trial seed drives the learner, the teacher and
/// the equivalence oracle; it does not depend on the cost point.
TrialResult run_trial(const Benchmark& bench, const strategy::CostModel& costs, std::size_t trial,
                      double noise_rate = -1);

struct Aggregate {
  double a = 1;
  double b = 1;
  double noise_rate = 0;
  std::size_t trials = 0;
  double mean_mem = 0, var_mem = 0;
  double mean_pref = 0, var_pref = 0;
  double mean_equiv = 0, var_equiv = 0;
  double mean_total = 0;
  double mean_cost = 0;
  double mean_dropped = 0;
  double success_rate = 0;
};

/// Mean and population variance over a slice of trials.
Aggregate aggregate(const std::vector<TrialResult>& trials);

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::vector<Aggregate> aggregates;
};

/// Every (cost point, trial) pair on a pool of `jobs` threads. Rows come
/// back in cost-point then trial order regardless of scheduling.
ExperimentResult run_experiment(const Benchmark& bench, std::size_t jobs = 1);

/// The first cost point at each error rate, with drop-core recovery.
ExperimentResult run_robustness(Benchmark bench, const std::vector<double>& error_rates, std::size_t jobs = 1);

void write_summary_csv(std::ostream& out, const std::vector<TrialResult>& trials);
void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);
/// Stacked-bar data: per cost point, membership, preference and
/// equivalence means from bottom to top.
nlohmann::json plot_data(const ExperimentResult& result);
/// summary.csv, aggregate.csv, plot.json and transcripts.jsonl under dir.
void write_outputs(const std::string& dir, const ExperimentResult& result);

std::string format_cost(double c);
double parse_cost(const std::string& text);

}  // namespace memrep::harness
