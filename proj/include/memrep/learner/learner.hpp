#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memrep/core/hasse.hpp"
#include "memrep/learner/concept_class.hpp"
#include "memrep/oracles/oracles.hpp"
#include "memrep/strategy/strategy.hpp"

namespace memrep::learner {

enum class RecoveryMode { Off, DropCore, Interactive };

std::string_view to_string(RecoveryMode mode);
RecoveryMode parse_recovery(std::string_view text);

struct LearnerConfig {
  strategy::CostModel costs;
  strategy::StrategyConfig strategy;
  std::size_t max_rounds = 10000;
  RecoveryMode recovery = RecoveryMode::Off;
  /// In drop-core mode an unsatisfiable size k drops a core once
  /// k >= k_trusted + slack, where k_trusted is the smallest size fitting the
  /// counterexamples alone.
  std::size_t recovery_slack = 3;
  std::uint64_t seed = 0;
};

enum class QueryKind { Membership, Preference, Equivalence };

std::string_view to_string(QueryKind kind);

struct Query {
  QueryKind kind;
  std::vector<Atom> atoms;
  std::optional<Concept> hypothesis;
};

enum class Status { Querying, Violation, Done, Failed };
enum class FailureKind { NoConsistentConcept, RoundLimit, UnresolvedViolations };

std::string_view to_string(Status status);
std::string_view to_string(FailureKind kind);

struct Counts {
  std::size_t n_mem = 0;
  std::size_t n_pref = 0;
  std::size_t n_equiv = 0;
  std::size_t dropped = 0;
};

/// Step-driven learner: read pending(), feed the matching answer_*() call,
/// repeat until the status leaves Querying.
class Learner {
 public:
  Learner(std::unique_ptr<ConceptClass> cls, LearnerConfig config);

  Status status() const { return status_; }
  /// The query awaiting an answer; throws unless Querying.
  const Query& pending() const;

  void answer_membership(MemLabel label);
  void answer_preference(PrefLabel label);
  /// Nothing accepts the pending hypothesis.
  void answer_equivalence(const std::optional<oracles::Counterexample>& counterexample);

  /// Deactivates entries and resumes. Allowed while Querying or Violation.
  void retract(const std::vector<std::size_t>& entries);

  /// Open violations while in the Violation status.
  const ViolationReport& violations() const { return violations_; }

  const KnowledgeBase& kb() const { return kb_; }
  const ConceptClass& concept_class() const { return *cls_; }
  const LearnerConfig& config() const { return config_; }
  const Counts& counts() const { return counts_; }
  double cost_total() const { return config_.costs.total(counts_.n_mem, counts_.n_pref); }
  const std::optional<Concept>& result() const { return result_; }
  std::optional<FailureKind> failure() const { return failure_; }
  const strategy::BanditState& bandit() const { return bandit_; }

  /// One JSON object per answered query.
  const std::vector<nlohmann::json>& records() const { return records_; }
  std::string transcript_jsonl() const;
  nlohmann::json summary() const;

 private:
  struct Round {
    strategy::Table table;
    std::size_t sampled = 0;
    std::size_t x = 0, y = 0, z = 0;
    std::vector<Atom> atoms;
    std::array<strategy::Advice, 2> advice;
    strategy::Draw draw;
    double worst_loss = 0;
  };

  void advance();
  bool plan_round(const std::vector<Concept>& sample);
  bool handle_unsat();
  bool check_violations();
  void drop(const std::vector<std::size_t>& entries);
  void fail(FailureKind kind);
  void finish_round(std::size_t survivors, const std::string& answer);
  std::vector<bool> trusted_mask() const;
  std::size_t trusted_size();
  void reset_size();
  bool asked_mem(const Atom& x) const;
  bool asked_pref(const Atom& x, const Atom& y) const;
  nlohmann::json atom_json(const Atom& a) const { return atom_to_json(a, cls_->alphabet()); }

  std::unique_ptr<ConceptClass> cls_;
  LearnerConfig config_;
  std::mt19937_64 rng_;
  KnowledgeBase kb_;
  strategy::BanditState bandit_;
  Status status_ = Status::Querying;
  Query pending_{QueryKind::Membership, {}, std::nullopt};
  std::optional<Round> round_;
  ViolationReport violations_;
  std::optional<Concept> result_;
  std::optional<FailureKind> failure_;
  Counts counts_;
  std::vector<nlohmann::json> records_;
  std::vector<std::size_t> pending_drops_;
  std::size_t k_trusted_ = 1;
  std::size_t trusted_seen_ = 0;
};

struct RecoveryReport {
  ViolationReport violations;
  std::vector<std::size_t> dropped;
};

/// Deactivates the untrusted entries named by explicit violations, then, if
/// the class is still unsatisfiable at its current size, the untrusted part
/// of a minimal core.
RecoveryReport recover(KnowledgeBase& kb, ConceptClass& cls);

struct LearnOutcome {
  Status status;
  std::optional<Concept> result;
  std::optional<FailureKind> failure;
  Counts counts;
  double cost_total;
  std::vector<nlohmann::json> records;
  nlohmann::json summary;
};

/// Runs a learner against simulated oracles. Violation prompts are not
/// supported here; interactive mode behaves like drop-core.
LearnOutcome learn(std::unique_ptr<ConceptClass> cls, LearnerConfig config, oracles::Teacher& teacher,
                   oracles::EquivalenceOracle& equivalence);

}  // namespace memrep::learner
