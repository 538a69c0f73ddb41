#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace memrep::sat {

using Var = std::int32_t;

/// Literal over a solver variable; code 2v is v, 2v+1 is !v.
class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool negated) : code_(2 * v + (negated ? 1 : 0)) {}

  static constexpr Lit pos(Var v) { return {v, false}; }
  static constexpr Lit neg(Var v) { return {v, true}; }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool negated() const { return (code_ & 1) != 0; }
  constexpr std::int32_t code() const { return code_; }
  constexpr Lit operator~() const {
    Lit l;
    l.code_ = code_ ^ 1;
    return l;
  }
  constexpr auto operator<=>(const Lit&) const = default;

  /// 1-based signed integer, as used in DIMACS files.
  constexpr int to_dimacs() const { return negated() ? -(var() + 1) : var() + 1; }

 private:
  std::int32_t code_ = -2;
};

enum class Status { Sat, Unsat };

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// Incremental CDCL solver: two watched literals, VSIDS, phase saving, Luby
/// restarts and activity-based learnt clause deletion. Clauses may be added
/// between calls to solve(); assumptions hold for a single call only. After
/// an Unsat answer under assumptions, failed_assumptions() is the subset of
/// the assumptions that the final conflict depends on.
class Solver {
 public:
  explicit Solver(std::uint64_t seed = 0);

  Var new_var();
  std::size_t num_vars() const { return assigns_.size(); }
  std::size_t num_clauses() const { return num_problem_clauses_; }

  /// Returns false once the clause set is unsatisfiable at the top level.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) {
    return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
  }

  Status solve(std::span<const Lit> assumptions = {});
  Status solve(std::initializer_list<Lit> assumptions) {
    return solve(std::span<const Lit>(assumptions.begin(), assumptions.size()));
  }

  /// Model access; only meaningful after the last solve() returned Sat.
  bool model_value(Var v) const { return model_[static_cast<std::size_t>(v)]; }
  bool model_value(Lit l) const { return model_value(l.var()) != l.negated(); }

  const std::vector<Lit>& failed_assumptions() const { return failed_; }
  bool okay() const { return ok_; }
  const SolverStats& stats() const { return stats_; }

  /// Bounds the number of conflicts per solve() call; 0 means unbounded.
  /// Exceeding the budget throws std::runtime_error.
  void set_conflict_budget(std::uint64_t budget) { conflict_budget_ = budget; }

  /// Redraws every saved phase; later models then tend to differ.
  void randomize_phases(std::uint64_t seed);

 private:
  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = 0xffffffffu;
  enum : std::uint8_t { kTrue = 0, kFalse = 1, kUndef = 2 };

  struct Clause {
    std::vector<Lit> lits;
    double activity = 0.0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  std::uint8_t value(Lit l) const {
    const std::uint8_t v = assigns_[static_cast<std::size_t>(l.var())];
    return v == kUndef ? static_cast<std::uint8_t>(kUndef) : static_cast<std::uint8_t>(v ^ static_cast<std::uint8_t>(l.negated()));
  }
  int level(Var v) const { return level_[static_cast<std::size_t>(v)]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level);
  bool literal_redundant(Lit l) const;
  void analyze_final(Lit p);
  void cancel_until(int lvl);
  Lit pick_branch();
  void attach(CRef cr);
  CRef store_clause(std::vector<Lit> lits, bool learnt);
  void reduce_db();
  bool locked(const Clause& c, CRef cr) const;

  void bump_var(Var v);
  void bump_clause(Clause& c);
  void heap_insert(Var v);
  void heap_up(std::size_t pos);
  void heap_down(std::size_t pos);
  Var heap_pop();
  bool heap_less(Var a, Var b) const {
    return activity_[static_cast<std::size_t>(a)] > activity_[static_cast<std::size_t>(b)];
  }

  static double luby(double y, int x);

  std::vector<Clause> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::uint8_t> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;
  mutable std::vector<std::uint8_t> seen_;
  std::vector<bool> model_;
  std::vector<Lit> failed_;
  std::vector<Lit> assumptions_;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  double max_learnts_ = 0.0;
  std::size_t num_problem_clauses_ = 0;
  std::uint64_t conflict_budget_ = 0;
  bool ok_ = true;
  SolverStats stats_;
  std::mt19937_64 rng_;
};

}  // namespace memrep::sat
