#include "memrep/sat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memrep::sat {

namespace {
constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;
}  // namespace

Solver::Solver(std::uint64_t seed) : rng_(seed) {}

void Solver::randomize_phases(std::uint64_t seed) {
  std::mt19937_64 r(seed);
  for (std::size_t v = 0; v < phase_.size(); ++v) phase_[v] = (r() & 1u) != 0;
}

Var Solver::new_var() {
  const Var v = static_cast<Var>(assigns_.size());
  assigns_.push_back(kUndef);
  level_.push_back(-1);
  reason_.push_back(kNoReason);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_pos_.push_back(-1);
  // The seed perturbs the initial order and polarity so that enumerations
  // with different seeds explore different regions of the model space.
  std::uniform_real_distribution<double> jitter(0.0, 1e-5);
  activity_.push_back(jitter(rng_));
  phase_.push_back((rng_() & 1u) != 0);
  heap_insert(v);
  return v;
}

Solver::CRef Solver::store_clause(std::vector<Lit> lits, bool learnt) {
  Clause c;
  c.lits = std::move(lits);
  c.learnt = learnt;
  clauses_.push_back(std::move(c));
  return static_cast<CRef>(clauses_.size() - 1);
}

void Solver::attach(CRef cr) {
  const Clause& c = clauses_[cr];
  watches_[static_cast<std::size_t>((~c.lits[0]).code())].push_back({cr, c.lits[1]});
  watches_[static_cast<std::size_t>((~c.lits[1]).code())].push_back({cr, c.lits[0]});
}

bool Solver::add_clause(std::span<const Lit> input) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits(input.begin(), input.end());
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  kept.reserve(lits.size());
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return true;
    const auto v = value(lits[i]);
    if (v == kTrue) return true;
    if (v == kUndef) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  const CRef cr = store_clause(std::move(kept), false);
  attach(cr);
  ++num_problem_clauses_;
  return true;
}

void Solver::enqueue(Lit l, CRef reason) {
  const auto v = static_cast<std::size_t>(l.var());
  assigns_[v] = l.negated() ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

Solver::CRef Solver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    ++stats_.propagations;
    auto& ws = watches_[static_cast<std::size_t>(p.code())];
    const Lit false_lit = ~p;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = clauses_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      auto& lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;
      const Lit first = lits[0];
      const Watcher nw{w.cref, first};
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = nw;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != kFalse) {
          lits[1] = lits[k];
          lits[k] = false_lit;
          watches_[static_cast<std::size_t>((~lits[1]).code())].push_back(nw);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = nw;
      if (value(first) == kFalse) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

bool Solver::literal_redundant(Lit l) const {
  const CRef r = reason_[static_cast<std::size_t>(l.var())];
  if (r == kNoReason) return false;
  const auto& lits = clauses_[r].lits;
  for (std::size_t k = 1; k < lits.size(); ++k) {
    const auto v = static_cast<std::size_t>(lits[k].var());
    if (!seen_[v] && level_[v] > 0) return false;
  }
  return true;
}

void Solver::analyze(CRef conflict, std::vector<Lit>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.emplace_back();
  int path_count = 0;
  Lit p;
  bool have_p = false;
  auto index = static_cast<std::ptrdiff_t>(trail_.size()) - 1;

  do {
    Clause& c = clauses_[conflict];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
      const Lit q = c.lits[k];
      const auto v = static_cast<std::size_t>(q.var());
      if (!seen_[v] && level_[v] > 0) {
        bump_var(q.var());
        seen_[v] = 1;
        if (level_[v] >= decision_level()) {
          ++path_count;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen_[static_cast<std::size_t>(trail_[static_cast<std::size_t>(index)].var())]) --index;
    p = trail_[static_cast<std::size_t>(index)];
    --index;
    have_p = true;
    conflict = reason_[static_cast<std::size_t>(p.var())];
    seen_[static_cast<std::size_t>(p.var())] = 0;
    --path_count;
  } while (path_count > 0);
  learnt[0] = ~p;

  const std::vector<Lit> before(learnt.begin() + 1, learnt.end());
  std::size_t keep = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    if (!literal_redundant(learnt[k])) learnt[keep++] = learnt[k];
  }
  learnt.resize(keep);
  for (const Lit l : before) seen_[static_cast<std::size_t>(l.var())] = 0;

  if (learnt.size() == 1) {
    backtrack_level = 0;
    return;
  }
  std::size_t max_i = 1;
  for (std::size_t k = 2; k < learnt.size(); ++k) {
    if (level(learnt[k].var()) > level(learnt[max_i].var())) max_i = k;
  }
  std::swap(learnt[1], learnt[max_i]);
  backtrack_level = level(learnt[1].var());
}

void Solver::analyze_final(Lit p) {
  failed_.clear();
  failed_.push_back(p);
  if (decision_level() == 0) return;
  seen_[static_cast<std::size_t>(p.var())] = 1;
  for (auto i = static_cast<std::ptrdiff_t>(trail_.size()) - 1; i >= trail_lim_[0]; --i) {
    const Lit t = trail_[static_cast<std::size_t>(i)];
    const auto x = static_cast<std::size_t>(t.var());
    if (!seen_[x]) continue;
    if (reason_[x] == kNoReason) {
      failed_.push_back(t);
    } else {
      const auto& lits = clauses_[reason_[x]].lits;
      for (std::size_t k = 1; k < lits.size(); ++k) {
        const auto v = static_cast<std::size_t>(lits[k].var());
        if (level_[v] > 0) seen_[v] = 1;
      }
    }
    seen_[x] = 0;
  }
  seen_[static_cast<std::size_t>(p.var())] = 0;
}

void Solver::cancel_until(int lvl) {
  if (decision_level() <= lvl) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(lvl)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const auto v = static_cast<std::size_t>(trail_[i].var());
    phase_[v] = assigns_[v] == kTrue;
    assigns_[v] = kUndef;
    reason_[v] = kNoReason;
    if (heap_pos_[v] < 0) heap_insert(static_cast<Var>(v));
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(lvl));
  qhead_ = stop;
}

Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const Var v = heap_pop();
    if (assigns_[static_cast<std::size_t>(v)] == kUndef) {
      return Lit(v, !phase_[static_cast<std::size_t>(v)]);
    }
  }
  return Lit();
}

bool Solver::locked(const Clause& c, CRef cr) const {
  const Lit l = c.lits[0];
  return value(l) == kTrue && reason_[static_cast<std::size_t>(l.var())] == cr;
}

void Solver::reduce_db() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    return clauses_[a].activity < clauses_[b].activity;
  });
  const std::size_t half = learnts_.size() / 2;
  std::vector<CRef> kept;
  kept.reserve(learnts_.size());
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    Clause& c = clauses_[learnts_[i]];
    if (i < half && c.lits.size() > 2 && !locked(c, learnts_[i])) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
    } else {
      kept.push_back(learnts_[i]);
    }
  }
  learnts_ = std::move(kept);
  max_learnts_ *= 1.1;
}

void Solver::bump_var(Var v) {
  auto& a = activity_[static_cast<std::size_t>(v)];
  a += var_inc_;
  if (a > 1e100) {
    for (auto& x : activity_) x *= 1e-100;
    var_inc_ *= 1e-100;
  }
  const int pos = heap_pos_[static_cast<std::size_t>(v)];
  if (pos >= 0) heap_up(static_cast<std::size_t>(pos));
}

void Solver::bump_clause(Clause& c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (const CRef cr : learnts_) clauses_[cr].activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void Solver::heap_insert(Var v) {
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t pos) {
  const Var v = heap_[pos];
  while (pos > 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[pos] = heap_[parent];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = parent;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

void Solver::heap_down(std::size_t pos) {
  const Var v = heap_[pos];
  for (;;) {
    std::size_t child = 2 * pos + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[pos] = heap_[child];
    heap_pos_[static_cast<std::size_t>(heap_[pos])] = static_cast<int>(pos);
    pos = child;
  }
  heap_[pos] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(pos);
}

Var Solver::heap_pop() {
  const Var top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  const Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

double Solver::luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

Status Solver::solve(std::span<const Lit> assumptions) {
  failed_.clear();
  if (!ok_) return Status::Unsat;
  cancel_until(0);
  assumptions_.assign(assumptions.begin(), assumptions.end());
  max_learnts_ = std::max(static_cast<double>(num_problem_clauses_) / 3.0, 2000.0);

  std::vector<Lit> learnt;
  std::uint64_t conflicts_here = 0;
  int restarts = 0;
  for (;;) {
    const auto budget = static_cast<std::uint64_t>(luby(2.0, restarts) * kRestartBase);
    std::uint64_t restart_conflicts = 0;
    for (;;) {
      const CRef conflict = propagate();
      if (conflict != kNoReason) {
        ++stats_.conflicts;
        ++conflicts_here;
        ++restart_conflicts;
        if (conflict_budget_ != 0 && conflicts_here > conflict_budget_) {
          cancel_until(0);
          throw std::runtime_error("sat: conflict budget exhausted");
        }
        if (decision_level() == 0) {
          ok_ = false;
          return Status::Unsat;
        }
        int backtrack = 0;
        analyze(conflict, learnt, backtrack);
        cancel_until(backtrack);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          const CRef cr = store_clause(learnt, true);
          learnts_.push_back(cr);
          attach(cr);
          bump_clause(clauses_[cr]);
          enqueue(learnt[0], cr);
        }
        var_inc_ /= kVarDecay;
        cla_inc_ /= kClauseDecay;
        continue;
      }

      if (restart_conflicts >= budget) break;
      if (static_cast<double>(learnts_.size()) >= max_learnts_ + static_cast<double>(trail_.size())) {
        reduce_db();
      }

      Lit next;
      bool have_next = false;
      while (static_cast<std::size_t>(decision_level()) < assumptions_.size()) {
        const Lit a = assumptions_[static_cast<std::size_t>(decision_level())];
        const auto v = value(a);
        if (v == kTrue) {
          trail_lim_.push_back(static_cast<int>(trail_.size()));
        } else if (v == kFalse) {
          analyze_final(a);
          cancel_until(0);
          return Status::Unsat;
        } else {
          next = a;
          have_next = true;
          break;
        }
      }
      if (!have_next) {
        next = pick_branch();
        if (next.code() < 0) {
          model_.assign(assigns_.size(), false);
          for (std::size_t v = 0; v < assigns_.size(); ++v) model_[v] = assigns_[v] == kTrue;
          cancel_until(0);
          return Status::Sat;
        }
        ++stats_.decisions;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(next, kNoReason);
    }
    cancel_until(0);
    ++restarts;
    ++stats_.restarts;
  }
}

}  // namespace memrep::sat
