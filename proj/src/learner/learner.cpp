#include "memrep/learner/learner.hpp"

#include <algorithm>
#include <sstream>

#include "memrep/core/error.hpp"

namespace memrep::learner {

using strategy::Arm;

std::string_view to_string(RecoveryMode mode) {
  switch (mode) {
    case RecoveryMode::Off: return "off";
    case RecoveryMode::DropCore: return "drop-core";
    case RecoveryMode::Interactive: return "interactive";
  }
  return "?";
}

RecoveryMode parse_recovery(std::string_view text) {
  if (text == "off") return RecoveryMode::Off;
  if (text == "drop-core") return RecoveryMode::DropCore;
  if (text == "interactive") return RecoveryMode::Interactive;
  throw ParseError("unknown recovery mode '" + std::string(text) + "'");
}

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Membership: return "membership";
    case QueryKind::Preference: return "preference";
    case QueryKind::Equivalence: return "equivalence";
  }
  return "?";
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Querying: return "querying";
    case Status::Violation: return "violation";
    case Status::Done: return "done";
    case Status::Failed: return "failed";
  }
  return "?";
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::NoConsistentConcept: return "no-consistent-concept";
    case FailureKind::RoundLimit: return "round-limit";
    case FailureKind::UnresolvedViolations: return "unresolved-violations";
  }
  return "?";
}

Learner::Learner(std::unique_ptr<ConceptClass> cls, LearnerConfig config)
    : cls_(std::move(cls)), config_(config), rng_(config.seed) {
  config_.costs.validate();
  if (config_.max_rounds < 1) throw InvalidArgument("round limit must be positive");
  if (config_.strategy.alpha < 2 || config_.strategy.beta < config_.strategy.alpha)
    throw InvalidArgument("need 2 <= alpha <= beta");
  cls_->set_size_index(1);
  advance();
}

const Query& Learner::pending() const {
  if (status_ != Status::Querying) throw Error("no pending query");
  return pending_;
}

void Learner::fail(FailureKind kind) {
  status_ = Status::Failed;
  failure_ = kind;
  round_.reset();
}

bool Learner::asked_mem(const Atom& x) const {
  for (const auto& e : kb_.entries())
    if (e.is_mem() && e.mem().atom == x) return true;
  return false;
}

bool Learner::asked_pref(const Atom& x, const Atom& y) const {
  for (const auto& e : kb_.entries()) {
    if (e.is_mem()) continue;
    const auto& p = e.pref();
    if ((p.lhs == x && p.rhs == y) || (p.lhs == y && p.rhs == x)) return true;
  }
  return false;
}

std::vector<bool> Learner::trusted_mask() const {
  std::vector<bool> hard(kb_.size());
  for (const auto& e : kb_.entries()) hard[e.index] = trusted(e.source);
  return hard;
}

std::size_t Learner::trusted_size() {
  std::size_t n = 0;
  for (const auto& e : kb_.entries()) n += trusted(e.source);
  if (n == trusted_seen_) return k_trusted_;
  trusted_seen_ = n;
  KnowledgeBase only = kb_;
  for (const auto& e : kb_.entries())
    if (!trusted(e.source)) only.set_active(e.index, false);
  while (k_trusted_ < cls_->max_size_index() && !cls_->satisfiable(only, k_trusted_)) ++k_trusted_;
  return k_trusted_;
}

void Learner::reset_size() {
  const std::size_t k = cls_->size_index();
  for (std::size_t s = 1; s < k; ++s) {
    if (cls_->satisfiable(kb_, s)) {
      cls_->set_size_index(s);
      return;
    }
  }
}

void Learner::drop(const std::vector<std::size_t>& entries) {
  if (entries.empty()) return;
  for (auto i : entries) kb_.set_active(i, false);
  counts_.dropped += entries.size();
  if (!records_.empty()) {
    auto& d = records_.back()["dropped"];
    for (auto i : entries) d.push_back(i);
  }
}

bool Learner::check_violations() {
  ViolationReport report = detect_violations(kb_);
  if (report.empty()) return true;
  std::vector<std::size_t> untrusted;
  for (const auto& v : report.violations) {
    bool any = false;
    for (auto i : v.entries) {
      if (trusted(kb_.entry(i).source)) continue;
      any = true;
      untrusted.push_back(i);
    }
    if (!any) {
      fail(FailureKind::UnresolvedViolations);
      return false;
    }
  }
  if (config_.recovery == RecoveryMode::Interactive) {
    violations_ = std::move(report);
    status_ = Status::Violation;
    return false;
  }
  std::sort(untrusted.begin(), untrusted.end());
  untrusted.erase(std::unique(untrusted.begin(), untrusted.end()), untrusted.end());
  drop(untrusted);
  return true;
}

bool Learner::handle_unsat() {
  const std::size_t k = cls_->size_index();
  const bool at_cap = k >= cls_->max_size_index();
  const RecoveryMode mode = config_.recovery;
  const bool recover = (mode == RecoveryMode::DropCore && (at_cap || k >= trusted_size() + config_.recovery_slack)) ||
                       (mode == RecoveryMode::Interactive && at_cap);
  if (!recover) {
    if (!at_cap) {
      cls_->set_size_index(k + 1);
      return true;
    }
    fail(detect_violations(kb_).empty() ? FailureKind::NoConsistentConcept : FailureKind::UnresolvedViolations);
    return false;
  }
  std::vector<std::size_t> soft;
  for (auto i : cls_->core(kb_, trusted_mask()))
    if (!trusted(kb_.entry(i).source)) soft.push_back(i);
  if (soft.empty()) {
    if (!at_cap) {
      cls_->set_size_index(k + 1);
      return true;
    }
    fail(FailureKind::NoConsistentConcept);
    return false;
  }
  if (mode == RecoveryMode::Interactive) {
    violations_ = ViolationReport{{Violation{ViolationKind::Unsatisfiable, soft}}};
    status_ = Status::Violation;
    return false;
  }
  drop(soft);
  reset_size();
  return true;
}

bool Learner::plan_round(const std::vector<Concept>& sample) {
  const auto& sc = config_.strategy;
  const std::size_t psi = std::min(sc.alpha, sample.size());
  std::vector<Atom> xs;
  auto add = [&](const std::vector<Atom>& atoms, std::size_t cap) {
    for (const auto& a : atoms) {
      if (xs.size() >= cap) return;
      if (std::find(xs.begin(), xs.end(), a) == xs.end()) xs.push_back(a);
    }
  };
  for (std::size_t attempt = 0; attempt < 4; ++attempt) {
    const std::size_t per_pair = std::size_t{2} << attempt;
    const std::size_t cap = sc.beta << attempt;
    // Up to two witnesses per concept, each against every other concept of Ψ.
    for (std::size_t i = 0; i < psi; ++i)
      for (std::size_t j = 0; j < psi; ++j)
        if (i != j) add(cls_->witnesses(sample[i], sample[j], per_pair / (psi - 1) + (attempt ? 1 : 0), rng_), cap);
    for (std::size_t j = psi; j < sample.size() && xs.size() < std::max(sc.alpha, attempt ? cap : 0); ++j) {
      add(cls_->witnesses(sample[0], sample[j], 1, rng_), cap);
      add(cls_->witnesses(sample[j], sample[0], 1, rng_), cap);
    }

    strategy::Table table(sample.size(), std::vector<bool>(xs.size()));
    for (std::size_t c = 0; c < sample.size(); ++c)
      for (std::size_t x = 0; x < xs.size(); ++x) table[c][x] = sample[c].contains(xs[x]);
    std::unique_ptr<bool[]> mem_ok(new bool[xs.size()]);
    std::vector<std::vector<bool>> pair_ok(xs.size(), std::vector<bool>(xs.size(), false));
    for (std::size_t x = 0; x < xs.size(); ++x) {
      mem_ok[x] = !asked_mem(xs[x]);
      for (std::size_t y = 0; y < xs.size(); ++y) pair_ok[x][y] = x != y && !asked_pref(xs[x], xs[y]);
    }
    const auto choice =
        strategy::select_arms(table, psi, xs, std::span<const bool>(mem_ok.get(), xs.size()), pair_ok);
    const strategy::Availability avail{config_.costs.membership_allowed() && choice.has_mem,
                                       config_.costs.preference_allowed() && choice.has_pref};
    if (!avail[0] && !avail[1]) continue;

    const double n = static_cast<double>(sample.size());
    const double scale = config_.costs.scale();
    const std::array<double, 2> worst{avail[0] ? config_.costs.a / scale * choice.mem_worst / n : 1.0,
                                      avail[1] ? config_.costs.b / scale * choice.pref_worst / n : 1.0};
    Round r;
    r.advice = {strategy::pessimistic_advice(worst, avail, sc.softmax_temp),
                strategy::historical_advice(bandit_, avail, sc.softmax_temp)};
    r.draw = strategy::exp4_draw(bandit_, r.advice, rng_);
    r.table = std::move(table);
    r.sampled = sample.size();
    r.x = choice.x;
    r.y = choice.y;
    r.z = choice.z;
    r.worst_loss = worst[static_cast<std::size_t>(r.draw.arm)];
    if (r.draw.arm == Arm::Membership)
      pending_ = {QueryKind::Membership, {xs[choice.x]}, std::nullopt};
    else
      pending_ = {QueryKind::Preference, {xs[choice.y], xs[choice.z]}, std::nullopt};
    r.atoms = std::move(xs);
    round_ = std::move(r);
    status_ = Status::Querying;
    return true;
  }
  return false;
}

void Learner::advance() {
  round_.reset();
  while (true) {
    if (counts_.n_mem + counts_.n_pref + counts_.n_equiv >= config_.max_rounds) return fail(FailureKind::RoundLimit);
    if (config_.recovery != RecoveryMode::Off && !check_violations()) return;
    const auto& sc = config_.strategy;
    auto sample = cls_->sample(kb_, sc.alpha + sc.mc_samples, rng_);
    if (sample.empty()) {
      if (!handle_unsat()) return;
      continue;
    }
    status_ = Status::Querying;
    if (sample.size() >= 2 && plan_round(sample)) return;
    // A unique survivor, or nothing left to ask that could separate the
    // sampled concepts: let the equivalence oracle decide.
    pending_ = {QueryKind::Equivalence, {}, sample.front()};
    return;
  }
}

void Learner::finish_round(std::size_t survivors, const std::string& answer) {
  const Round& r = *round_;
  const double c = r.draw.arm == Arm::Membership ? config_.costs.a : config_.costs.b;
  const double l = strategy::loss(config_.costs, c, static_cast<double>(r.sampled), static_cast<double>(survivors));
  strategy::exp4_update(bandit_, r.advice, r.draw.arm, r.draw.probability, l, config_.strategy.eta);
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : pending_.atoms) atoms.push_back(atom_json(a));
  records_.push_back({{"round", records_.size() + 1},
                      {"kind", to_string(pending_.kind)},
                      {"atoms", atoms},
                      {"answer", answer},
                      {"loss", l},
                      {"predicted_loss", r.worst_loss},
                      {"size_before", r.sampled},
                      {"size_after", survivors},
                      {"expert", r.draw.expert == 0 ? "pessimistic" : "historical"},
                      {"weights", {bandit_.weights[0], bandit_.weights[1]}},
                      {"size_index", cls_->size_index()},
                      {"dropped", nlohmann::json::array()}});
}

void Learner::answer_membership(MemLabel label) {
  if (status_ != Status::Querying || pending_.kind != QueryKind::Membership) throw Error("no pending membership query");
  const Atom& x = pending_.atoms[0];
  kb_.add_membership(x, label);
  ++counts_.n_mem;
  finish_round(strategy::mem_survivors(round_->table, round_->x, label == MemLabel::Member), std::string(to_token(label)));
  advance();
}

void Learner::answer_preference(PrefLabel label) {
  if (status_ != Status::Querying || pending_.kind != QueryKind::Preference) throw Error("no pending preference query");
  kb_.add_preference(pending_.atoms[0], pending_.atoms[1], label);
  ++counts_.n_pref;
  int outcome = 3;
  switch (label) {
    case PrefLabel::Less: outcome = 0; break;
    case PrefLabel::Greater: outcome = 1; break;
    case PrefLabel::Equiv: outcome = 2; break;
    case PrefLabel::Incomparable: outcome = 3; break;
  }
  finish_round(strategy::pref_survivors(round_->table, round_->y, round_->z, outcome), std::string(to_token(label)));
  advance();
}

void Learner::answer_equivalence(const std::optional<oracles::Counterexample>& cx) {
  if (status_ != Status::Querying || pending_.kind != QueryKind::Equivalence) throw Error("no pending equivalence query");
  if (cx && pending_.hypothesis->contains(cx->atom) == (cx->label == MemLabel::Member))
    throw InvalidArgument("the hypothesis already labels the counterexample that way");
  ++counts_.n_equiv;
  nlohmann::json rec{{"round", records_.size() + 1},
                     {"kind", "equivalence"},
                     {"hypothesis", pending_.hypothesis->to_json()},
                     {"size_index", cls_->size_index()},
                     {"dropped", nlohmann::json::array()}};
  if (!cx) {
    rec["answer"] = "accept";
    records_.push_back(std::move(rec));
    result_ = pending_.hypothesis;
    status_ = Status::Done;
    return;
  }
  rec["answer"] = {{"atom", atom_json(cx->atom)}, {"label", to_token(cx->label)}};
  records_.push_back(std::move(rec));
  std::vector<std::size_t> stale;
  for (const auto& e : kb_.entries())
    if (e.active && e.is_mem() && e.mem().atom == cx->atom && e.mem().label != cx->label && !trusted(e.source))
      stale.push_back(e.index);
  drop(stale);
  kb_.add_membership(cx->atom, cx->label, Source::Counterexample);
  advance();
}

void Learner::retract(const std::vector<std::size_t>& entries) {
  if (status_ != Status::Querying && status_ != Status::Violation) throw Error("session is finished");
  for (auto i : entries)
    if (i >= kb_.size()) throw InvalidArgument("unknown entry " + std::to_string(i));
  if (entries.empty() && status_ == Status::Querying) return;
  for (auto i : entries) kb_.set_active(i, false);
  if (!records_.empty()) {
    auto& r = records_.back()["retracted"];
    for (auto i : entries) r.push_back(i);
  }
  violations_ = {};
  status_ = Status::Querying;
  reset_size();
  advance();
}

std::string Learner::transcript_jsonl() const {
  std::ostringstream out;
  for (const auto& r : records_) out << r.dump() << '\n';
  return out.str();
}

nlohmann::json Learner::summary() const {
  nlohmann::json j{{"status", to_string(status_)},
                   {"n_mem", counts_.n_mem},
                   {"n_pref", counts_.n_pref},
                   {"n_equiv", counts_.n_equiv},
                   {"dropped", counts_.dropped},
                   {"cost_total", cost_total()},
                   {"size_index", cls_->size_index()},
                   {"concept", result_ ? result_->to_json() : nlohmann::json()}};
  j["failure"] = failure_ ? nlohmann::json(to_string(*failure_)) : nlohmann::json();
  return j;
}

RecoveryReport recover(KnowledgeBase& kb, ConceptClass& cls) {
  RecoveryReport out;
  out.violations = detect_violations(kb);
  for (auto i : out.violations.entry_set()) {
    if (trusted(kb.entry(i).source)) continue;
    kb.set_active(i, false);
    out.dropped.push_back(i);
  }
  if (!cls.satisfiable(kb, cls.size_index())) {
    std::vector<bool> hard(kb.size());
    for (const auto& e : kb.entries()) hard[e.index] = trusted(e.source);
    for (auto i : cls.core(kb, hard)) {
      if (trusted(kb.entry(i).source)) continue;
      kb.set_active(i, false);
      out.dropped.push_back(i);
    }
  }
  std::sort(out.dropped.begin(), out.dropped.end());
  return out;
}

LearnOutcome learn(std::unique_ptr<ConceptClass> cls, LearnerConfig config, oracles::Teacher& teacher,
                   oracles::EquivalenceOracle& equivalence) {
  Learner l(std::move(cls), config);
  while (l.status() == Status::Querying || l.status() == Status::Violation) {
    if (l.status() == Status::Violation) {
      std::vector<std::size_t> soft;
      for (auto i : l.violations().entry_set())
        if (!trusted(l.kb().entry(i).source)) soft.push_back(i);
      l.retract(soft);
      continue;
    }
    const Query& q = l.pending();
    switch (q.kind) {
      case QueryKind::Membership: l.answer_membership(teacher.membership(q.atoms[0])); break;
      case QueryKind::Preference: l.answer_preference(teacher.compare(q.atoms[0], q.atoms[1])); break;
      case QueryKind::Equivalence: l.answer_equivalence(equivalence.check(*q.hypothesis)); break;
    }
  }
  return {l.status(), l.result(), l.failure(), l.counts(), l.cost_total(), l.records(), l.summary()};
}

}  // namespace memrep::learner
