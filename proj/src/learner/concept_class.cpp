#include "memrep/learner/concept_class.hpp"

#include <algorithm>
#include <set>

#include "memrep/core/consistency.hpp"
#include "memrep/core/error.hpp"

namespace memrep::learner {

void ConceptClass::set_size_index(std::size_t s) {
  if (s < 1 || s > max_size_index()) throw InvalidArgument("size index out of range");
  size_index_ = s;
}

DfaClass::DfaClass(Alphabet alphabet, std::size_t max_states, std::optional<dfa::Dfa> prior, std::uint64_t seed)
    : alphabet_(std::move(alphabet)), max_states_(max_states), prior_(std::move(prior)), seed_(seed) {
  if (max_states < 1) throw InvalidArgument("state cap must be positive");
  if (prior_ && !(prior_->alphabet() == alphabet_)) throw InvalidArgument("prior alphabet mismatch");
}

dfa::SatEncoding& DfaClass::encoding(std::size_t k) {
  auto& slot = encodings_[k];
  if (!slot) slot = std::make_unique<dfa::SatEncoding>(alphabet_, k, mix64(seed_ + k));
  return *slot;
}

std::vector<Concept> DfaClass::sample(const KnowledgeBase& kb, std::size_t n, std::mt19937_64& rng) {
  auto& enc = encoding(size_index_);
  std::vector<Concept> out;
  std::set<std::string> seen;
  auto take = [&](const std::vector<dfa::Dfa>& found) {
    for (const auto& d : found) {
      Concept c(prior_ ? dfa::conjunction(d, *prior_) : d);
      if (out.size() < n && seen.insert(c.key()).second) out.push_back(std::move(c));
    }
  };
  // Distinct automata may coincide under the prior; widen the search then.
  std::size_t want = n;
  while (true) {
    auto found = enc.enumerate(kb, want, 4 * want, &rng);
    out.clear();
    seen.clear();
    take(found);
    if (!prior_ || out.size() >= n || found.size() < want || want >= 8 * n) break;
    want *= 2;
  }
  return out;
}

bool DfaClass::satisfiable(const KnowledgeBase& kb, std::size_t size_index) { return encoding(size_index).satisfiable(kb); }

std::vector<Atom> DfaClass::witnesses(const Concept& a, const Concept& b, std::size_t n, std::mt19937_64& rng) {
  dfa::Dfa not_b = b.dfa();
  for (dfa::State q = 0; q < not_b.num_states(); ++q) not_b.set_accepting(q, !not_b.accepting(q));
  const dfa::Dfa diff = dfa::conjunction(a.dfa(), not_b);
  std::vector<Atom> out;
  auto first = dfa::shortest_accepted(diff);
  if (!first) return out;
  out.emplace_back(*first);
  for (std::size_t tries = 0; out.size() < n && tries < 4 * n; ++tries) {
    Atom w = *dfa::sample_accepted(diff, 4, rng);
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::size_t> DfaClass::core(const KnowledgeBase& kb, const std::vector<bool>& hard) {
  return encoding(size_index_).core(kb, hard, true);
}

GridClass::GridClass(std::size_t d, std::size_t max_size_index) : d_(d), max_size_index_(max_size_index) {
  if (d < 1) throw InvalidArgument("grid dimension must be positive");
  if (max_size_index < 1) throw InvalidArgument("size cap must be positive");
}

monotone::GridFamily GridClass::grid(std::size_t size_index) const { return {d_, monotone::grid_resolution(size_index)}; }

std::vector<Concept> GridClass::sample(const KnowledgeBase& kb, std::size_t n, std::mt19937_64& rng) {
  auto all = monotone::grid_consistent_set(grid(size_index_), kb);
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > n) all.resize(n);
  std::vector<Concept> out;
  for (auto& p : all) out.emplace_back(monotone::Threshold(std::move(p)));
  return out;
}

bool GridClass::satisfiable(const KnowledgeBase& kb, std::size_t size_index) {
  const auto fam = grid(size_index);
  for (std::size_t f = 0; f < fam.size(); ++f)
    if (is_consistent(monotone::Threshold(fam.point(f)), kb)) return true;
  return false;
}

std::vector<Atom> GridClass::witnesses(const Concept& a, const Concept& b, std::size_t n, std::mt19937_64& rng) {
  std::vector<Atom> in_a;
  for (const auto& p : grid(size_index_).points()) {
    Atom x(p);
    if (a.contains(x) && !b.contains(x)) in_a.push_back(std::move(x));
  }
  std::vector<Atom> out;
  if (in_a.empty()) return out;
  out.push_back(in_a.front());
  std::shuffle(in_a.begin() + 1, in_a.end(), rng);
  for (std::size_t i = 1; i < in_a.size() && out.size() < n; ++i) out.push_back(in_a[i]);
  return out;
}

std::vector<std::size_t> GridClass::core(const KnowledgeBase& kb, const std::vector<bool>& hard) {
  if (satisfiable(kb, size_index_)) throw InvalidArgument("core requested for a satisfiable knowledge base");
  KnowledgeBase work = kb;
  for (const auto& e : kb.entries()) {
    if (!e.active || (e.index < hard.size() && hard[e.index])) continue;
    work.set_active(e.index, false);
    if (satisfiable(work, size_index_)) work.set_active(e.index, true);
  }
  std::vector<std::size_t> out;
  for (const auto& e : work.entries())
    if (e.active) out.push_back(e.index);
  return out;
}

}  // namespace memrep::learner
