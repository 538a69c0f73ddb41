#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "memrep/concept.hpp"
#include "memrep/dfa/encoding.hpp"

namespace memrep::learner {

/// A size-indexed concept class Φ = ∪ Φ_s searched from s = 1 upward.
/// Implementations may cache per entry index, so an instance follows a single
/// append-only knowledge base.
class ConceptClass {
 public:
  virtual ~ConceptClass() = default;

  virtual std::string family() const = 0;
  virtual const Alphabet& alphabet() const = 0;
  virtual std::size_t max_size_index() const = 0;

  std::size_t size_index() const { return size_index_; }
  void set_size_index(std::size_t s);

  /// Up to n distinct concepts of the current size consistent with the
  /// active entries.
  virtual std::vector<Concept> sample(const KnowledgeBase& kb, std::size_t n, std::mt19937_64& rng) = 0;
  virtual bool satisfiable(const KnowledgeBase& kb, std::size_t size_index) = 0;
  /// Up to n atoms in a but not in b; the first is canonical (shortest word
  /// or smallest grid point), the rest are random.
  virtual std::vector<Atom> witnesses(const Concept& a, const Concept& b, std::size_t n, std::mt19937_64& rng) = 0;
  /// Active entries jointly inconsistent at the current size. Entries flagged
  /// hard are kept during minimization. Requires an unsatisfiable kb.
  virtual std::vector<std::size_t> core(const KnowledgeBase& kb, const std::vector<bool>& hard) = 0;

 protected:
  std::size_t size_index_ = 1;
};

/// DFAs with at most k states, k = size index. With a prior P the concepts
/// are D ∧ P and only D is synthesized.
class DfaClass final : public ConceptClass {
 public:
  DfaClass(Alphabet alphabet, std::size_t max_states = 10, std::optional<dfa::Dfa> prior = std::nullopt,
           std::uint64_t seed = 0);

  std::string family() const override { return "dfa"; }
  const Alphabet& alphabet() const override { return alphabet_; }
  std::size_t max_size_index() const override { return max_states_; }
  const std::optional<dfa::Dfa>& prior() const { return prior_; }

  std::vector<Concept> sample(const KnowledgeBase& kb, std::size_t n, std::mt19937_64& rng) override;
  bool satisfiable(const KnowledgeBase& kb, std::size_t size_index) override;
  std::vector<Atom> witnesses(const Concept& a, const Concept& b, std::size_t n, std::mt19937_64& rng) override;
  std::vector<std::size_t> core(const KnowledgeBase& kb, const std::vector<bool>& hard) override;

 private:
  dfa::SatEncoding& encoding(std::size_t k);

  Alphabet alphabet_;
  std::size_t max_states_;
  std::optional<dfa::Dfa> prior_;
  std::uint64_t seed_;
  std::map<std::size_t, std::unique_ptr<dfa::SatEncoding>> encodings_;
};

/// Dominance thresholds on the grid with grid_resolution(s) points per axis.
class GridClass final : public ConceptClass {
 public:
  explicit GridClass(std::size_t d, std::size_t max_size_index = 6);

  std::string family() const override { return "monotone"; }
  const Alphabet& alphabet() const override { return alphabet_; }
  std::size_t max_size_index() const override { return max_size_index_; }
  std::size_t dimension() const { return d_; }
  monotone::GridFamily grid(std::size_t size_index) const;

  std::vector<Concept> sample(const KnowledgeBase& kb, std::size_t n, std::mt19937_64& rng) override;
  bool satisfiable(const KnowledgeBase& kb, std::size_t size_index) override;
  std::vector<Atom> witnesses(const Concept& a, const Concept& b, std::size_t n, std::mt19937_64& rng) override;
  std::vector<std::size_t> core(const KnowledgeBase& kb, const std::vector<bool>& hard) override;

 private:
  Alphabet alphabet_;
  std::size_t d_;
  std::size_t max_size_index_;
};

}  // namespace memrep::learner
