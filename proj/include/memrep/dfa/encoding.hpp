#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memrep/core/error.hpp"
#include "memrep/core/knowledge_base.hpp"
#include "memrep/dfa/dfa.hpp"
#include "memrep/sat/solver.hpp"

namespace memrep::dfa {

/// Tree of every prefix of every word mentioned in a knowledge base.
struct PrefixTree {
  struct Node {
    std::int32_t parent = -1;
    Symbol symbol = 0;
    std::size_t depth = 0;
    std::vector<std::int32_t> children;
    std::optional<MemLabel> label;
  };

  explicit PrefixTree(std::size_t alphabet_size);

  /// Returns the node of w, creating missing prefixes.
  std::size_t insert(const Word& w);
  std::optional<std::size_t> find(const Word& w) const;

  std::size_t alphabet_size;
  std::vector<Node> nodes;
};

/// Inserts words of all active entries; labels terminals with the first
/// active membership label.
PrefixTree build_prefix_tree(const KnowledgeBase& kb, std::size_t alphabet_size);

struct EncodingOptions {
  /// Breadth-first state numbering. Each model then describes a distinct
  /// DFA with every state reachable.
  bool symmetry_breaking = true;
};

class NoConsistentConcept : public Error {
 public:
  explicit NoConsistentConcept(std::size_t k_max)
      : Error("no consistent DFA with at most " + std::to_string(k_max) + " states"), k_max_(k_max) {}
  std::size_t k_max() const { return k_max_; }

 private:
  std::size_t k_max_;
};

/// k-colouring encoding of DFA identification with one activation literal
/// per knowledge-base entry. Entries are encoded once and toggled through
/// assumptions, so one instance follows a growing knowledge base.
class SatEncoding {
 public:
  SatEncoding(Alphabet alphabet, std::size_t k, std::uint64_t seed = 0, EncodingOptions options = {});

  std::size_t k() const { return k_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const PrefixTree& tree() const { return tree_; }
  std::size_t num_vars() const { return solver_.num_vars(); }
  std::size_t num_clauses() const { return clauses_.size(); }

  /// Encodes entries of kb not seen yet (active or not).
  void sync(const KnowledgeBase& kb);

  /// Activation assumptions mirroring kb's active flags.
  std::vector<sat::Lit> assumptions(const KnowledgeBase& kb) const;

  bool satisfiable(const KnowledgeBase& kb);

  /// Up to `want` distinct languages, each a minimal DFA. Enumeration stops
  /// after max_models models even if fewer languages were found. With an
  /// rng, saved phases are redrawn before every model.
  std::vector<Dfa> enumerate(const KnowledgeBase& kb, std::size_t want, std::size_t max_models = SIZE_MAX,
                             std::mt19937_64* rng = nullptr);

  /// Entries whose activation literals appear in the final conflict. Entries
  /// flagged in `hard` are never removed during minimization. Throws if
  /// the instance is satisfiable.
  std::vector<std::size_t> core(const KnowledgeBase& kb, const std::vector<bool>& hard, bool minimize);

  std::string dimacs() const;

 private:
  sat::Lit x(std::size_t node, std::size_t color) const { return sat::Lit::pos(x_[node * k_ + color]); }
  sat::Lit y(std::size_t i, Symbol a, std::size_t j) const {
    return sat::Lit::pos(y_[(i * alphabet_.size() + a) * k_ + j]);
  }
  sat::Lit z(std::size_t i) const { return sat::Lit::pos(z_[i]); }

  void add(std::vector<sat::Lit> clause);
  std::size_t node(const Word& w);
  void encode_entry(const Entry& e);
  void add_preference(sat::Lit act, std::size_t lower, std::size_t upper);
  void add_symmetry_breaking();
  Dfa decode() const;

  Alphabet alphabet_;
  std::size_t k_;
  EncodingOptions options_;
  sat::Solver solver_;
  PrefixTree tree_;
  std::vector<sat::Var> x_;
  std::vector<sat::Var> y_;
  std::vector<sat::Var> z_;
  std::vector<std::optional<sat::Lit>> activation_;
  std::vector<std::vector<sat::Lit>> clauses_;
};

SatEncoding encode(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, EncodingOptions options = {});

std::vector<Dfa> synthesize(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, std::size_t want,
                            std::uint64_t seed = 0);

struct SizedDfa {
  std::size_t k;
  Dfa dfa;
};

/// Smallest k <= k_max admitting a consistent DFA.
SizedDfa min_size_synthesize(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k_max);

/// Core at size k, deletion-minimized when it has at most 20 entries.
std::vector<std::size_t> unsat_core(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k);

std::size_t count_consistent(const KnowledgeBase& kb, const Alphabet& alphabet, std::size_t k, std::size_t cap);

}  // namespace memrep::dfa
