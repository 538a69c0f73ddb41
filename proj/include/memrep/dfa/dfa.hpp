#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memrep/core/atom.hpp"

namespace memrep::dfa {

using State = std::uint32_t;

/// Complete DFA with initial state 0.
class Dfa {
 public:
  Dfa() = default;
  /// All transitions lead to state 0 and no state accepts.
  Dfa(Alphabet alphabet, std::size_t states);

  static Dfa universal(const Alphabet& alphabet);
  static Dfa empty(const Alphabet& alphabet);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t num_states() const { return accepting_.size(); }

  State next(State q, Symbol a) const { return delta_[q * alphabet_.size() + a]; }
  void set_transition(State q, Symbol a, State to) { delta_[q * alphabet_.size() + a] = to; }
  bool accepting(State q) const { return accepting_[q]; }
  void set_accepting(State q, bool acc) { accepting_[q] = acc; }

  State run(const Word& w, State from = 0) const;
  bool accepts(const Word& w) const { return accepting(run(w)); }
  /// Points are never members of a word language.
  bool contains(const Atom& atom) const;

  /// Drops unreachable states and renumbers in breadth-first order.
  Dfa canonical() const;
  /// Minimal DFA in breadth-first numbering; equal languages give equal results.
  Dfa minimize() const;

  /// Canonical JSON text of the minimal DFA.
  std::string serialize() const;

  bool operator==(const Dfa&) const = default;

 private:
  Alphabet alphabet_;
  std::vector<State> delta_;
  std::vector<bool> accepting_;
};

enum class ProductOp { And, Or, Xor };

/// Reachable product; errors on alphabet mismatch.
Dfa product(const Dfa& a, const Dfa& b, ProductOp op);
inline Dfa conjunction(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::And); }
inline Dfa symmetric_difference(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::Xor); }

bool is_empty(const Dfa& d);
bool equivalent(const Dfa& a, const Dfa& b);

/// Shortlex-smallest accepted word.
std::optional<Word> shortest_accepted(const Dfa& d);
inline std::optional<Word> shortest_difference(const Dfa& a, const Dfa& b) {
  return shortest_accepted(symmetric_difference(a, b));
}

/// Uniform draw among accepted words with length in [lmin, lmin + slack],
/// where lmin is the shortest accepted length.
std::optional<Word> sample_accepted(const Dfa& d, std::size_t slack, std::mt19937_64& rng);

/// Uniform draw among all words whose length lies in [lo, hi].
Word sample_word(const Alphabet& alphabet, std::size_t lo, std::size_t hi, std::mt19937_64& rng);

/// Every word of length <= max_len, in shortlex order.
std::vector<Word> all_words(const Alphabet& alphabet, std::size_t max_len);

/// {states, alphabet, transitions: [[q, symbol, q']], initial, accepting}
nlohmann::json to_json(const Dfa& d);
Dfa dfa_from_json(const nlohmann::json& j);
std::string to_dot(const Dfa& d);

}  // namespace memrep::dfa
