#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>

#include "memrep/concept.hpp"
#include "memrep/core/knowledge_base.hpp"

namespace memrep::oracles {

/// Membership and comparison oracle.
class Teacher {
 public:
  virtual ~Teacher() = default;
  virtual MemLabel membership(const Atom& x) = 0;
  /// Less means x ≺ y (y preferred).
  virtual PrefLabel compare(const Atom& x, const Atom& y) = 0;
};

struct Counterexample {
  Atom atom;
  MemLabel label;
};

class EquivalenceOracle {
 public:
  virtual ~EquivalenceOracle() = default;
  /// Nothing when the hypothesis equals the target.
  virtual std::optional<Counterexample> check(const Concept& hypothesis) = 0;
};

using Membership = std::function<bool(const Atom&)>;

struct RandomOrderParams {
  double frac_incomparable = 0.1;
  /// Share of same-label pairs that are strictly ordered; the rest are
  /// equivalent.
  double frac_strict_unforced = 0.9;
  std::uint64_t seed = 0;
};

/// A membership-respecting preorder realized from per-atom hash scores:
/// members outrank non-members, same-label atoms are ordered by random
/// buckets, and pairs are made incomparable by a seeded coin unless earlier
/// answers force a comparison.
std::unique_ptr<Teacher> random_memrep_order(Membership target, RandomOrderParams params);

/// Members beat non-members. Members compare by how many of their
/// two-symbol extensions are accepted; non-members by how late they enter a
/// rejecting sink, then by their longest accepted prefix.
std::unique_ptr<Teacher> tomita_semantic_order(dfa::Dfa target);

/// Members are atoms with cost <= delta; cheaper atoms are preferred.
std::unique_ptr<Teacher> cost_threshold_oracle(std::function<Rational(const Atom&)> cost, Rational delta);

/// Flips memberships and replaces preferences by a different random label,
/// each with probability eps, memoized per query.
std::unique_ptr<Teacher> with_noise(std::unique_ptr<Teacher> inner, double eps, std::uint64_t seed);

/// Uniform sample from the symmetric difference within [lmin, lmin + slack].
std::optional<Counterexample> dfa_counterexample(const dfa::Dfa& target, const dfa::Dfa& hypothesis, std::size_t slack,
                                                 std::mt19937_64& rng);

std::unique_ptr<EquivalenceOracle> dfa_equivalence(dfa::Dfa target, std::size_t slack, std::uint64_t seed);
std::unique_ptr<EquivalenceOracle> grid_equivalence_oracle(monotone::GridFamily family, Point target);

}  // namespace memrep::oracles
