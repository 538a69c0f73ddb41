#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memrep/core/atom.hpp"

namespace memrep::strategy {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// cost = a · #mem + b · #pref. An infinite cost removes that query type.
struct CostModel {
  double a = 1.0;
  double b = 1.0;

  bool membership_allowed() const { return a < kInfinity; }
  bool preference_allowed() const { return b < kInfinity; }
  /// Largest finite cost; the loss normalizer.
  double scale() const;
  double total(std::size_t n_mem, std::size_t n_pref) const;
  /// Throws InvalidArgument unless both costs are positive and one is finite.
  void validate() const;
};

/// (c / max(a,b)) · (after / before), clamped to [0,1].
double loss(const CostModel& costs, double c, double size_before, double size_after);

enum class Arm : std::size_t { Membership = 0, Preference = 1 };

/// Distribution over {membership, preference}.
using Advice = std::array<double, 2>;
using Availability = std::array<bool, 2>;

/// Softmax over negated losses at temperature T; unavailable arms get 0.
Advice softmax_advice(const std::array<double, 2>& losses, const Availability& available, double temperature);

struct StrategyConfig {
  std::size_t alpha = 2;
  std::size_t beta = 4;
  double eta = 0.5;
  double softmax_temp = 0.2;
  std::size_t mc_samples = 16;
};

struct BanditState {
  /// Expert weights: pessimistic, historical.
  std::array<double, 2> weights{1.0, 1.0};
  std::array<double, 2> loss_sum{0.0, 0.0};
  std::array<std::size_t, 2> pulls{0, 0};

  double average_loss(Arm arm) const;
};

Advice pessimistic_advice(const std::array<double, 2>& worst_losses, const Availability& available, double temperature);
Advice historical_advice(const BanditState& state, const Availability& available, double temperature);

struct Draw {
  std::size_t expert;
  Arm arm;
  /// Mixture probability of the drawn arm.
  double probability;
};

/// Expert drawn proportionally to weight, arm drawn from its advice.
Draw exp4_draw(const BanditState& state, const std::array<Advice, 2>& advice, std::mt19937_64& rng);

/// Importance-weighted exp4 update; weights are renormalized to max 1.
void exp4_update(BanditState& state, const std::array<Advice, 2>& advice, Arm arm, double probability, double loss,
                 double eta);

/// Membership of each concept on each atom: table[c][x].
using Table = std::vector<std::vector<bool>>;

struct ArmChoice {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;
  bool has_mem = false;
  bool has_pref = false;
  /// Worst-case survivors within the extended sample.
  std::size_t mem_worst = 0;
  std::size_t pref_worst = 0;
};

/// Survivors of each outcome among the table's concepts.
std::size_t mem_survivors(const Table& table, std::size_t x, bool member);
/// outcome: 0 for y ≺ z, 1 for y ≻ z, 2 for y ≡ z, 3 for incomparable.
std::size_t pref_survivors(const Table& table, std::size_t y, std::size_t z, int outcome);

/// Picks the membership atom and the preference pair minimizing worst-case
/// survivors among the first `psi` concepts, then among all rows, then by
/// canonical atom order. Atoms must be distinct; atoms or pairs with a
/// false allow flag are skipped.
ArmChoice select_arms(const Table& table, std::size_t psi, std::span<const Atom> atoms,
                      std::span<const bool> mem_allowed, const std::vector<std::vector<bool>>& pair_allowed);

}  // namespace memrep::strategy
