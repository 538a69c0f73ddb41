#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memrep/core/knowledge_base.hpp"

namespace memrep::monotone {

/// Uniform grid with i points per axis over [0,1]^d.
struct GridFamily {
  std::size_t d = 1;
  std::size_t i = 2;

  Rational value(std::size_t k) const { return {static_cast<std::int64_t>(k), static_cast<std::int64_t>(i - 1)}; }
  std::size_t size() const;
  /// Points in lexicographic order, first coordinate most significant.
  Point point(std::size_t flat) const;
  std::vector<Point> points() const;
  bool on_grid(const Point& p) const;
};

/// Resolution of the s-th grid of the size-indexed class (s >= 1):
/// 2, 3, 5, 9, 17, 33, ... Each grid refines the previous one.
std::size_t grid_resolution(std::size_t size_index);

/// p ∈ φ_θ iff p >= θ coordinatewise.
bool grid_contains(const Point& theta, const Atom& atom);

/// Concept of the grid family.
class Threshold {
 public:
  Threshold() = default;
  explicit Threshold(Point theta) : theta_(std::move(theta)) {}

  const Point& theta() const { return theta_; }
  bool contains(const Atom& atom) const { return grid_contains(theta_, atom); }
  std::string serialize() const;
  bool operator==(const Threshold&) const = default;

 private:
  Point theta_;
};

/// θ_j = (1 - w_j) / 2 for j <= d and θ_{d+1} = (δ/d + 1) / 2.
std::vector<Rational> thresholded_reward_params(std::span<const Rational> w, const Rational& delta);

/// Lexicographically smallest point, over the family grid refined by both
/// thresholds' coordinates, on which the concepts disagree; labeled by the
/// target.
std::optional<std::pair<Atom, MemLabel>> grid_equivalence(const GridFamily& family, const Point& hypothesis,
                                                          const Point& target);

/// Every grid threshold consistent with kb.
std::vector<Point> grid_consistent_set(const GridFamily& family, const KnowledgeBase& kb);

/// Smart-car onboarding. The raw parameters (τ/T, (D-d)/D) grow the
/// concept as they grow; dominance thresholds are their complements.
Point smartcar_params(const Rational& tau, const Rational& T, const Rational& dist, const Rational& D);
Point smartcar_threshold(const Rational& tau, const Rational& T, const Rational& dist, const Rational& D);
/// A trace taking time t with minimum distance m becomes (1 - t/T, m/D).
Point smartcar_atom(const Rational& t, const Rational& T, const Rational& m, const Rational& D);

}  // namespace memrep::monotone
