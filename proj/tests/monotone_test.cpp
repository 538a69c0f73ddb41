#include "doctest.h"

#include "memrep/core/error.hpp"
#include "memrep/monotone/grid.hpp"

using namespace memrep;
using namespace memrep::monotone;

namespace {

Point pt(std::initializer_list<Rational> c) { return Point{std::vector<Rational>(c)}; }

}  // namespace

TEST_CASE("dominance membership") {
  CHECK(grid_contains(pt({0, 0}), pt({Rational(1, 3), 0})));
  CHECK(grid_contains(pt({1, 1}), pt({1, 1})));
  CHECK_FALSE(grid_contains(pt({1, 1}), pt({1, Rational(9, 10)})));
  CHECK_FALSE(grid_contains(pt({Rational(1, 2), Rational(1, 2)}), pt({Rational(3, 5), Rational(2, 5)})));
  CHECK_THROWS_AS(grid_contains(pt({0}), pt({0, 0})), DimensionMismatch);
}

TEST_CASE("family monotonicity on small grids") {
  for (std::size_t d = 1; d <= 3; ++d) {
    for (std::size_t i = 2; i <= 5; ++i) {
      const GridFamily f{d, i};
      const auto pts = f.points();
      REQUIRE(pts.size() == f.size());
      for (const Point& lo : pts) {
        for (const Point& hi : pts) {
          bool le = true;
          for (std::size_t j = 0; j < d; ++j) le = le && lo.coords[j] <= hi.coords[j];
          if (!le) continue;
          for (const Point& x : pts) {
            if (grid_contains(hi, x)) CHECK(grid_contains(lo, x));
          }
        }
      }
    }
  }
}

TEST_CASE("grid resolutions refine each other") {
  CHECK(grid_resolution(1) == 2);
  CHECK(grid_resolution(2) == 3);
  CHECK(grid_resolution(5) == 17);
  CHECK(grid_resolution(6) == 33);
  for (std::size_t s = 1; s < 6; ++s) {
    const GridFamily coarse{2, grid_resolution(s)};
    const GridFamily fine{2, grid_resolution(s + 1)};
    for (const Point& p : coarse.points()) CHECK(fine.on_grid(p));
  }
}

TEST_CASE("thresholded reward parameters") {
  const std::vector<Rational> ones{1, 1, 1};
  CHECK(thresholded_reward_params(ones, 3) == std::vector<Rational>{0, 0, 0, 1});
  const std::vector<Rational> neg{-1, -1};
  CHECK(thresholded_reward_params(neg, -2) == std::vector<Rational>{1, 1, 0});
  const std::vector<Rational> w{0, Rational(1, 2)};
  CHECK(thresholded_reward_params(w, 1) == std::vector<Rational>{Rational(1, 2), Rational(1, 4), Rational(3, 4)});
  const std::vector<Rational> bad{2};
  CHECK_THROWS_AS(thresholded_reward_params(bad, 0), InvalidArgument);
  CHECK_THROWS_AS(thresholded_reward_params(w, 3), InvalidArgument);
}

TEST_CASE("grid equivalence witnesses") {
  const GridFamily f{1, 3};
  CHECK_FALSE(grid_equivalence(f, pt({Rational(1, 2)}), pt({Rational(1, 2)})).has_value());
  const auto w = grid_equivalence(f, pt({0}), pt({1}));
  REQUIRE(w.has_value());
  CHECK(w->first == Atom(pt({0})));
  CHECK(w->second == MemLabel::NonMember);

  const GridFamily g{2, 5};
  for (const Point& h : g.points()) {
    for (const Point& t : g.points()) {
      const auto c = grid_equivalence(g, h, t);
      bool agree = true;
      for (const Point& x : g.points()) agree = agree && grid_contains(h, x) == grid_contains(t, x);
      CHECK(c.has_value() == !agree);
      if (c) {
        CHECK(grid_contains(h, c->first) != grid_contains(t, c->first));
        CHECK((c->second == MemLabel::Member) == grid_contains(t, c->first));
      }
    }
  }
  // Off-grid hypotheses still get a witness.
  const auto off = grid_equivalence(f, pt({Rational(1, 4)}), pt({Rational(1, 2)}));
  REQUIRE(off.has_value());
  CHECK(off->first == Atom(pt({Rational(1, 4)})));
}

TEST_CASE("grid consistent sets") {
  const GridFamily f{2, 3};
  CHECK(grid_consistent_set(f, KnowledgeBase{}).size() == 9);
  KnowledgeBase top;
  top.add_membership(pt({1, 1}), MemLabel::Member);
  CHECK(grid_consistent_set(f, top).size() == 9);
  KnowledgeBase origin;
  origin.add_membership(pt({0, 0}), MemLabel::NonMember);
  const auto left = grid_consistent_set(f, origin);
  CHECK(left.size() == 8);
  CHECK(std::find(left.begin(), left.end(), pt({0, 0})) == left.end());
}

TEST_CASE("smart-car transform") {
  const Point params = smartcar_params(30, 60, 5, 20);
  CHECK(params == pt({Rational(1, 2), Rational(3, 4)}));
  const Threshold t(smartcar_threshold(30, 60, 5, 20));
  // Arrives in 20 of 60 minutes keeping 8 of 20 metres: acceptable.
  CHECK(t.contains(smartcar_atom(20, 60, 8, 20)));
  // Too slow.
  CHECK_FALSE(t.contains(smartcar_atom(40, 60, 8, 20)));
  // Too close.
  CHECK_FALSE(t.contains(smartcar_atom(20, 60, 4, 20)));
  CHECK(t.serialize() == "[0.5,0.25]");
}
