#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "memrep/sat/solver.hpp"

using memrep::sat::Lit;
using memrep::sat::Solver;
using memrep::sat::Status;
using memrep::sat::Var;

namespace {

using Cnf = std::vector<std::vector<Lit>>;

bool satisfies(const Cnf& cnf, std::uint32_t assignment) {
  return std::all_of(cnf.begin(), cnf.end(), [&](const auto& clause) {
    return std::any_of(clause.begin(), clause.end(), [&](Lit l) {
      const bool v = ((assignment >> l.var()) & 1u) != 0;
      return v != l.negated();
    });
  });
}

bool brute_force_sat(const Cnf& cnf, int vars, const std::vector<Lit>& assumptions) {
  for (std::uint32_t a = 0; a < (1u << vars); ++a) {
    bool ok = std::all_of(assumptions.begin(), assumptions.end(), [&](Lit l) {
      return (((a >> l.var()) & 1u) != 0) != l.negated();
    });
    if (ok && satisfies(cnf, a)) return true;
  }
  return false;
}

Cnf random_cnf(std::mt19937_64& rng, int vars, int clauses) {
  std::uniform_int_distribution<int> var(0, vars - 1);
  std::uniform_int_distribution<int> width(1, 3);
  Cnf cnf;
  for (int c = 0; c < clauses; ++c) {
    std::vector<Lit> clause;
    const int w = width(rng);
    for (int k = 0; k < w; ++k) clause.emplace_back(var(rng), (rng() & 1u) != 0);
    cnf.push_back(clause);
  }
  return cnf;
}

}  // namespace

TEST_CASE("solver agrees with brute force on random formulas") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const int vars = 3 + trial % 8;
    const Cnf cnf = random_cnf(rng, vars, 2 + trial % 30);
    Solver s(static_cast<std::uint64_t>(trial));
    for (int v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : cnf) s.add_clause(c);
    const bool expected = brute_force_sat(cnf, vars, {});
    const Status got = s.solve();
    REQUIRE((got == Status::Sat) == expected);
    if (got == Status::Sat) {
      std::uint32_t a = 0;
      for (int v = 0; v < vars; ++v) a |= (s.model_value(v) ? 1u : 0u) << v;
      CHECK(satisfies(cnf, a));
    }
  }
}

TEST_CASE("failed assumptions form an unsatisfiable subset") {
  std::mt19937_64 rng(11);
  int unsat_seen = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int vars = 6 + trial % 5;
    const Cnf cnf = random_cnf(rng, vars, 6 + trial % 12);
    if (!brute_force_sat(cnf, vars, {})) continue;
    Solver s(static_cast<std::uint64_t>(trial));
    for (int v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : cnf) s.add_clause(c);
    std::vector<Lit> assumptions;
    for (int v = 0; v < vars; ++v) {
      if (rng() % 2 == 0) assumptions.emplace_back(v, (rng() & 1u) != 0);
    }
    const bool expected = brute_force_sat(cnf, vars, assumptions);
    const Status got = s.solve(assumptions);
    REQUIRE((got == Status::Sat) == expected);
    if (got == Status::Unsat) {
      ++unsat_seen;
      const auto& core = s.failed_assumptions();
      for (Lit l : core) {
        CHECK(std::find(assumptions.begin(), assumptions.end(), l) != assumptions.end());
      }
      CHECK_FALSE(brute_force_sat(cnf, vars, core));
      // The solver stays usable after an assumption failure.
      CHECK(s.solve() == Status::Sat);
    }
  }
  CHECK(unsat_seen > 20);
}

TEST_CASE("incremental blocking clauses enumerate every model exactly once") {
  // (a | b | c) & (!a | !b) has 5 models over three variables.
  Solver s(3);
  const Var a = s.new_var();
  const Var b = s.new_var();
  const Var c = s.new_var();
  s.add_clause({Lit::pos(a), Lit::pos(b), Lit::pos(c)});
  s.add_clause({Lit::neg(a), Lit::neg(b)});
  int models = 0;
  while (s.solve() == Status::Sat) {
    ++models;
    std::vector<Lit> block;
    for (Var v : {a, b, c}) block.emplace_back(v, s.model_value(v));
    s.add_clause(block);
  }
  CHECK(models == 5);
}

TEST_CASE("pigeonhole 5 into 4 is unsatisfiable") {
  Solver s;
  constexpr int pigeons = 5;
  constexpr int holes = 4;
  std::vector<std::vector<Var>> x(pigeons, std::vector<Var>(holes));
  for (auto& row : x) {
    for (auto& v : row) v = s.new_var();
  }
  for (int p = 0; p < pigeons; ++p) {
    std::vector<Lit> alo;
    for (int h = 0; h < holes; ++h) alo.push_back(Lit::pos(x[p][h]));
    s.add_clause(alo);
  }
  for (int h = 0; h < holes; ++h) {
    for (int p = 0; p < pigeons; ++p) {
      for (int q = p + 1; q < pigeons; ++q) s.add_clause({Lit::neg(x[p][h]), Lit::neg(x[q][h])});
    }
  }
  CHECK(s.solve() == Status::Unsat);
  CHECK_FALSE(s.okay());
}
