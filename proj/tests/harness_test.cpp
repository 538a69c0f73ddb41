#include "doctest.h"

#include <sstream>

#include "memrep/core/error.hpp"
#include "memrep/dfa/targets.hpp"
#include "memrep/harness/harness.hpp"

using namespace memrep;
using namespace memrep::harness;

TEST_CASE("named targets") {
  auto m5 = build_target("modulo_k(5)");
  CHECK(m5.truth.dfa().num_states() == 5);
  CHECK(m5.truth.contains(Word{}));
  CHECK(m5.truth.contains(Word{{0, 0, 0, 0, 0}}));
  CHECK_FALSE(m5.truth.contains(Word{{0, 0, 0}}));

  auto s2 = build_target("scaled_tomita4(2)");
  CHECK(s2.truth.dfa().num_states() == 4);
  CHECK(s2.truth.contains(Word{{1, 0, 0, 1}}));
  CHECK_FALSE(s2.truth.contains(Word{{1, 0, 0, 0}}));

  auto t1 = build_target("tomita_1");
  CHECK(t1.truth.dfa().num_states() == 2);
  for (int n = 1; n <= 7; ++n) {
    auto t = build_target("tomita_" + std::to_string(n));
    CHECK(dfa::equivalent(t.truth.dfa(), dfa::tomita(n)));
    CHECK_FALSE(t.prior);
  }

  auto bby = build_target("bby");
  CHECK(dfa::equivalent(bby.truth.dfa(), dfa::grid_world_task()));
  REQUIRE(bby.prior);
  CHECK(bby.alphabet == dfa::tile_alphabet());
  CHECK(dfa::equivalent(build_target("rymask").truth.dfa(), dfa::ry_prior()));

  auto g = build_target("grid(2,17,3)");
  CHECK_FALSE(g.is_dfa());
  CHECK(g.grid->d == 2);
  CHECK(g.grid->on_grid(g.truth.threshold().theta()));
  CHECK(build_target("grid(2,17,3)").truth == g.truth);

  for (const char* bad : {"tomita_8", "modulo_k(0)", "grid(1,1,0)", "nope", ""})
    CHECK_THROWS_AS(build_target(bad), InvalidArgument);
}

TEST_CASE("teacher configuration") {
  auto spec = teacher_from_json({{"kind", "random_memrep"}, {"frac_incomparable", 0.2}, {"noise_rate", 0.05}, {"seed", 4}});
  CHECK(spec.kind == "random_memrep");
  CHECK(spec.frac_incomparable == 0.2);
  CHECK(teacher_from_json(to_json(spec)).noise_rate == 0.05);
  CHECK_THROWS_AS(teacher_from_json({{"kind", "oracle"}}), InvalidArgument);
  CHECK_THROWS_AS(teacher_from_json({{"noise_rate", 2}}), InvalidArgument);

  CHECK(default_teacher(build_target("tomita_3")).kind == "tomita_semantic");
  CHECK(default_teacher(build_target("bby")).kind == "random_memrep");
  CHECK(default_teacher(build_target("grid(1,17,0)")).kind == "cost_threshold");
  TeacherSpec human;
  human.kind = "human";
  CHECK_THROWS_AS(make_teacher(build_target("tomita_3"), human), InvalidArgument);
  TeacherSpec cost;
  cost.kind = "cost_threshold";
  CHECK_THROWS_AS(make_teacher(build_target("tomita_3"), cost), InvalidArgument);
}

TEST_CASE("benchmark configuration") {
  auto b = benchmark_from_json(nlohmann::json::parse(R"({
    "target": "tomita_5", "costs": {"a": [1, 2, "inf"], "b": 1}, "trials": 3,
    "recovery": "drop-core", "strategy": {"eta": 0.25}})"));
  CHECK(b.name == "tomita_5");
  REQUIRE(b.costs.size() == 3);
  CHECK(b.costs[1].a == 2);
  CHECK(b.costs[2].a == strategy::kInfinity);
  CHECK(b.recovery == learner::RecoveryMode::DropCore);
  CHECK(b.strategy.eta == 0.25);
  auto again = benchmark_from_json(to_json(b));
  CHECK(to_json(again) == to_json(b));

  CHECK_THROWS_AS(benchmark_from_json({{"trials", 0}}), InvalidArgument);
  CHECK_THROWS_AS(benchmark_from_json(nlohmann::json::parse(R"({"costs": [["inf", "inf"]]})")), InvalidArgument);
  CHECK_THROWS_AS(benchmark_from_json({{"target", "tomita_9"}}), InvalidArgument);
  CHECK_THROWS_AS(benchmark_from_json(nlohmann::json::parse(R"({"costs": {"b": 1}})")), InvalidArgument);
  CHECK(parse_cost("inf") == strategy::kInfinity);
  CHECK(format_cost(strategy::kInfinity) == "inf");
  CHECK_THROWS(parse_cost("1x"));
}

TEST_CASE("experiments are deterministic and independent of the pool width") {
  Benchmark b;
  b.target = "tomita_4";
  b.costs = {{1, 1}, {4, 1}};
  b.trials = 3;
  b.seed = 11;
  auto serial = run_experiment(b, 1);
  auto parallel = run_experiment(b, 4);
  std::ostringstream s1, s2, s3;
  write_summary_csv(s1, serial.trials);
  write_summary_csv(s2, parallel.trials);
  write_summary_csv(s3, run_experiment(b, 1).trials);
  CHECK(s1.str() == s2.str());
  CHECK(s1.str() == s3.str());
  REQUIRE(serial.trials.size() == 6);
  CHECK(serial.trials[4].a == 4);
  CHECK(serial.trials[4].trial == 1);
  for (std::size_t i = 0; i < serial.trials.size(); ++i) CHECK(serial.trials[i].records == parallel.trials[i].records);
  CHECK(s1.str().rfind("benchmark,a,b,trial,seed,n_mem,n_pref,n_equiv,cost_total,success,dropped\n", 0) == 0);
}

TEST_CASE("aggregates are recomputable from the per-trial rows") {
  Benchmark b;
  b.target = "tomita_2";
  b.costs = {{1, 1}, {1, strategy::kInfinity}};
  b.trials = 4;
  auto r = run_experiment(b, 2);
  REQUIRE(r.aggregates.size() == 2);
  for (std::size_t p = 0; p < 2; ++p) {
    double mem = 0, pref = 0, ok = 0;
    for (std::size_t t = 0; t < 4; ++t) {
      const auto& row = r.trials[p * 4 + t];
      mem += row.counts.n_mem;
      pref += row.counts.n_pref;
      ok += row.success;
      CHECK(row.cost_total == b.costs[p].total(row.counts.n_mem, row.counts.n_pref));
    }
    CHECK(r.aggregates[p].mean_mem == doctest::Approx(mem / 4));
    CHECK(r.aggregates[p].mean_pref == doctest::Approx(pref / 4));
    CHECK(r.aggregates[p].success_rate == doctest::Approx(ok / 4));
  }
  CHECK(r.aggregates[1].mean_pref == 0);
  CHECK(r.aggregates[0].success_rate == 1);

  auto plot = plot_data(r);
  REQUIRE(plot["bars"].size() == 2);
  CHECK(plot["bars"][1]["b"] == "inf");
  CHECK(plot["bars"][0]["stack"][0]["series"] == "membership");
  CHECK(plot["bars"][0]["stack"][2]["series"] == "equivalence");

  std::ostringstream agg;
  write_aggregate_csv(agg, r.aggregates);
  CHECK(agg.str().find("1,inf,0,4,") != std::string::npos);
}

TEST_CASE("aggregate statistics") {
  std::vector<TrialResult> rows(2);
  rows[0].counts.n_mem = 2;
  rows[1].counts.n_mem = 4;
  rows[1].success = true;
  auto g = aggregate(rows);
  CHECK(g.mean_mem == 3);
  CHECK(g.var_mem == 1);
  CHECK(g.success_rate == 0.5);
  CHECK(aggregate({}).trials == 0);
}

TEST_CASE("noise-free robustness runs match the noiseless experiment") {
  Benchmark b;
  b.target = "tomita_6";
  b.trials = 3;
  auto clean = run_experiment(b, 1);
  auto robust = run_robustness(b, {0.0, 0.1}, 2);
  REQUIRE(robust.aggregates.size() == 2);
  CHECK(robust.aggregates[1].noise_rate == 0.1);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(robust.trials[t].counts.n_mem == clean.trials[t].counts.n_mem);
    CHECK(robust.trials[t].counts.n_pref == clean.trials[t].counts.n_pref);
    CHECK(robust.trials[t].counts.n_equiv == clean.trials[t].counts.n_equiv);
    CHECK(robust.trials[t].counts.dropped == 0);
  }
  CHECK_THROWS_AS(run_robustness(b, {1.5}), InvalidArgument);
}

TEST_CASE("grid benchmarks run end to end") {
  Benchmark b;
  b.target = "grid(1,17,5)";
  b.costs = {{64, 1}};
  b.trials = 5;
  auto r = run_experiment(b, 2);
  for (const auto& t : r.trials) {
    CHECK(t.success);
    CHECK(t.counts.n_mem <= 5);
  }
}
