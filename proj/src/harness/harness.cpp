#include "memrep/harness/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <regex>
#include <thread>

#include "memrep/core/error.hpp"
#include "memrep/dfa/targets.hpp"

namespace memrep::harness {

namespace {

Target dfa_target(std::string name, dfa::Dfa d, std::optional<dfa::Dfa> prior = std::nullopt) {
  Alphabet alphabet = d.alphabet();
  return Target{std::move(name), Concept(d), std::move(alphabet), std::nullopt, std::move(prior)};
}

std::size_t positive(const std::string& text, const std::string& what) {
  const long v = std::stol(text);
  if (v < 1) throw InvalidArgument(what + " must be positive");
  return static_cast<std::size_t>(v);
}

// max_j (θ_j - x_j): non-positive exactly on members.
Rational threshold_cost(const Point& theta, const Atom& x) {
  const auto& p = std::get<Point>(x);
  Rational c = theta.coords.at(0) - p.coords.at(0);
  for (std::size_t j = 1; j < theta.coords.size(); ++j) c = std::max(c, theta.coords[j] - p.coords.at(j));
  return c;
}

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json cost_json(double c) {
  if (std::isinf(c)) return "inf";
  return c;
}

double cost_value(const nlohmann::json& j) {
  if (j.is_string()) return parse_cost(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

Target build_target(const std::string& name) {
  static const std::regex tomita_re(R"(tomita_([1-7]))");
  static const std::regex modulo_re(R"(modulo_k\((\d+)\))");
  static const std::regex scaled_re(R"(scaled_tomita4\((\d+)\))");
  static const std::regex grid_re(R"(grid\((\d+),(\d+),(\d+)\))");
  std::smatch m;
  if (std::regex_match(name, m, tomita_re)) return dfa_target(name, dfa::tomita(std::stoi(m[1])));
  if (name == "bby") return dfa_target(name, dfa::grid_world_task(), dfa::ry_prior());
  if (name == "rymask") return dfa_target(name, dfa::ry_prior());
  if (std::regex_match(name, m, modulo_re)) return dfa_target(name, dfa::modulo_k(positive(m[1], "k")));
  if (std::regex_match(name, m, scaled_re)) return dfa_target(name, dfa::scaled_tomita4(positive(m[1], "n")));
  if (std::regex_match(name, m, grid_re)) {
    monotone::GridFamily fam{positive(m[1], "d"), positive(m[2], "i")};
    if (fam.i < 2) throw InvalidArgument("grid needs at least 2 points per axis");
    const std::uint64_t seed = std::stoull(m[3]);
    Point theta = fam.point(mix64(seed) % fam.size());
    return Target{name, Concept(monotone::Threshold(theta)), Alphabet{}, fam, std::nullopt};
  }
  throw InvalidArgument("unknown target '" + name + "'");
}

nlohmann::json to_json(const TeacherSpec& s) {
  return {{"kind", s.kind},
          {"frac_incomparable", s.frac_incomparable},
          {"frac_strict_unforced", s.frac_strict_unforced},
          {"noise_rate", s.noise_rate},
          {"seed", s.seed}};
}

TeacherSpec teacher_from_json(const nlohmann::json& j) try {
  TeacherSpec s;
  s.kind = j.value("kind", s.kind);
  s.frac_incomparable = j.value("frac_incomparable", s.frac_incomparable);
  s.frac_strict_unforced = j.value("frac_strict_unforced", s.frac_strict_unforced);
  s.noise_rate = j.value("noise_rate", s.noise_rate);
  s.seed = j.value("seed", s.seed);
  if (s.kind != "random_memrep" && s.kind != "tomita_semantic" && s.kind != "cost_threshold" && s.kind != "human")
    throw InvalidArgument("unknown teacher kind '" + s.kind + "'");
  if (s.frac_incomparable < 0 || s.frac_incomparable > 1 || s.frac_strict_unforced < 0 || s.frac_strict_unforced > 1)
    throw InvalidArgument("teacher fractions must lie in [0,1]");
  if (s.noise_rate < 0 || s.noise_rate > 1) throw InvalidArgument("noise_rate must lie in [0,1]");
  return s;
} catch (const nlohmann::json::exception& e) {
  throw InvalidArgument(std::string("bad teacher config: ") + e.what());
}

TeacherSpec default_teacher(const Target& target) {
  TeacherSpec s;
  if (!target.is_dfa()) s.kind = "cost_threshold";
  else if (target.name == "bby" || target.name == "rymask") s.kind = "random_memrep";
  return s;
}

std::unique_ptr<oracles::Teacher> make_teacher(const Target& target, const TeacherSpec& spec) {
  std::unique_ptr<oracles::Teacher> t;
  const Concept truth = target.truth;
  if (spec.kind == "random_memrep") {
    t = oracles::random_memrep_order([truth](const Atom& x) { return truth.contains(x); },
                                     {spec.frac_incomparable, spec.frac_strict_unforced, spec.seed});
  } else if (spec.kind == "tomita_semantic") {
    if (!target.is_dfa()) throw InvalidArgument("tomita_semantic teacher needs a DFA target");
    t = oracles::tomita_semantic_order(truth.dfa());
  } else if (spec.kind == "cost_threshold") {
    if (target.is_dfa()) throw InvalidArgument("cost_threshold teacher needs a grid target");
    const Point theta = truth.threshold().theta();
    t = oracles::cost_threshold_oracle([theta](const Atom& x) { return threshold_cost(theta, x); }, Rational(0));
  } else {
    throw InvalidArgument("teacher kind '" + spec.kind + "' cannot be simulated");
  }
  if (spec.noise_rate > 0) t = oracles::with_noise(std::move(t), spec.noise_rate, mix64(spec.seed ^ 0x6e6f697365ULL));
  return t;
}

std::unique_ptr<oracles::EquivalenceOracle> make_equivalence(const Target& target, std::uint64_t seed) {
  if (target.is_dfa()) return oracles::dfa_equivalence(target.truth.dfa(), 4, seed);
  return oracles::grid_equivalence_oracle(*target.grid, target.truth.threshold().theta());
}

std::unique_ptr<learner::ConceptClass> make_class(const Target& target, std::size_t max_states, std::uint64_t seed) {
  if (target.is_dfa()) return std::make_unique<learner::DfaClass>(target.alphabet, max_states, target.prior, seed);
  return std::make_unique<learner::GridClass>(target.grid->d);
}

void Benchmark::validate() const {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (costs.empty()) throw InvalidArgument("empty cost grid");
  for (const auto& c : costs) c.validate();
  if (max_rounds < 1) throw InvalidArgument("max_rounds must be positive");
  build_target(target);
}

Benchmark benchmark_from_json(const nlohmann::json& j) try {
  Benchmark b;
  b.target = j.value("target", b.target);
  b.name = j.value("name", b.target);
  if (j.contains("teacher")) b.teacher = teacher_from_json(j["teacher"]);
  if (j.contains("costs")) {
    const auto& c = j["costs"];
    b.costs.clear();
    if (c.is_object()) {
      const double pref = cost_value(c.value("b", nlohmann::json(1.0)));
      for (const auto& a : c.at("a")) b.costs.push_back({cost_value(a), pref});
    } else {
      for (const auto& p : c) b.costs.push_back({cost_value(p.at(0)), cost_value(p.at(1))});
    }
  }
  b.trials = j.value("trials", b.trials);
  b.seed = j.value("seed", b.seed);
  b.max_states = j.value("max_states", b.max_states);
  b.max_rounds = j.value("max_rounds", b.max_rounds);
  if (j.contains("recovery")) b.recovery = learner::parse_recovery(j["recovery"].get<std::string>());
  b.recovery_slack = j.value("recovery_slack", b.recovery_slack);
  if (j.contains("strategy")) {
    const auto& s = j["strategy"];
    b.strategy.alpha = s.value("alpha", b.strategy.alpha);
    b.strategy.beta = s.value("beta", b.strategy.beta);
    b.strategy.eta = s.value("eta", b.strategy.eta);
    b.strategy.softmax_temp = s.value("softmax_temp", b.strategy.softmax_temp);
    b.strategy.mc_samples = s.value("mc_samples", b.strategy.mc_samples);
  }
  b.validate();
  return b;
} catch (const nlohmann::json::exception& e) {
  throw InvalidArgument(std::string("bad benchmark config: ") + e.what());
}

nlohmann::json to_json(const Benchmark& b) {
  nlohmann::json costs = nlohmann::json::array();
  for (const auto& c : b.costs) costs.push_back({cost_json(c.a), cost_json(c.b)});
  nlohmann::json j = {{"name", b.name},
                      {"target", b.target},
                      {"costs", costs},
                      {"trials", b.trials},
                      {"seed", b.seed},
                      {"max_states", b.max_states},
                      {"max_rounds", b.max_rounds},
                      {"recovery", learner::to_string(b.recovery)},
                      {"recovery_slack", b.recovery_slack},
                      {"strategy",
                       {{"alpha", b.strategy.alpha},
                        {"beta", b.strategy.beta},
                        {"eta", b.strategy.eta},
                        {"softmax_temp", b.strategy.softmax_temp},
                        {"mc_samples", b.strategy.mc_samples}}}};
  if (b.teacher) j["teacher"] = to_json(*b.teacher);
  return j;
}

TrialResult run_trial(const Benchmark& bench, const strategy::CostModel& costs, std::size_t trial, double noise_rate) {
  const Target target = build_target(bench.target);
  const std::uint64_t seed = bench.seed + trial;
  TeacherSpec spec = bench.teacher.value_or(default_teacher(target));
  spec.seed = mix64(spec.seed ^ mix64(seed));
  if (noise_rate >= 0) spec.noise_rate = noise_rate;

  auto teacher = make_teacher(target, spec);
  auto eq = make_equivalence(target, mix64(seed + 1000));
  learner::LearnerConfig cfg;
  cfg.costs = costs;
  cfg.strategy = bench.strategy;
  cfg.max_rounds = bench.max_rounds;
  cfg.recovery = bench.recovery;
  cfg.recovery_slack = bench.recovery_slack;
  cfg.seed = seed;
  auto out = learner::learn(make_class(target, bench.max_states, seed), cfg, *teacher, *eq);

  TrialResult r;
  r.benchmark = bench.name.empty() ? bench.target : bench.name;
  r.a = costs.a;
  r.b = costs.b;
  r.trial = trial;
  r.seed = seed;
  r.noise_rate = spec.noise_rate;
  r.counts = out.counts;
  r.cost_total = out.cost_total;
  r.success = out.status == learner::Status::Done && out.result && *out.result == target.truth;
  r.status = out.failure ? std::string(learner::to_string(*out.failure)) : std::string(learner::to_string(out.status));
  r.records = std::move(out.records);
  return r;
}

Aggregate aggregate(const std::vector<TrialResult>& trials) {
  Aggregate g;
  if (trials.empty()) return g;
  g.a = trials.front().a;
  g.b = trials.front().b;
  g.noise_rate = trials.front().noise_rate;
  g.trials = trials.size();
  const double n = static_cast<double>(trials.size());
  auto stats = [&](auto get, double& mean, double& var) {
    double s = 0, s2 = 0;
    for (const auto& t : trials) {
      const double v = get(t);
      s += v;
      s2 += v * v;
    }
    mean = s / n;
    var = std::max(0.0, s2 / n - mean * mean);
  };
  double unused;
  stats([](const TrialResult& t) { return double(t.counts.n_mem); }, g.mean_mem, g.var_mem);
  stats([](const TrialResult& t) { return double(t.counts.n_pref); }, g.mean_pref, g.var_pref);
  stats([](const TrialResult& t) { return double(t.counts.n_equiv); }, g.mean_equiv, g.var_equiv);
  stats([](const TrialResult& t) { return double(t.counts.n_mem + t.counts.n_pref + t.counts.n_equiv); }, g.mean_total,
        unused);
  stats([](const TrialResult& t) { return t.cost_total; }, g.mean_cost, unused);
  stats([](const TrialResult& t) { return double(t.counts.dropped); }, g.mean_dropped, unused);
  stats([](const TrialResult& t) { return t.success ? 1.0 : 0.0; }, g.success_rate, unused);
  return g;
}

namespace {

struct Job {
  strategy::CostModel costs;
  std::size_t trial;
  double noise_rate;
};

std::vector<TrialResult> run_pool(const Benchmark& bench, const std::vector<Job>& jobs, std::size_t width) {
  std::vector<TrialResult> out(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        out[i] = run_trial(bench, jobs[i].costs, jobs[i].trial, jobs[i].noise_rate);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  width = std::max<std::size_t>(1, std::min(width, jobs.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < width; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Aggregate> fold(const std::vector<TrialResult>& trials, std::size_t per_point) {
  std::vector<Aggregate> out;
  for (std::size_t i = 0; i < trials.size(); i += per_point)
    out.push_back(aggregate({trials.begin() + i, trials.begin() + i + per_point}));
  return out;
}

}  // namespace

ExperimentResult run_experiment(const Benchmark& bench, std::size_t jobs) {
  bench.validate();
  std::vector<Job> list;
  for (const auto& c : bench.costs)
    for (std::size_t t = 0; t < bench.trials; ++t) list.push_back({c, t, -1});
  ExperimentResult r;
  r.trials = run_pool(bench, list, jobs);
  r.aggregates = fold(r.trials, bench.trials);
  return r;
}

ExperimentResult run_robustness(Benchmark bench, const std::vector<double>& error_rates, std::size_t jobs) {
  bench.validate();
  bench.recovery = learner::RecoveryMode::DropCore;
  std::vector<Job> list;
  for (double eps : error_rates) {
    if (eps < 0 || eps > 1) throw InvalidArgument("error rate must lie in [0,1]");
    for (std::size_t t = 0; t < bench.trials; ++t) list.push_back({bench.costs.front(), t, eps});
  }
  ExperimentResult r;
  r.trials = run_pool(bench, list, jobs);
  r.aggregates = fold(r.trials, bench.trials);
  return r;
}

void write_summary_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "benchmark,a,b,trial,seed,n_mem,n_pref,n_equiv,cost_total,success,dropped\n";
  for (const auto& t : trials)
    out << t.benchmark << ',' << fmt(t.a) << ',' << fmt(t.b) << ',' << t.trial << ',' << t.seed << ','
        << t.counts.n_mem << ',' << t.counts.n_pref << ',' << t.counts.n_equiv << ',' << fmt(t.cost_total) << ','
        << (t.success ? 1 : 0) << ',' << t.counts.dropped << '\n';
}

void write_aggregate_csv(std::ostream& out, const std::vector<Aggregate>& aggregates) {
  out << "a,b,noise_rate,trials,mean_mem,var_mem,mean_pref,var_pref,mean_equiv,var_equiv,mean_total,mean_cost,"
         "mean_dropped,success_rate\n";
  for (const auto& g : aggregates)
    out << fmt(g.a) << ',' << fmt(g.b) << ',' << fmt(g.noise_rate) << ',' << g.trials << ',' << fmt(g.mean_mem) << ','
        << fmt(g.var_mem) << ',' << fmt(g.mean_pref) << ',' << fmt(g.var_pref) << ',' << fmt(g.mean_equiv) << ','
        << fmt(g.var_equiv) << ',' << fmt(g.mean_total) << ',' << fmt(g.mean_cost) << ',' << fmt(g.mean_dropped)
        << ',' << fmt(g.success_rate) << '\n';
}

nlohmann::json plot_data(const ExperimentResult& result) {
  nlohmann::json bars = nlohmann::json::array();
  for (const auto& g : result.aggregates)
    bars.push_back({{"a", cost_json(g.a)},
                    {"b", cost_json(g.b)},
                    {"noise_rate", g.noise_rate},
                    {"stack",
                     {{{"series", "membership"}, {"value", g.mean_mem}},
                      {{"series", "preference"}, {"value", g.mean_pref}},
                      {{"series", "equivalence"}, {"value", g.mean_equiv}}}}});
  return {{"kind", "stacked_bar"}, {"bars", bars}};
}

void write_outputs(const std::string& dir, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  {
    std::ofstream f(root / "summary.csv");
    write_summary_csv(f, result.trials);
  }
  {
    std::ofstream f(root / "aggregate.csv");
    write_aggregate_csv(f, result.aggregates);
  }
  {
    std::ofstream f(root / "plot.json");
    f << plot_data(result).dump(2) << '\n';
  }
  std::ofstream f(root / "transcripts.jsonl");
  for (const auto& t : result.trials)
    for (const auto& rec : t.records) {
      nlohmann::json line = {{"benchmark", t.benchmark}, {"a", cost_json(t.a)}, {"b", cost_json(t.b)},
                             {"trial", t.trial},         {"seed", t.seed},      {"record", rec}};
      f << line.dump() << '\n';
    }
}

std::string format_cost(double c) { return fmt(c); }

double parse_cost(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "∞") return strategy::kInfinity;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw InvalidArgument("bad cost '" + text + "'");
  return v;
}

}  // namespace memrep::harness
