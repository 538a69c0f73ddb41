#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "memrep/core/error.hpp"
#include "memrep/harness/harness.hpp"
#include "memrep/session/session.hpp"

using namespace memrep;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return nlohmann::json::parse(in);
}

bool is_config(const std::string& arg) { return arg.size() > 5 && arg.ends_with(".json"); }

// Benchmark from a config file or a bare target name, then command-line
// overrides.
harness::Benchmark load(const std::string& arg, const std::vector<std::string>& costs, const std::string& pref_cost,
                        std::optional<std::size_t> trials, std::optional<std::uint64_t> seed,
                        const std::string& recovery) {
  nlohmann::json j = is_config(arg) ? read_json(arg) : nlohmann::json{{"target", arg}};
  if (!costs.empty()) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : costs) a.push_back(c);
    j["costs"] = {{"a", a}, {"b", pref_cost.empty() ? "1" : pref_cost}};
  } else if (!pref_cost.empty()) {
    j["costs"] = {{"a", {"1"}}, {"b", pref_cost}};
  }
  if (trials) j["trials"] = *trials;
  if (seed) j["seed"] = *seed;
  if (!recovery.empty()) j["recovery"] = recovery;
  return harness::benchmark_from_json(j);
}

void print_aggregates(const harness::ExperimentResult& r) {
  std::ostringstream out;
  harness::write_aggregate_csv(out, r.aggregates);
  std::cout << out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active learning with membership, preference and equivalence queries"};
  app.require_subcommand(1);

  std::string target_arg;
  std::vector<std::string> costs;
  std::string pref_cost;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string recovery;
  std::string out_dir = "out";
  std::size_t jobs = 1;

  auto* learn = app.add_subcommand("learn", "Run one simulated session and print its transcript");
  learn->add_option("target", target_arg, "Target name or benchmark config (.json)")->required();
  learn->add_option("--costs", costs, "Membership cost")->delimiter(',')->expected(0, 1);
  learn->add_option("--pref-cost", pref_cost, "Preference cost (inf disables preference queries)");
  learn->add_option("--seed", seed, "Trial seed");
  learn->add_option("--recovery", recovery, "off | drop-core | interactive");
  std::string transcript_path;
  learn->add_option("--transcript", transcript_path, "Write the JSONL transcript here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Run a benchmark over a cost grid");
  bench->add_option("target", target_arg, "Target name or benchmark config (.json)")->required();
  bench->add_option("--out", out_dir, "Output directory");
  bench->add_option("--trials", trials, "Trials per cost point");
  bench->add_option("--costs", costs, "Membership costs, comma separated")->delimiter(',');
  bench->add_option("--pref-cost", pref_cost, "Preference cost");
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--recovery", recovery, "off | drop-core | interactive");
  bench->add_option("--jobs", jobs, "Parallel trials");

  auto* robust = app.add_subcommand("robust", "Run a benchmark at increasing label-noise rates");
  std::vector<double> rates{0.0, 0.05, 0.1};
  robust->add_option("target", target_arg, "Target name or benchmark config (.json)")->required();
  robust->add_option("--rates", rates, "Noise rates, comma separated")->delimiter(',');
  robust->add_option("--out", out_dir, "Output directory");
  robust->add_option("--trials", trials, "Trials per rate");
  robust->add_option("--costs", costs, "Membership cost")->delimiter(',');
  robust->add_option("--pref-cost", pref_cost, "Preference cost");
  robust->add_option("--seed", seed, "Base seed");
  robust->add_option("--jobs", jobs, "Parallel trials");

  auto* serve = app.add_subcommand("serve", "Serve teaching sessions over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string state_dir;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--state-dir", state_dir, "Directory for session snapshots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*learn) {
      auto b = load(target_arg, costs, pref_cost, 1, seed, recovery);
      auto r = harness::run_trial(b, b.costs.front(), 0);
      std::ostringstream jsonl;
      for (const auto& rec : r.records) jsonl << rec.dump() << '\n';
      if (transcript_path.empty()) {
        std::cout << jsonl.str();
      } else {
        std::ofstream(transcript_path) << jsonl.str();
      }
      nlohmann::json summary{{"benchmark", r.benchmark}, {"status", r.status},     {"success", r.success},
                             {"n_mem", r.counts.n_mem},   {"n_pref", r.counts.n_pref}, {"n_equiv", r.counts.n_equiv},
                             {"dropped", r.counts.dropped}, {"cost_total", r.cost_total}};
      std::cerr << summary.dump() << '\n';
      return r.success ? 0 : 2;
    }
    if (*bench) {
      auto b = load(target_arg, costs, pref_cost, trials, seed, recovery);
      auto r = harness::run_experiment(b, jobs);
      harness::write_outputs(out_dir, r);
      print_aggregates(r);
      return 0;
    }
    if (*robust) {
      auto b = load(target_arg, costs, pref_cost, trials, seed, "drop-core");
      auto r = harness::run_robustness(b, rates, jobs);
      harness::write_outputs(out_dir, r);
      print_aggregates(r);
      return 0;
    }
    if (*serve) {
      session::SessionStore store(state_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(state_dir));
      httplib::Server server;
      session::install_routes(server, store);
      std::cerr << "listening on " << host << ':' << port << " (" << store.size() << " sessions restored)\n";
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ':' << port << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
