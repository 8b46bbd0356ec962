// Scenario runner for the adversarial broadcast simulator and the swarm
// testbed. Writes a JSON metrics file, CSV trajectories (swarm runs) and a
// line-delimited verdict log into --out.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tbrd/sim/attack.hpp"
#include "tbrd/sim/swarm.hpp"
#include "tbrd/verifier.hpp"

using namespace tbrd;
using nlohmann::json;

namespace {

json histogram_json(const std::map<std::string, std::map<verify::Outcome, int>>& h) {
  json out = json::object();
  for (const auto& [uas, outcomes] : h) {
    json per = json::object();
    for (const auto& [outcome, count] : outcomes) {
      per[verify::to_string(outcome)] = count;
    }
    out[uas] = std::move(per);
  }
  return out;
}

int run_attack(const sim::ScenarioConfig& sc, uint64_t seed,
               const std::filesystem::path& out_dir) {
  sim::AttackSuiteResult r = sim::run_attack_suite(sc, seed);

  json metrics;
  metrics["scenario"] = sc.id;
  metrics["seed"] = seed;
  metrics["verdicts"] = histogram_json(r.histogram);
  metrics["pending_remaining"] = r.pending_remaining;
  metrics["observer_deliveries"] = r.observer_deliveries.size();
  std::ofstream(out_dir / "metrics.json") << metrics.dump(2) << "\n";

  std::ofstream verdicts(out_dir / "verdicts.jsonl");
  for (const auto& ev : r.events) verdicts << verify::to_json_line(ev.verdict) << "\n";

  std::cout << metrics.dump(2) << "\n";
  return 0;
}

int run_swarm_scenario(const sim::ScenarioConfig& sc, uint64_t seed,
                       const std::filesystem::path& out_dir) {
  sim::SwarmResult r = sim::run_swarm(sc, seed);

  json metrics;
  metrics["scenario"] = sc.id;
  metrics["seed"] = seed;
  metrics["min_pairwise_separation_m"] = r.min_pairwise_separation_m;
  metrics["completed"] = r.completed;
  metrics["verdicts"] = histogram_json(r.histogram);
  std::ofstream(out_dir / "metrics.json") << metrics.dump(2) << "\n";

  std::ofstream verdicts(out_dir / "verdicts.jsonl");
  for (const auto& v : r.verdicts) verdicts << verify::to_json_line(v) << "\n";

  std::ofstream csv(out_dir / "trajectories.csv");
  csv << "step";
  for (size_t a = 0; a < r.trajectories.size(); ++a) {
    csv << ",x" << a << ",y" << a;
  }
  csv << "\n";
  for (size_t k = 0; k < r.trajectories[0].size(); ++k) {
    csv << k;
    for (const auto& traj : r.trajectories) {
      csv << "," << traj[k].x << "," << traj[k].y;
    }
    csv << "\n";
  }

  std::cout << metrics.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TBRD adversarial broadcast simulator"};

  std::string scenario_id;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string scenario_dir = TBRD_SCENARIO_DIR;
  app.add_option("--scenario", scenario_id, "Scenario id from the shipped corpus")
      ->required();
  app.add_option("--seed", seed, "Simulation seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--scenario-dir", scenario_dir, "Directory of scenario configs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (const char* env = std::getenv("TBRD_SCENARIO_DIR")) scenario_dir = env;
    sim::ScenarioConfig sc = sim::load_scenario(scenario_id, scenario_dir);
    std::filesystem::create_directories(out_dir);
    if (sc.kind == "swarm") return run_swarm_scenario(sc, seed, out_dir);
    return run_attack(sc, seed, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
