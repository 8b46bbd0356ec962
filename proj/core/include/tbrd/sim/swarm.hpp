#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tbrd/sim/attack.hpp"
#include "tbrd/verifier.hpp"

// 2-D four-agent swarm on a square, exchanging packs over the simulated
// channel each timestep. Under auth_mode tbrd only authentic positions feed
// the avoidance policy; under none, every received position does.
namespace tbrd::sim {

struct Vec2 {
  double x = 0;
  double y = 0;
};

struct SwarmResult {
  // per agent, one position per timestep (index 0 = start position)
  std::vector<std::vector<Vec2>> trajectories;
  std::vector<bool> completed;
  double min_pairwise_separation_m = 0;  // between real agents
  std::map<std::string, std::map<verify::Outcome, int>> histogram;
  std::vector<verify::Verdict> verdicts;  // tbrd mode: every terminal verdict
};

SwarmResult run_swarm(const ScenarioConfig& scenario, uint64_t seed);

// Largest per-waypoint distance between two runs' real-agent trajectories.
double max_path_deviation_m(const SwarmResult& a, const SwarmResult& b);
double min_path_deviation_per_agent(const SwarmResult& a, const SwarmResult& b);

}  // namespace tbrd::sim
