#include "doctest.h"

#include "tbrd/sim/attack.hpp"
#include "tbrd/sim/swarm.hpp"

using namespace tbrd;
using namespace tbrd::sim;

namespace {

ScenarioConfig swarm_config(AuthMode mode, int ghosts) {
  ScenarioConfig sc;
  sc.id = "swarm-test";
  sc.kind = "swarm";
  sc.auth_mode = mode;
  sc.duration_steps = 90;
  if (ghosts > 0) {
    sc.adversary.kind = AdversaryKind::ghost_fleet;
    sc.adversary.ghost_count = ghosts;
    sc.adversary.ghost_spacing_m = 3.0;
  }
  return sc;
}

}  // namespace

TEST_CASE("baseline: four agents swap corners without closing inside 2 m") {
  SwarmResult r = run_swarm(swarm_config(AuthMode::tbrd, 0), 1);
  for (bool done : r.completed) CHECK(done);
  CHECK(r.min_pairwise_separation_m >= 2.0);
  for (const auto& [uas, outcomes] : r.histogram) {
    CHECK(outcomes.count(verify::Outcome::unknown_mission) == 0);
  }
}

TEST_CASE("unauthenticated mode: a ghost line bends every path") {
  SwarmResult baseline = run_swarm(swarm_config(AuthMode::none, 0), 1);
  SwarmResult attacked = run_swarm(swarm_config(AuthMode::none, 5), 1);

  for (bool done : baseline.completed) CHECK(done);
  for (bool done : attacked.completed) CHECK(done);
  CHECK(attacked.min_pairwise_separation_m >= 2.0);
  // the spoofed positions alter the path of every agent
  CHECK(min_path_deviation_per_agent(attacked, baseline) > 0.0);
}

TEST_CASE("tbrd mode: ghosts are flagged and do not move the swarm") {
  SwarmResult baseline = run_swarm(swarm_config(AuthMode::tbrd, 0), 1);
  SwarmResult attacked = run_swarm(swarm_config(AuthMode::tbrd, 10), 1);

  for (bool done : attacked.completed) CHECK(done);
  CHECK(max_path_deviation_m(attacked, baseline) <= 1e-6);

  for (int g = 1; g <= 10; ++g) {
    std::string id = "GHOST-" + std::to_string(g);
    REQUIRE(attacked.histogram.count(id) == 1);
    auto& outcomes = attacked.histogram.at(id);
    CHECK(outcomes.count(verify::Outcome::unknown_mission) == 1);
    CHECK(outcomes[verify::Outcome::unknown_mission] > 0);
    CHECK(outcomes.count(verify::Outcome::authentic) == 0);
  }
}

TEST_CASE("identical seed and scenario reproduce identical trajectories") {
  SwarmResult a = run_swarm(swarm_config(AuthMode::tbrd, 10), 9);
  SwarmResult b = run_swarm(swarm_config(AuthMode::tbrd, 10), 9);
  CHECK(max_path_deviation_m(a, b) == 0.0);
  CHECK(a.min_pairwise_separation_m == b.min_pairwise_separation_m);
}
