#include "tbrd/sim/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "tbrd/crypto.hpp"
#include "tbrd/provision.hpp"
#include "tbrd/transmitter.hpp"
#include "tbrd/uss_client.hpp"

namespace tbrd::sim {

namespace {

constexpr int64_t kSimEpochMs = 1'000'000;
constexpr double kLat0 = 42.0;
constexpr double kLon0 = -71.0;
constexpr double kMetersPerDegLat = 111'320.0;
const double kMetersPerDegLon = kMetersPerDegLat * std::cos(kLat0 * M_PI / 180.0);

void xy_to_geo(const Vec2& p, double& lat, double& lon) {
  lat = kLat0 + p.y / kMetersPerDegLat;
  lon = kLon0 + p.x / kMetersPerDegLon;
}

Vec2 geo_to_xy(double lat, double lon) {
  return {(lon - kLon0) * kMetersPerDegLon, (lat - kLat0) * kMetersPerDegLat};
}

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator*(const Vec2& a, double s) { return {a.x * s, a.y * s}; }
double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

Vec2 rotate_deg(const Vec2& v, double deg) {
  double rad = deg * M_PI / 180.0;
  double c = std::cos(rad), s = std::sin(rad);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

// compass bearing (0 = +y, clockwise), whole degrees on the wire
uint16_t bearing_deg(const Vec2& v) {
  if (norm(v) < 1e-9) return 0;
  double deg = 90.0 - std::atan2(v.y, v.x) * 180.0 / M_PI;
  int b = static_cast<int>(std::lround(deg));
  return static_cast<uint16_t>(((b % 360) + 360) % 360);
}

Vec2 velocity_from(double speed_mps, uint16_t bearing) {
  double rad = (90.0 - bearing) * M_PI / 180.0;
  return {speed_mps * std::cos(rad), speed_mps * std::sin(rad)};
}

Key32 derived_seed(uint64_t scenario_seed, const std::string& label) {
  Bytes material;
  for (int i = 0; i < 8; ++i) {
    material.push_back(static_cast<uint8_t>(scenario_seed >> (8 * i)));
  }
  material.insert(material.end(), label.begin(), label.end());
  return crypto::sha256(material);
}

struct FeedEntry {
  Vec2 pos;
  Vec2 vel;
  int64_t t_ms = 0;
};

struct NeighborEst {
  Vec2 pos;
  Vec2 vel;
  double age_s = 0;  // time since the position was sampled
};

// Keep the predicted closest approach within the horizon above the safety
// radius. The goal-directed velocity wins when it is clear; otherwise pick
// the feasible candidate that best trades goal progress against heading
// stability, with a right-hand bias so symmetric encounters resolve.
class AvoidancePolicy {
 public:
  AvoidancePolicy(double radius_m, double horizon_s, double cruise_mps, double dt_s)
      : clearance_(radius_m * 1.25), horizon_(horizon_s), cruise_(cruise_mps), dt_(dt_s) {}

  // speed_factor de-synchronizes otherwise perfectly mirrored agents so
  // symmetric stand-offs cannot persist (ORCA gets this from reciprocity).
  Vec2 decide(const Vec2& pos, const Vec2& goal, const Vec2& prev_vel,
              const std::vector<NeighborEst>& neighbors, double speed_factor) const {
    Vec2 to_goal = goal - pos;
    double dist = norm(to_goal);
    if (dist < 0.05) return {0, 0};

    double speed = std::min(cruise_ * speed_factor, dist / dt_);
    Vec2 pref = to_goal * (speed / dist);
    if (feasible(pos, pref, neighbors)) return pref;

    Vec2 goal_dir = to_goal * (1.0 / dist);
    double prev_speed = norm(prev_vel);
    Vec2 prev_dir = prev_speed > 1e-9 ? prev_vel * (1.0 / prev_speed) : Vec2{0, 0};

    static constexpr double kAngles[] = {-20, 20,   -40, 40,   -60, 60,  -85,  85,
                                         -110, 110, -135, 135, -160, 160, 180};
    bool found = false;
    Vec2 best{0, 0};
    double best_score = 0;
    for (double frac : {1.0, 0.55, 0.3}) {
      for (double ang : kAngles) {
        Vec2 v = rotate_deg(pref, ang) * frac;
        if (!feasible(pos, v, neighbors)) continue;
        Vec2 v_dir = v * (1.0 / norm(v));
        double score = dot(v_dir, goal_dir) + 0.8 * dot(v_dir, prev_dir) +
                       0.3 * frac + (ang < 0 ? 1e-3 : 0.0);
        if (!found || score > best_score) {
          found = true;
          best = v;
          best_score = score;
        }
      }
    }
    return best;  // zero velocity when nothing is feasible
  }

  bool feasible(const Vec2& pos, const Vec2& v,
                const std::vector<NeighborEst>& neighbors) const {
    for (const auto& nb : neighbors) {
      // stale samples may have drifted from the dead-reckoned track, so the
      // required clearance grows with the age of the report
      double limit = clearance_ + 0.5 * cruise_ * nb.age_s;
      Vec2 p = nb.pos - pos;
      double dist0 = norm(p);
      if (dist0 < limit) {
        Vec2 w = nb.vel - v;
        if (dot(p, w) <= 0) return false;  // already close: must separate
        continue;
      }
      if (cpa_within(p, nb.vel - v, horizon_, limit)) return false;
      // Velocity reports lag a step, so a mirrored neighbor may not actually
      // clear out of the way. Refuse paths that would cut through where the
      // neighbor is right now, even if its track says it is leaving.
      if (cpa_within(p, v * -1.0, std::min(horizon_, 2.0), limit * 0.8)) {
        return false;
      }
    }
    return true;
  }

  static bool cpa_within(const Vec2& p, const Vec2& w, double horizon, double limit) {
    double ww = dot(w, w);
    double t_star = ww > 1e-12 ? std::clamp(-dot(p, w) / ww, 0.0, horizon) : 0.0;
    return norm(p + w * t_star) < limit;
  }

 private:
  double clearance_;
  double horizon_;
  double cruise_;
  double dt_;
};

struct Agent {
  std::string uas_id;
  Vec2 pos;
  Vec2 vel;
  Vec2 goal;
  KeysFile keys;
  std::map<std::string, FeedEntry> feed;
  std::unique_ptr<verify::Verifier> verifier;
};

class AgentEndpoint final : public Endpoint {
 public:
  AgentEndpoint(Agent& agent, AuthMode mode, SwarmResult& result)
      : agent_(agent), mode_(mode), result_(result) {}

  void on_receive(const Delivery& d) override {
    if (mode_ == AuthMode::none) {
      try {
        odid::MessagePack pack = odid::decode_pack(d.pack);
        if (pack.basic.uas_id == agent_.uas_id) return;
        FeedEntry fe;
        fe.pos = geo_to_xy(pack.location.lat_deg, pack.location.lon_deg);
        fe.vel = velocity_from(pack.location.speed_mps, pack.location.direction_deg);
        fe.t_ms = d.t_ms;
        agent_.feed[pack.basic.uas_id] = fe;
      } catch (const odid::CodecError&) {
      }
      return;
    }

    for (auto& ev : agent_.verifier->ingest(d.pack, d.t_ms)) {
      if (verify::is_terminal(ev.verdict.outcome)) {
        result_.histogram[ev.verdict.uas_id][ev.verdict.outcome]++;
        result_.verdicts.push_back(ev.verdict);
      }
      if (ev.verdict.outcome == verify::Outcome::authentic && ev.location &&
          ev.verdict.uas_id != agent_.uas_id) {
        FeedEntry fe;
        fe.pos = geo_to_xy(ev.location->lat_deg, ev.location->lon_deg);
        fe.vel = velocity_from(ev.location->speed_mps, ev.location->direction_deg);
        fe.t_ms = ev.verdict.arrival_ms;
        agent_.feed[ev.verdict.uas_id] = fe;
      }
    }
  }

 private:
  Agent& agent_;
  AuthMode mode_;
  SwarmResult& result_;
};

Bytes ghost_pack(const KeysFile& keys, const Vec2& pos, int64_t interval) {
  TelemetrySample t;
  xy_to_geo(pos, t.lat_deg, t.lon_deg);
  t.alt_m = 5.0;
  t.operator_lat_deg = t.lat_deg;
  t.operator_lon_deg = t.lon_deg;
  t.t_ms = interval * keys.params.t_int_ms;
  return odid::encode_pack(tx::build_beacon(interval, t, keys));
}

}  // namespace

SwarmResult run_swarm(const ScenarioConfig& scenario, uint64_t seed) {
  if (scenario.kind != "swarm") {
    throw std::invalid_argument("run_swarm needs a swarm scenario");
  }

  const double half = scenario.square_m / 2.0;
  const int64_t step_ms = static_cast<int64_t>(scenario.timestep_s * 1000);
  const int64_t steps = scenario.duration_steps;
  const int64_t n_intervals = steps + 2;

  uss::Registry registry;
  uss::LocalUssClient uss_client(registry);

  const Vec2 corners[4] = {{-half, -half}, {half, -half}, {half, half}, {-half, half}};
  static const char* names[4] = {"UAS-A", "UAS-B", "UAS-C", "UAS-D"};

  SwarmResult result;
  std::vector<Agent> agents(4);
  for (int a = 0; a < 4; ++a) {
    Agent& agent = agents[a];
    agent.uas_id = names[a];
    agent.pos = corners[a];
    agent.goal = corners[(a + 2) % 4];

    MissionPlan plan;
    plan.operator_id = std::string("OP-") + names[a];
    plan.uas_id = agent.uas_id;
    plan.start_ms = kSimEpochMs;
    plan.end_ms = kSimEpochMs + (n_intervals + 1) * scenario.t_int_ms;
    plan.t_int_ms = scenario.t_int_ms;
    plan.d = scenario.d;
    ProvisionResult prov = plan_mission(plan, derived_seed(seed, agent.uas_id));
    agent.keys = prov.keys_file;

    std::string handle = registry.register_mission(prov.registration);
    registry.start(handle, kSimEpochMs);

    verify::Verifier::Config vcfg;
    vcfg.observer_id = agent.uas_id;
    vcfg.default_d = scenario.d;
    agent.verifier = std::make_unique<verify::Verifier>(vcfg, uss_client);

    result.trajectories.emplace_back();
    result.trajectories.back().push_back(agent.pos);
  }

  // Ghosts hold valid chains but never register.
  struct Ghost {
    KeysFile keys;
    Vec2 pos;
  };
  std::vector<Ghost> ghosts;
  if (scenario.adversary.kind == AdversaryKind::ghost_fleet) {
    int k = scenario.adversary.ghost_count;
    for (int g = 0; g < k; ++g) {
      std::string id = "GHOST-" + std::to_string(g + 1);
      MissionPlan plan;
      plan.operator_id = "OP-GHOST";
      plan.uas_id = id;
      plan.start_ms = kSimEpochMs;
      plan.end_ms = kSimEpochMs + (n_intervals + 1) * scenario.t_int_ms;
      plan.t_int_ms = scenario.t_int_ms;
      plan.d = scenario.d;
      ProvisionResult prov = plan_mission(plan, derived_seed(seed, id));
      Ghost ghost;
      ghost.keys = prov.keys_file;
      ghost.pos = {0.0, (g - (k - 1) / 2.0) * scenario.adversary.ghost_spacing_m};
      ghosts.push_back(std::move(ghost));
    }
  }

  EventLoop loop;
  BroadcastChannel channel(loop, ChannelConfig{scenario.loss, scenario.jitter_ms, seed});
  std::vector<std::unique_ptr<AgentEndpoint>> endpoints;
  for (auto& agent : agents) {
    endpoints.push_back(std::make_unique<AgentEndpoint>(agent, scenario.auth_mode, result));
    channel.attach(agent.uas_id, endpoints.back().get());
  }

  AvoidancePolicy policy(scenario.radius_m, scenario.horizon_s, scenario.cruise_mps,
                         scenario.timestep_s);

  const int64_t feed_expiry_ms = 5 * step_ms;

  for (int64_t k = 0; k < steps; ++k) {
    const int64_t t_k = kSimEpochMs + k * step_ms;
    const int64_t interval = k + 1;

    loop.schedule(t_k, [&agents, &ghosts, &channel, interval, t_k] {
      for (auto& agent : agents) {
        TelemetrySample t;
        xy_to_geo(agent.pos, t.lat_deg, t.lon_deg);
        t.alt_m = 5.0;
        t.speed_mps = norm(agent.vel);
        t.direction_deg = bearing_deg(agent.vel);
        t.operator_lat_deg = t.lat_deg;
        t.operator_lon_deg = t.lon_deg;
        t.t_ms = t_k - kSimEpochMs;
        channel.broadcast(agent.uas_id, odid::encode_pack(tx::build_beacon(
                                            interval, t, agent.keys)));
      }
      for (size_t g = 0; g < ghosts.size(); ++g) {
        channel.broadcast("GHOST-" + std::to_string(g + 1),
                          ghost_pack(ghosts[g].keys, ghosts[g].pos, interval));
      }
    });

    loop.schedule(t_k + step_ms / 2, [&agents, &policy, &result, &scenario, t_k, step_ms,
                                      feed_expiry_ms] {
      const int64_t t_dec = t_k + step_ms / 2;
      std::vector<Vec2> decisions(agents.size());
      for (size_t a = 0; a < agents.size(); ++a) {
        Agent& agent = agents[a];
        std::vector<NeighborEst> neighbors;
        for (const auto& [id, fe] : agent.feed) {
          if (t_dec - fe.t_ms > feed_expiry_ms) continue;
          NeighborEst nb;
          nb.age_s = (t_dec - fe.t_ms) / 1000.0;
          nb.pos = fe.pos + fe.vel * nb.age_s;
          nb.vel = fe.vel;
          neighbors.push_back(nb);
        }
        decisions[a] = policy.decide(agent.pos, agent.goal, agent.vel, neighbors,
                                     1.0 - 0.04 * static_cast<double>(a));
      }
      for (size_t a = 0; a < agents.size(); ++a) {
        agents[a].vel = decisions[a];
        agents[a].pos = agents[a].pos + decisions[a] * scenario.timestep_s;
        result.trajectories[a].push_back(agents[a].pos);
      }
    });
    loop.run();
  }

  result.completed.resize(agents.size());
  for (size_t a = 0; a < agents.size(); ++a) {
    result.completed[a] = norm(agents[a].pos - agents[a].goal) <= 1.0;
  }

  // continuous minimum over linearly interpolated segments
  double min_sep = std::numeric_limits<double>::infinity();
  const size_t points = result.trajectories[0].size();
  for (size_t i = 0; i < agents.size(); ++i) {
    for (size_t j = i + 1; j < agents.size(); ++j) {
      for (size_t k = 0; k + 1 < points; ++k) {
        for (int s = 0; s <= 20; ++s) {
          double f = s / 20.0;
          Vec2 pi = result.trajectories[i][k] +
                    (result.trajectories[i][k + 1] - result.trajectories[i][k]) * f;
          Vec2 pj = result.trajectories[j][k] +
                    (result.trajectories[j][k + 1] - result.trajectories[j][k]) * f;
          min_sep = std::min(min_sep, norm(pi - pj));
        }
      }
    }
  }
  result.min_pairwise_separation_m = min_sep;
  return result;
}

double max_path_deviation_m(const SwarmResult& a, const SwarmResult& b) {
  double dev = 0;
  for (size_t i = 0; i < a.trajectories.size() && i < b.trajectories.size(); ++i) {
    size_t points = std::min(a.trajectories[i].size(), b.trajectories[i].size());
    for (size_t k = 0; k < points; ++k) {
      dev = std::max(dev, norm(a.trajectories[i][k] - b.trajectories[i][k]));
    }
  }
  return dev;
}

double min_path_deviation_per_agent(const SwarmResult& a, const SwarmResult& b) {
  double result = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.trajectories.size() && i < b.trajectories.size(); ++i) {
    double dev = 0;
    size_t points = std::min(a.trajectories[i].size(), b.trajectories[i].size());
    for (size_t k = 0; k < points; ++k) {
      dev = std::max(dev, norm(a.trajectories[i][k] - b.trajectories[i][k]));
    }
    result = std::min(result, dev);
  }
  return result;
}

}  // namespace tbrd::sim
