#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "tbrd/bytes.hpp"

// Deterministic, seeded discrete-event broadcast channel. Every attached
// endpoint hears every transmission, subject to i.i.d. loss and bounded
// uniform jitter. Identical seed + script -> identical delivery trace.
namespace tbrd::sim {

struct ChannelConfig {
  double loss_prob = 0.0;   // per delivered copy
  int64_t jitter_ms = 0;    // max uniform delay
  uint64_t seed = 0;
};

class EventLoop {
 public:
  int64_t now_ms() const { return now_; }
  void schedule(int64_t t_ms, std::function<void()> fn);
  void run();  // drains the queue; events fire in (time, insertion) order

 private:
  struct Event {
    int64_t t;
    uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  int64_t now_ = 0;
  uint64_t next_seq_ = 0;
};

struct Delivery {
  int64_t t_ms = 0;
  std::string receiver;
  std::string sender;
  Bytes pack;
};

class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual void on_receive(const Delivery& d) = 0;
};

class BroadcastChannel {
 public:
  BroadcastChannel(EventLoop& loop, ChannelConfig config);

  void attach(const std::string& name, Endpoint* endpoint);
  // Fans the pack out to every endpoint except the sender, at loop time.
  void broadcast(const std::string& sender, const Bytes& pack);

  const std::vector<Delivery>& trace() const { return trace_; }

 private:
  EventLoop& loop_;
  ChannelConfig config_;
  std::mt19937_64 rng_;
  std::vector<std::pair<std::string, Endpoint*>> endpoints_;
  std::vector<Delivery> trace_;
};

struct ScriptedTransmission {
  int64_t t_ms = 0;
  std::string sender;
  Bytes pack;
};

// Stand-alone channel run: schedules the script, drains the loop, returns
// the delivery trace observed by the named receivers.
std::vector<Delivery> run_channel(const std::vector<ScriptedTransmission>& script,
                                  const ChannelConfig& config,
                                  const std::vector<std::string>& receivers);

}  // namespace tbrd::sim
