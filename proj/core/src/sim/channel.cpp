#include "tbrd/sim/channel.hpp"

#include <stdexcept>

namespace tbrd::sim {

void EventLoop::schedule(int64_t t_ms, std::function<void()> fn) {
  if (t_ms < now_) throw std::logic_error("cannot schedule into the past");
  queue_.push(Event{t_ms, next_seq_++, std::move(fn)});
}

void EventLoop::run() {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.t;
    ev.fn();
  }
}

BroadcastChannel::BroadcastChannel(EventLoop& loop, ChannelConfig config)
    : loop_(loop), config_(config), rng_(config.seed) {}

void BroadcastChannel::attach(const std::string& name, Endpoint* endpoint) {
  endpoints_.emplace_back(name, endpoint);
}

void BroadcastChannel::broadcast(const std::string& sender, const Bytes& pack) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& [name, ep] : endpoints_) {
    if (name == sender) continue;
    if (config_.loss_prob > 0 && unit(rng_) < config_.loss_prob) continue;
    int64_t delay = 0;
    if (config_.jitter_ms > 0) {
      delay = std::uniform_int_distribution<int64_t>(0, config_.jitter_ms)(rng_);
    }
    Delivery d{loop_.now_ms() + delay, name, sender, pack};
    Endpoint* target = ep;
    loop_.schedule(d.t_ms, [this, target, d] {
      trace_.push_back(d);
      target->on_receive(d);
    });
  }
}

namespace {
class NullEndpoint final : public Endpoint {
 public:
  void on_receive(const Delivery&) override {}
};
}  // namespace

std::vector<Delivery> run_channel(const std::vector<ScriptedTransmission>& script,
                                  const ChannelConfig& config,
                                  const std::vector<std::string>& receivers) {
  for (size_t i = 1; i < script.size(); ++i) {
    if (script[i].t_ms < script[i - 1].t_ms) {
      throw std::invalid_argument("script times must be non-decreasing");
    }
  }

  EventLoop loop;
  BroadcastChannel channel(loop, config);
  NullEndpoint sink;
  for (const auto& name : receivers) channel.attach(name, &sink);

  for (const auto& tx : script) {
    loop.schedule(tx.t_ms, [&channel, &tx] { channel.broadcast(tx.sender, tx.pack); });
  }
  loop.run();
  return channel.trace();
}

}  // namespace tbrd::sim
