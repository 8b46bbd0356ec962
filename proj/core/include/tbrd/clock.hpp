#pragma once

#include <cstdint>

namespace tbrd {

// Injectable time source so transmit-window logic is testable without
// real sleeps and simulations can run on virtual time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() = 0;
  virtual void sleep_until_ms(int64_t t_ms) = 0;
};

// System wall clock (Unix epoch milliseconds, UTC).
class WallClock final : public Clock {
 public:
  int64_t now_ms() override;
  void sleep_until_ms(int64_t t_ms) override;
};

// Manually driven clock for tests and simulation.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(int64_t start_ms = 0) : now_(start_ms) {}
  int64_t now_ms() override { return now_; }
  void sleep_until_ms(int64_t t_ms) override {
    if (t_ms > now_) now_ = t_ms;
  }
  void advance_ms(int64_t delta) { now_ += delta; }
  void set_ms(int64_t t) { now_ = t; }

 private:
  int64_t now_;
};

}  // namespace tbrd
