#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace tbrd {

struct TelemetrySample {
  double lat_deg = 0;
  double lon_deg = 0;
  double alt_m = 0;
  double speed_mps = 0;
  uint16_t direction_deg = 0;
  double vspeed_mps = 0;
  double operator_lat_deg = 0;
  double operator_lon_deg = 0;
  int64_t t_ms = 0;  // offset from mission start
};

// Flight-data feed polled by the transmit loop. Returns nullopt once the
// source is exhausted, which ends the mission.
class TelemetrySource {
 public:
  virtual ~TelemetrySource() = default;
  virtual std::optional<TelemetrySample> sample_at(int64_t offset_ms) = 0;
};

// Fixed sample, repeated forever (the --static transmitter mode).
class StaticTelemetry final : public TelemetrySource {
 public:
  explicit StaticTelemetry(TelemetrySample sample) : sample_(sample) {}
  std::optional<TelemetrySample> sample_at(int64_t offset_ms) override {
    TelemetrySample s = sample_;
    s.t_ms = offset_ms;
    return s;
  }

 private:
  TelemetrySample sample_;
};

// CSV of timestamped samples, replayed by offset. Columns:
//   t_ms,lat_deg,lon_deg,alt_m,speed_mps,direction_deg,vspeed_mps,
//   operator_lat_deg,operator_lon_deg
// Returns the most recent sample at or before the requested offset, and
// nullopt once the offset passes the final sample.
class ScriptTelemetry final : public TelemetrySource {
 public:
  explicit ScriptTelemetry(std::vector<TelemetrySample> samples);
  static ScriptTelemetry from_csv(const std::filesystem::path& path);

  std::optional<TelemetrySample> sample_at(int64_t offset_ms) override;

 private:
  std::vector<TelemetrySample> samples_;
};

}  // namespace tbrd
