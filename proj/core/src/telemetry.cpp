#include "tbrd/telemetry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tbrd {

ScriptTelemetry::ScriptTelemetry(std::vector<TelemetrySample> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("telemetry script is empty");
  if (!std::is_sorted(samples_.begin(), samples_.end(),
                      [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; })) {
    throw std::invalid_argument("telemetry script must be time-ordered");
  }
}

ScriptTelemetry ScriptTelemetry::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open telemetry csv: " + path.string());

  std::vector<TelemetrySample> samples;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.find("lat_deg") != std::string::npos) {
      first = false;
      continue;  // header row
    }
    first = false;
    std::istringstream row(line);
    TelemetrySample s;
    char comma;
    double t, dir;
    if (!(row >> t >> comma >> s.lat_deg >> comma >> s.lon_deg >> comma >> s.alt_m >>
          comma >> s.speed_mps >> comma >> dir >> comma >> s.vspeed_mps >> comma >>
          s.operator_lat_deg >> comma >> s.operator_lon_deg)) {
      throw std::runtime_error("bad telemetry csv row: " + line);
    }
    s.t_ms = static_cast<int64_t>(t);
    s.direction_deg = static_cast<uint16_t>(dir);
    samples.push_back(s);
  }
  return ScriptTelemetry(std::move(samples));
}

std::optional<TelemetrySample> ScriptTelemetry::sample_at(int64_t offset_ms) {
  if (offset_ms > samples_.back().t_ms) return std::nullopt;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), offset_ms,
                             [](int64_t t, const auto& s) { return t < s.t_ms; });
  if (it == samples_.begin()) {
    TelemetrySample s = samples_.front();  // before the first row: hold it
    s.t_ms = offset_ms;
    return s;
  }
  TelemetrySample s = *(it - 1);
  s.t_ms = offset_ms;
  return s;
}

}  // namespace tbrd
