#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace agni {

struct TraceSeries {
  std::string name;
  std::vector<double> values;  // one per sample time
};

struct GlitchMarker {
  double t_ns = 0.0;
  std::string label;
};

// Uniformly sampled waveforms of one conversion. Signal series hold 0/1;
// voltage series are in volts.
struct WaveformTrace {
  double step_ns = 0.25;
  std::vector<double> times_ns;
  std::vector<TraceSeries> series;
  std::vector<GlitchMarker> glitches;

  const TraceSeries* find(const std::string& name) const;
  /// Throws Range when the series is missing.
  const TraceSeries& at(const std::string& name) const;

  /// Long format: header "t_ns,series,value", one row per (sample, series),
  /// followed by "# glitch,<t_ns>,<label>" comment lines.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

}  // namespace agni
