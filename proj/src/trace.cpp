#include "agni/trace.hpp"

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

const TraceSeries* WaveformTrace::find(const std::string& name) const {
  for (const auto& s : series) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const TraceSeries& WaveformTrace::at(const std::string& name) const {
  if (const auto* s = find(name)) return *s;
  throw Error(ErrorKind::Range, fmt::format("trace has no series '{}'", name));
}

std::string WaveformTrace::to_csv() const {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "t_ns,series,value\n");
  for (std::size_t i = 0; i < times_ns.size(); ++i) {
    for (const auto& s : series) {
      fmt::format_to(std::back_inserter(out), "{:g},{},{:.9g}\n", times_ns[i], s.name, s.values[i]);
    }
  }
  for (const auto& g : glitches) {
    fmt::format_to(std::back_inserter(out), "# glitch,{:g},{}\n", g.t_ns, g.label);
  }
  return fmt::to_string(out);
}

nlohmann::json WaveformTrace::to_json() const {
  nlohmann::json j;
  j["step_ns"] = step_ns;
  j["t_ns"] = times_ns;
  nlohmann::json ser = nlohmann::json::object();
  for (const auto& s : series) ser[s.name] = s.values;
  j["series"] = ser;
  nlohmann::json gl = nlohmann::json::array();
  for (const auto& g : glitches) gl.push_back({{"t_ns", g.t_ns}, {"label", g.label}});
  j["glitches"] = gl;
  return j;
}

}  // namespace agni
