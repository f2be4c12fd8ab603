#include "agni/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

namespace {

constexpr std::array<std::string_view, 9> kSignalNames = {"WL", "sense_n", "sense_p", "EQ", "K1",
                                                          "B1", "ISO",     "SEL",     "L1"};
constexpr std::array<std::string_view, 4> kStepNames = {"Activate", "S_to_A", "A_to_U", "U_to_B"};

Level flip(Level l) { return l == Level::On ? Level::Off : Level::On; }

}  // namespace

std::string_view to_string(Signal s) { return kSignalNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Edge e) { return e == Edge::Rise ? "rise" : "fall"; }
std::string_view to_string(Step s) { return kStepNames[static_cast<std::size_t>(s)]; }

std::optional<Signal> parse_signal(std::string_view name) {
  for (std::size_t i = 0; i < kSignalNames.size(); ++i) {
    if (kSignalNames[i] == name) return static_cast<Signal>(i);
  }
  return std::nullopt;
}

std::optional<Step> parse_step(std::string_view name) {
  for (std::size_t i = 0; i < kStepNames.size(); ++i) {
    if (kStepNames[i] == name) return static_cast<Step>(i);
  }
  return std::nullopt;
}

Level initial_level(Signal s) noexcept {
  if (s == Signal::SEL) return Level::On;
  if (s == Signal::SenseP) return Level::On;  // complement of sense_n
  return Level::Off;
}

SignalSchedule::SignalSchedule(std::vector<SignalEvent> events, double total_duration_ns,
                               std::array<StepWindow, 4> steps)
    : events_(std::move(events)), total_duration_ns_(total_duration_ns), steps_(steps) {}

std::vector<double> SignalSchedule::edge_times(Signal s, Edge e) const {
  std::vector<double> out;
  for (const auto& ev : events_) {
    if (ev.signal == s && ev.edge == e) out.push_back(ev.t_ns);
  }
  return out;
}

double SignalSchedule::charge_window_ns() const {
  bool k1 = initial_level(Signal::K1) == Level::On;
  bool sense = initial_level(Signal::SenseN) == Level::On;
  double since = 0.0;
  double total = 0.0;
  for (const auto& ev : events_) {
    const bool was = k1 && sense;
    if (ev.signal == Signal::K1) k1 = ev.edge == Edge::Rise;
    if (ev.signal == Signal::SenseN) sense = ev.edge == Edge::Rise;
    const bool now = k1 && sense;
    if (!was && now) since = ev.t_ns;
    if (was && !now) total += ev.t_ns - since;
  }
  if (k1 && sense) total += total_duration_ns_ - since;
  return total;
}

SignalSchedule SignalSchedule::scaled(double factor) const {
  auto events = events_;
  for (auto& ev : events) ev.t_ns *= factor;
  auto steps = steps_;
  for (auto& w : steps) {
    w.start_ns *= factor;
    w.end_ns *= factor;
  }
  return SignalSchedule(std::move(events), total_duration_ns_ * factor, steps);
}

SignalSchedule default_schedule() {
  using S = Signal;
  constexpr Edge up = Edge::Rise;
  constexpr Edge dn = Edge::Fall;
  std::vector<SignalEvent> ev = {
      // Activate
      {0, S::EQ, up}, {5, S::EQ, dn}, {7, S::WL, up}, {9, S::SenseN, up}, {12, S::WL, dn},
      // S_to_A
      {13, S::K1, up}, {37, S::K1, dn}, {37, S::SenseN, dn},
      // A_to_U
      {38, S::EQ, up}, {38, S::SEL, dn}, {42, S::EQ, dn}, {43, S::B1, up}, {45, S::SenseN, up},
      // U_to_B
      {45, S::ISO, up}, {51, S::L1, up}, {52, S::L1, dn}, {55, S::B1, dn}, {55, S::ISO, dn},
  };
  return SignalSchedule(std::move(ev), 55.0, {StepWindow{0, 12}, {13, 37}, {38, 45}, {45, 55}});
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Ordering: return "ordering";
    case ViolationKind::Complementary: return "complementary";
    case ViolationKind::Containment: return "containment";
    case ViolationKind::ChargeWindow: return "charge-window";
    case ViolationKind::Conflict: return "conflict";
  }
  return "unknown";
}

std::vector<Violation> validate(const SignalSchedule& s) {
  std::vector<Violation> out;
  const auto& events = s.events();
  const double total = s.total_duration_ns();

  if (!(total > 0.0)) {
    out.push_back({ViolationKind::Containment, fmt::format("total duration {} ns is not positive", total)});
  }
  for (Step step : kAllSteps) {
    const auto& w = s.window(step);
    if (w.start_ns < 0.0 || w.end_ns > total || w.start_ns > w.end_ns) {
      out.push_back({ViolationKind::Containment,
                     fmt::format("step {} window [{}, {}] ns not inside [0, {}] ns", to_string(step),
                                 w.start_ns, w.end_ns, total)});
    }
  }

  std::array<Level, 9> level{};
  for (Signal sig : kAllSignals) level[static_cast<std::size_t>(sig)] = initial_level(sig);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (i > 0 && ev.t_ns < events[i - 1].t_ns) {
      out.push_back({ViolationKind::Ordering,
                     fmt::format("event {} at {} ns listed after an event at {} ns", i, ev.t_ns,
                                 events[i - 1].t_ns)});
    }
    if (ev.t_ns < 0.0 || ev.t_ns > total) {
      out.push_back({ViolationKind::Containment,
                     fmt::format("{} {} at {} ns outside [0, {}] ns", to_string(ev.signal),
                                 to_string(ev.edge), ev.t_ns, total)});
    } else {
      const bool in_step = std::any_of(s.windows().begin(), s.windows().end(), [&](const StepWindow& w) {
        return ev.t_ns >= w.start_ns && ev.t_ns <= w.end_ns;
      });
      if (!in_step) {
        out.push_back({ViolationKind::Containment,
                       fmt::format("{} {} at {} ns is not inside any step window",
                                   to_string(ev.signal), to_string(ev.edge), ev.t_ns)});
      }
    }
    if (ev.signal == Signal::SenseP) {
      out.push_back({ViolationKind::Complementary,
                     fmt::format("sense_p edge at {} ns; sense_p is derived from sense_n", ev.t_ns)});
      continue;
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& other = events[j];
      if (other.t_ns == ev.t_ns && other.signal == ev.signal && other.edge != ev.edge) {
        out.push_back({ViolationKind::Conflict,
                       fmt::format("{} toggled both ways at {} ns", to_string(ev.signal), ev.t_ns)});
      }
    }
    auto& cur = level[static_cast<std::size_t>(ev.signal)];
    const Level target = ev.edge == Edge::Rise ? Level::On : Level::Off;
    if (cur == target) {
      out.push_back({ViolationKind::Ordering,
                     fmt::format("{} {} at {} ns but the signal is already {}", to_string(ev.signal),
                                 to_string(ev.edge), ev.t_ns, target == Level::On ? "ON" : "OFF")});
    }
    cur = target;
  }

  if (!(s.charge_window_ns() > 0.0)) {
    out.push_back({ViolationKind::ChargeWindow, "K1 and sense_n are never ON together"});
  }
  return out;
}

Level signal_level(const SignalSchedule& s, Signal sig, double t_ns) {
  if (t_ns < 0.0 || t_ns > s.total_duration_ns()) {
    throw Error(ErrorKind::Range,
                fmt::format("t = {} ns outside [0, {}] ns", t_ns, s.total_duration_ns()));
  }
  const Signal stored = sig == Signal::SenseP ? Signal::SenseN : sig;
  Level level = initial_level(stored);
  for (const auto& ev : s.events()) {
    if (ev.t_ns > t_ns) break;
    if (ev.signal == stored) level = ev.edge == Edge::Rise ? Level::On : Level::Off;
  }
  return sig == Signal::SenseP ? flip(level) : level;
}

std::string to_text(const SignalSchedule& s) {
  std::string out;
  out += fmt::format("duration {:g}\n", s.total_duration_ns());
  for (Step step : kAllSteps) {
    const auto& w = s.window(step);
    out += fmt::format("step {} {:g} {:g}\n", to_string(step), w.start_ns, w.end_ns);
  }
  for (const auto& ev : s.events()) {
    out += fmt::format("{:g} {} {}\n", ev.t_ns, to_string(ev.signal), to_string(ev.edge));
  }
  return out;
}

namespace {

double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::Format, fmt::format("line {}: '{}' is not a number", line, tok));
  }
  return v;
}

Edge parse_edge(std::string_view tok, std::size_t line) {
  if (tok == "rise" || tok == "up") return Edge::Rise;
  if (tok == "fall" || tok == "down") return Edge::Fall;
  throw Error(ErrorKind::Format, fmt::format("line {}: unknown edge '{}'", line, tok));
}

Signal require_signal(std::string_view tok, std::size_t line) {
  auto sig = parse_signal(tok);
  if (!sig) throw Error(ErrorKind::Format, fmt::format("line {}: unknown signal '{}'", line, tok));
  return *sig;
}

}  // namespace

SignalSchedule schedule_from_text(std::string_view text) {
  std::vector<SignalEvent> events;
  std::optional<double> duration;
  std::array<std::optional<StepWindow>, 4> steps;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "duration") {
      if (tok.size() != 2) throw Error(ErrorKind::Format, fmt::format("line {}: duration <ns>", line_no));
      duration = parse_number(tok[1], line_no);
    } else if (tok[0] == "step") {
      if (tok.size() != 4) {
        throw Error(ErrorKind::Format, fmt::format("line {}: step <name> <start> <end>", line_no));
      }
      auto step = parse_step(tok[1]);
      if (!step) throw Error(ErrorKind::Format, fmt::format("line {}: unknown step '{}'", line_no, tok[1]));
      steps[static_cast<std::size_t>(*step)] =
          StepWindow{parse_number(tok[2], line_no), parse_number(tok[3], line_no)};
    } else {
      if (tok.size() != 3) throw Error(ErrorKind::Format, fmt::format("line {}: <t_ns> <signal> <edge>", line_no));
      events.push_back({parse_number(tok[0], line_no), require_signal(tok[1], line_no),
                        parse_edge(tok[2], line_no)});
    }
  }
  if (!duration) throw Error(ErrorKind::Format, "schedule is missing a 'duration' line");
  std::array<StepWindow, 4> windows{};
  for (Step step : kAllSteps) {
    const auto& w = steps[static_cast<std::size_t>(step)];
    if (!w) throw Error(ErrorKind::Format, fmt::format("schedule is missing step {}", to_string(step)));
    windows[static_cast<std::size_t>(step)] = *w;
  }
  return SignalSchedule(std::move(events), *duration, windows);
}

nlohmann::json to_json(const SignalSchedule& s) {
  nlohmann::json j;
  j["total_duration_ns"] = s.total_duration_ns();
  nlohmann::json steps = nlohmann::json::object();
  for (Step step : kAllSteps) {
    const auto& w = s.window(step);
    steps[std::string(to_string(step))] = {w.start_ns, w.end_ns};
  }
  j["steps"] = steps;
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : s.events()) {
    events.push_back({{"t_ns", ev.t_ns},
                      {"signal", std::string(to_string(ev.signal))},
                      {"edge", std::string(to_string(ev.edge))}});
  }
  j["events"] = events;
  return j;
}

SignalSchedule schedule_from_json(const nlohmann::json& j) {
  try {
    std::vector<SignalEvent> events;
    for (const auto& e : j.at("events")) {
      events.push_back({e.at("t_ns").get<double>(), require_signal(e.at("signal").get<std::string>(), 0),
                        parse_edge(e.at("edge").get<std::string>(), 0)});
    }
    std::array<StepWindow, 4> windows{};
    const auto& steps = j.at("steps");
    for (Step step : kAllSteps) {
      const auto& w = steps.at(std::string(to_string(step)));
      windows[static_cast<std::size_t>(step)] = StepWindow{w.at(0).get<double>(), w.at(1).get<double>()};
    }
    return SignalSchedule(std::move(events), j.at("total_duration_ns").get<double>(), windows);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, fmt::format("schedule json: {}", e.what()));
  }
}

SignalSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open schedule file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Format, fmt::format("{}: {}", path, e.what()));
    }
    return schedule_from_json(j);
  }
  return schedule_from_text(text);
}

}  // namespace agni
