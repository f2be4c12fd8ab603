#pragma once

// Timing-signal vocabulary and the toggle schedule that drives one conversion.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace agni {

enum class Signal { WL, SenseN, SenseP, EQ, K1, B1, ISO, SEL, L1 };
inline constexpr std::array<Signal, 9> kAllSignals = {Signal::WL, Signal::SenseN, Signal::SenseP,
                                                      Signal::EQ, Signal::K1,     Signal::B1,
                                                      Signal::ISO, Signal::SEL,   Signal::L1};

enum class Edge { Rise, Fall };
enum class Level { Off, On };

enum class Step { Activate, StoA, AtoU, UtoB };
inline constexpr std::array<Step, 4> kAllSteps = {Step::Activate, Step::StoA, Step::AtoU,
                                                  Step::UtoB};

std::string_view to_string(Signal s);
std::string_view to_string(Edge e);
std::string_view to_string(Step s);
std::optional<Signal> parse_signal(std::string_view name);
std::optional<Step> parse_step(std::string_view name);

/// Level of a signal before the first event. SEL starts ON, everything else OFF.
Level initial_level(Signal s) noexcept;

struct SignalEvent {
  double t_ns = 0.0;
  Signal signal = Signal::WL;
  Edge edge = Edge::Rise;

  friend bool operator==(const SignalEvent&, const SignalEvent&) = default;
};

struct StepWindow {
  double start_ns = 0.0;
  double end_ns = 0.0;

  friend bool operator==(const StepWindow&, const StepWindow&) = default;
};

// Events are kept in listed order; events sharing a time stamp are applied as
// one atomic batch in that order. Only sense_n is stored, sense_p is derived.
class SignalSchedule {
 public:
  SignalSchedule() = default;
  SignalSchedule(std::vector<SignalEvent> events, double total_duration_ns,
                 std::array<StepWindow, 4> steps);

  const std::vector<SignalEvent>& events() const noexcept { return events_; }
  double total_duration_ns() const noexcept { return total_duration_ns_; }
  const StepWindow& window(Step s) const { return steps_[static_cast<std::size_t>(s)]; }
  const std::array<StepWindow, 4>& windows() const noexcept { return steps_; }

  /// Time stamps of the edges of one signal, in order.
  std::vector<double> edge_times(Signal s, Edge e) const;

  /// Length of the window where K1 and sense_n are both ON (lane charging).
  double charge_window_ns() const;

  /// Every event time, step boundary and the duration multiplied by factor.
  SignalSchedule scaled(double factor) const;

  friend bool operator==(const SignalSchedule&, const SignalSchedule&) = default;

 private:
  std::vector<SignalEvent> events_;
  double total_duration_ns_ = 0.0;
  std::array<StepWindow, 4> steps_{};
};

SignalSchedule default_schedule();

enum class ViolationKind { Ordering, Complementary, Containment, ChargeWindow, Conflict };
std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Empty result means the schedule is valid.
std::vector<Violation> validate(const SignalSchedule& s);

/// Level implied by the last edge at or before t (edges take effect at their
/// own time stamp). Throws Range when t is outside [0, total_duration].
Level signal_level(const SignalSchedule& s, Signal sig, double t_ns);

// Line-oriented text form:
//   duration <ns>
//   step <name> <start_ns> <end_ns>
//   <t_ns> <signal> <rise|fall>
// '#' starts a comment.
std::string to_text(const SignalSchedule& s);
SignalSchedule schedule_from_text(std::string_view text);

nlohmann::json to_json(const SignalSchedule& s);
SignalSchedule schedule_from_json(const nlohmann::json& j);

/// Loads a schedule file; JSON when the first non-blank character is '{'.
SignalSchedule load_schedule(const std::string& path);

}  // namespace agni
