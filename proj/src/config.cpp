#include "agni/config.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v, const std::string& source, std::size_t line, std::string_view key) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw Error(ErrorKind::Config, fmt::format("{}:{}: bad value '{}' for {}", source, line, v, key));
  }
  return out;
}

}  // namespace

AnalogParams parse_analog_conf(std::string_view text, AnalogParams p, const std::string& source) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Config, fmt::format("{}:{}: expected key = value", source, line_no));
    }
    const auto key = trim(line.substr(0, eq));
    const auto val = trim(line.substr(eq + 1));
    auto num = [&] { return parse_number<double>(val, source, line_no, key); };
    if (key == "vdd_v") p.vdd = num();
    else if (key == "v_sat_v") p.v_sat = num();
    else if (key == "tau_ns") p.tau_ns = num();
    else if (key == "c_ratio_cell_bl") p.c_ratio_cell_bl = num();
    else if (key == "c_ratio_lane_bl") p.c_ratio_lane_bl = num();
    else if (key == "c_bitline_ff") p.c_bitline_ff = num();
    else if (key == "noise_sigma_mv") p.noise_sigma_mv = num();
    else if (key == "rng_seed") p.rng_seed = parse_number<std::uint64_t>(val, source, line_no, key);
    else throw Error(ErrorKind::Config, fmt::format("{}:{}: unknown key '{}'", source, line_no, key));
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, fmt::format("{}: {}", source, e.what()));
  }
  return p;
}

std::optional<std::filesystem::path> config_root() {
  const char* v = std::getenv(kConfigRootEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot open {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write {}", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Config, fmt::format("write to {} failed", path.string()));
}

nlohmann::json RunManifest::to_json() const {
  return {{"command_line", command_line},
          {"config_hashes", config_hashes},
          {"seed", seed},
          {"tool_version", tool_version},
          {"timestamp", timestamp}};
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  if (sde != nullptr && *sde != '\0') {
    long long v = 0;
    const std::string_view s(sde);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw Error(ErrorKind::Config, fmt::format("SOURCE_DATE_EPOCH '{}' is not an integer", s));
    }
    t = static_cast<std::time_t>(v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                     tm.tm_min, tm.tm_sec);
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return output.string() + ".manifest.json";
}

}  // namespace agni
