#pragma once

// Stochastic (rate-coded), transition-coded unary (thermometer) and binary
// words, plus the noise-free reference conversions every simulated result is
// scored against.
//
// Bit index 0 is the leftmost bit and corresponds to bitline BL_0. Every text
// rendering produced here is written index 0 first and says so.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agni {

using Bit = std::uint8_t;

/// True when n >= 2 and n is a power of two.
bool valid_word_length(std::size_t n) noexcept;

/// log2(n) for a valid word length.
unsigned encoder_width(std::size_t n);

class StochasticWord {
 public:
  explicit StochasticWord(std::vector<Bit> bits);

  /// Parses a 0/1 string written index 0 first, e.g. "1001".
  static StochasticWord parse(std::string_view text);
  static StochasticWord zeros(std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  std::span<const Bit> bits() const noexcept { return bits_; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  /// popcount / n.
  double value() const;

  friend bool operator==(const StochasticWord&, const StochasticWord&) = default;

 private:
  std::vector<Bit> bits_;
};

class UnaryWord {
 public:
  /// Throws MalformedUnary unless the ones form one prefix starting at index 0.
  explicit UnaryWord(std::vector<Bit> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  std::span<const Bit> bits() const noexcept { return bits_; }
  std::size_t ones() const noexcept;

  friend bool operator==(const UnaryWord&, const UnaryWord&) = default;

 private:
  std::vector<Bit> bits_;
};

struct BinaryWord {
  std::uint32_t value = 0;
  unsigned width = 0;

  std::uint32_t max_value() const noexcept { return (1u << width) - 1u; }
  friend bool operator==(const BinaryWord&, const BinaryWord&) = default;
};

bool is_thermometer(std::span<const Bit> bits) noexcept;

std::size_t popcount(const StochasticWord& w) noexcept;

UnaryWord to_unary(std::size_t count, std::size_t n);

/// Encodes a thermometer word. The all-ones word of length n saturates at
/// 2^log2(n) - 1 because the encoder output is only log2(n) bits wide.
BinaryWord unary_to_binary(const UnaryWord& u);
BinaryWord unary_to_binary(std::span<const Bit> bits);

/// What an N:log2N priority encoder reports for an arbitrary input: the index
/// of the highest set bit plus one (0 when no bit is set), before saturation.
std::size_t priority_position(std::span<const Bit> bits) noexcept;

/// Noise-free stochastic-to-binary reference.
BinaryWord stob_oracle(const StochasticWord& w);

/// True when the oracle output for this ones-count is clipped by the encoder.
bool saturates(std::size_t count, std::size_t n) noexcept;

/// "1001" style string, index 0 first, no annotation.
std::string bit_string(std::span<const Bit> bits);

/// bit_string plus the " (index0=left)" annotation used by the CLI and traces.
std::string render(const StochasticWord& w);
std::string render(const UnaryWord& u);
std::string render(const BinaryWord& b);

}  // namespace agni
