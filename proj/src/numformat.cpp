#include "agni/numformat.hpp"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

#include "agni/error.hpp"

namespace agni {

bool valid_word_length(std::size_t n) noexcept { return n >= 2 && std::has_single_bit(n); }

unsigned encoder_width(std::size_t n) {
  if (!valid_word_length(n)) {
    throw Error(ErrorKind::Config, fmt::format("word length {} is not a power of two >= 2", n));
  }
  return static_cast<unsigned>(std::countr_zero(n));
}

namespace {

void check_bits(std::span<const Bit> bits) {
  if (!valid_word_length(bits.size())) {
    throw Error(ErrorKind::Config,
                fmt::format("word length {} is not a power of two >= 2", bits.size()));
  }
  for (Bit b : bits) {
    if (b > 1) throw Error(ErrorKind::Format, "bit values must be 0 or 1");
  }
}

}  // namespace

StochasticWord::StochasticWord(std::vector<Bit> bits) : bits_(std::move(bits)) {
  check_bits(bits_);
}

StochasticWord StochasticWord::parse(std::string_view text) {
  std::vector<Bit> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<Bit>(c - '0'));
    } else if (c == '_' || c == ' ') {
      continue;
    } else {
      throw Error(ErrorKind::Format, fmt::format("invalid character '{}' in operand", c));
    }
  }
  return StochasticWord(std::move(bits));
}

StochasticWord StochasticWord::zeros(std::size_t n) { return StochasticWord(std::vector<Bit>(n, 0)); }

double StochasticWord::value() const {
  return static_cast<double>(popcount(*this)) / static_cast<double>(bits_.size());
}

bool is_thermometer(std::span<const Bit> bits) noexcept {
  auto first_zero = std::find(bits.begin(), bits.end(), Bit{0});
  return std::all_of(first_zero, bits.end(), [](Bit b) { return b == 0; });
}

UnaryWord::UnaryWord(std::vector<Bit> bits) : bits_(std::move(bits)) {
  check_bits(bits_);
  if (!is_thermometer(bits_)) {
    throw Error(ErrorKind::MalformedUnary,
                fmt::format("{} is not a thermometer word", bit_string(bits_)));
  }
}

std::size_t UnaryWord::ones() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), Bit{1}));
}

std::size_t popcount(const StochasticWord& w) noexcept {
  auto bits = w.bits();
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), Bit{1}));
}

UnaryWord to_unary(std::size_t count, std::size_t n) {
  if (count > n) {
    throw Error(ErrorKind::Range, fmt::format("count {} exceeds word length {}", count, n));
  }
  std::vector<Bit> bits(n, 0);
  std::fill_n(bits.begin(), count, Bit{1});
  return UnaryWord(std::move(bits));
}

namespace {

BinaryWord encode_position(std::size_t position, std::size_t n) {
  BinaryWord out;
  out.width = encoder_width(n);
  out.value = static_cast<std::uint32_t>(std::min<std::size_t>(position, out.max_value()));
  return out;
}

}  // namespace

BinaryWord unary_to_binary(const UnaryWord& u) { return encode_position(u.ones(), u.size()); }

BinaryWord unary_to_binary(std::span<const Bit> bits) {
  check_bits(bits);
  if (!is_thermometer(bits)) {
    throw Error(ErrorKind::MalformedUnary,
                fmt::format("{} is not a thermometer word", bit_string(bits)));
  }
  return encode_position(priority_position(bits), bits.size());
}

std::size_t priority_position(std::span<const Bit> bits) noexcept {
  for (std::size_t i = bits.size(); i > 0; --i) {
    if (bits[i - 1] != 0) return i;
  }
  return 0;
}

BinaryWord stob_oracle(const StochasticWord& w) {
  return unary_to_binary(to_unary(popcount(w), w.size()));
}

bool saturates(std::size_t count, std::size_t n) noexcept { return count >= n; }

std::string bit_string(std::span<const Bit> bits) {
  std::string s;
  s.reserve(bits.size());
  for (Bit b : bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string render(const StochasticWord& w) { return bit_string(w.bits()) + " (index0=left)"; }

std::string render(const UnaryWord& u) { return bit_string(u.bits()) + " (index0=left)"; }

std::string render(const BinaryWord& b) {
  std::string s;
  for (unsigned i = b.width; i > 0; --i) s.push_back(((b.value >> (i - 1)) & 1u) ? '1' : '0');
  return fmt::format("{} (msb=left, value={})", s, b.value);
}

}  // namespace agni
