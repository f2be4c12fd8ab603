#include <algorithm>
#include <random>

#include "agni/error.hpp"
#include "agni/numformat.hpp"
#include "doctest.h"

using namespace agni;

namespace {

// Independent reference: count ones by hand and clip to the encoder range.
std::uint32_t ref_code(const std::vector<Bit>& bits) {
  std::uint32_t ones = 0;
  for (Bit b : bits) ones += b;
  std::uint32_t width = 0;
  while ((std::size_t{1} << width) < bits.size()) ++width;
  const std::uint32_t max = (1u << width) - 1;
  return ones > max ? max : ones;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no agni::Error thrown");
  return ErrorKind::Range;
}

}  // namespace

TEST_CASE("word length rules") {
  CHECK(valid_word_length(2));
  CHECK(valid_word_length(4));
  CHECK(valid_word_length(256));
  CHECK_FALSE(valid_word_length(0));
  CHECK_FALSE(valid_word_length(1));
  CHECK_FALSE(valid_word_length(6));
  CHECK(encoder_width(4) == 2);
  CHECK(encoder_width(16) == 4);
  CHECK(encoder_width(256) == 8);
  CHECK(kind_of([] { StochasticWord::parse("101"); }) == ErrorKind::Config);
  CHECK(kind_of([] { StochasticWord::parse("10x1"); }) == ErrorKind::Format);
}

TEST_CASE("popcount examples") {
  CHECK(popcount(StochasticWord::parse("1010")) == 2);
  CHECK(popcount(StochasticWord::parse("0000")) == 0);
  CHECK(popcount(StochasticWord::parse("1001")) == 2);
  CHECK(StochasticWord::parse("1001").value() == doctest::Approx(0.5));
}

TEST_CASE("to_unary examples") {
  CHECK(bit_string(to_unary(2, 4).bits()) == "1100");
  CHECK(bit_string(to_unary(0, 4).bits()) == "0000");
  CHECK(bit_string(to_unary(4, 4).bits()) == "1111");
  CHECK(kind_of([] { to_unary(5, 4); }) == ErrorKind::Range);
}

TEST_CASE("thermometer validation") {
  CHECK(is_thermometer(std::vector<Bit>{1, 1, 0, 0}));
  CHECK(is_thermometer(std::vector<Bit>{0, 0, 0, 0}));
  CHECK_FALSE(is_thermometer(std::vector<Bit>{1, 0, 1, 0}));
  CHECK_FALSE(is_thermometer(std::vector<Bit>{0, 0, 1, 1}));
  CHECK(kind_of([] { UnaryWord(std::vector<Bit>{0, 1, 0, 0}); }) == ErrorKind::MalformedUnary);
}

TEST_CASE("unary_to_binary examples") {
  CHECK(unary_to_binary(to_unary(4, 8)).value == 4);
  CHECK(unary_to_binary(to_unary(2, 8)).value == 2);
  const auto sat = unary_to_binary(to_unary(4, 4));
  CHECK(sat.value == 3);
  CHECK(sat.width == 2);
  CHECK(saturates(4, 4));
  CHECK_FALSE(saturates(3, 4));
}

TEST_CASE("stob_oracle examples") {
  CHECK(stob_oracle(StochasticWord::parse("1001")).value == 2);
  for (std::size_t n : {2, 4, 16, 256}) CHECK(stob_oracle(StochasticWord::zeros(n)).value == 0);
}

TEST_CASE("stob_oracle exhaustive N=8 against independent count") {
  for (unsigned v = 0; v < 256; ++v) {
    std::vector<Bit> bits(8);
    for (unsigned j = 0; j < 8; ++j) bits[j] = (v >> j) & 1u;
    CHECK(stob_oracle(StochasticWord(bits)).value == ref_code(bits));
  }
}

TEST_CASE("stob_oracle is permutation invariant") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {4, 16, 64, 256}) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Bit> bits(n);
      for (auto& b : bits) b = static_cast<Bit>(rng() & 1u);
      const auto base = stob_oracle(StochasticWord(bits));
      std::shuffle(bits.begin(), bits.end(), rng);
      CHECK(stob_oracle(StochasticWord(bits)) == base);
    }
  }
}

TEST_CASE("to_unary is monotone and round-trips through the encoder") {
  for (std::size_t n : {4, 8, 32}) {
    const std::uint32_t max = (1u << encoder_width(n)) - 1;
    for (std::size_t c = 0; c <= n; ++c) {
      CHECK(unary_to_binary(to_unary(c, n)).value == std::min<std::uint32_t>(static_cast<std::uint32_t>(c), max));
      if (c < n) {
        const auto a = to_unary(c, n);
        const auto b = to_unary(c + 1, n);
        bool subset = true;
        for (std::size_t i = 0; i < n; ++i) subset = subset && (a.bits()[i] <= b.bits()[i]);
        CHECK(subset);
        CHECK(a != b);
      }
    }
  }
}

TEST_CASE("priority position handles bubbles") {
  CHECK(priority_position(std::vector<Bit>{0, 0, 0, 0}) == 0);
  CHECK(priority_position(std::vector<Bit>{1, 1, 0, 0}) == 2);
  CHECK(priority_position(std::vector<Bit>{1, 0, 1, 0}) == 3);
  try {
    unary_to_binary(std::vector<Bit>{1, 0, 1, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedUnary);
  }
}

TEST_CASE("renderings state their direction") {
  CHECK(render(StochasticWord::parse("1001")) == "1001 (index0=left)");
  CHECK(render(to_unary(2, 4)) == "1100 (index0=left)");
  CHECK(render(BinaryWord{2, 2}) == "10 (msb=left, value=2)");
}
