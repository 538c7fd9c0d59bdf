#include <doctest.h>

#include <random>

#include "abft/codec.hpp"
#include "abft/errors.hpp"

using namespace abft;
using namespace abft::codec;

namespace {

std::uint64_t field_value(const Element& e) {
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < kBicFieldSize; ++b) v |= static_cast<std::uint64_t>(e[b]) << (8 * b);
  return v;
}

int bits(std::uint64_t v, int lo, int width) { return static_cast<int>((v >> lo) & ((1ULL << width) - 1)); }

}  // namespace

TEST_CASE("exhaustive round trip") {
  int combos = 0;
  for (int l = 1; l <= 8; ++l)
    for (int f = 1; f <= 16; ++f)
      for (bool oi : {false, true})
        for (int e = 0; e <= 8; ++e) {
          const BeaconIntervalControl bic{l, f, oi, e, 0, 0};
          const Element el = encode_bic(bic);
          CHECK(decode_bic(el) == bic);
          ++combos;
        }
  CHECK(combos == 8 * 16 * 2 * 9);
}

TEST_CASE("bit positions") {
  const Element el = encode_bic({8, 16, true, 8, 0, 0});
  const std::uint64_t v = field_value(el);
  CHECK(bits(v, 7, 3) == 7);
  CHECK(bits(v, 10, 4) == 15);
  CHECK(bits(v, 44, 1) == 1);
  CHECK(bits(v, 45, 3) == 0b111);
  CHECK(el[6] == kExtPresentFlag);
  CHECK(to_hex(el) == "803f000000f001");

  const std::uint64_t one = field_value(encode_bic({1, 1, false, 1, 0, 0}));
  CHECK(one == 0);
  CHECK(encode_bic({1, 1, false, 1, 0, 0})[6] == kExtPresentFlag);
  CHECK(decode_bic(encode_bic({1, 1, false, 1, 0, 0})).e_abft_length == 1);
}

TEST_CASE("legacy elements re-encode bit-identically") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20000; ++t) {
    Element el{};
    for (auto& b : el) b = static_cast<std::uint8_t>(rng());
    el[5] &= 0x0F;  // B44..B47 clear
    el[6] &= static_cast<std::uint8_t>(~kExtPresentFlag);
    const BeaconIntervalControl bic = decode_bic(el);
    CHECK(bic.e_abft_length == 0);
    CHECK_FALSE(bic.oi);
    CHECK(encode_bic(bic) == el);
  }
}

TEST_CASE("every well-formed element re-encodes bit-identically") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 100000; ++t) {
    Element el{};
    for (auto& b : el) b = static_cast<std::uint8_t>(rng());
    if ((el[6] & kExtPresentFlag) == 0) el[5] &= 0x1F;
    CHECK(encode_bic(decode_bic(el)) == el);
  }
}

TEST_CASE("decoder errors") {
  const std::vector<std::uint8_t> short_input(6, 0);
  CHECK_THROWS_AS(decode_bic(short_input), TruncationError);
  CHECK_THROWS_AS(decode_bic(std::vector<std::uint8_t>{}), TruncationError);
  Element el{};
  el[5] = 0x20;  // B45 set, flag clear
  CHECK_THROWS_AS(decode_bic(el), FormatError);

  std::vector<std::uint8_t> longer(9, 0);
  CHECK(decode_bic(longer) == BeaconIntervalControl{1, 1, false, 0, 0, 0});
}

TEST_CASE("decoder survives random input") {
  std::mt19937_64 rng(23);
  int decoded = 0, format = 0, truncated = 0;
  std::vector<std::uint8_t> buf;
  for (int t = 0; t < 1000000; ++t) {
    buf.resize(rng() % 10);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
    try {
      const BeaconIntervalControl bic = decode_bic(buf);
      CHECK_GE(bic.abft_length, 1);
      ++decoded;
    } catch (const FormatError&) {
      ++format;
    } catch (const TruncationError&) {
      ++truncated;
    }
  }
  CHECK(decoded + format + truncated == 1000000);
  CHECK(decoded > 0);
  CHECK(format > 0);
  CHECK(truncated > 0);
}

TEST_CASE("encoder range errors") {
  CHECK_THROWS_AS(encode_bic({0, 16, false, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({9, 16, false, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 17, false, 0, 0, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 16, false, 9, 0, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 16, false, -1, 0, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 16, false, 0, kOiMask, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 16, false, 0, 1ULL << 48, 0}), RangeError);
  CHECK_THROWS_AS(encode_bic({8, 16, false, 0, 0, 0x01}), RangeError);
  CHECK_NOTHROW(encode_bic({8, 16, false, 0, 0x7F, 0xFE}));
}

TEST_CASE("ati start time") {
  const NextDmgAti a = ati_start_time({8, 8, 16, {}});
  CHECK(a.start_time_slots == 16);
  CHECK(a.start_time == Micros{16 * 256});
  CHECK(ati_start_time({8, 0, 16, {}}).start_time_slots == 8);
  CHECK_THROWS_AS(ati_start_time({8, 9, 16, {}}), RangeError);
}

TEST_CASE("hex helpers") {
  const std::vector<std::uint8_t> bytes{0x00, 0xab, 0x7f};
  CHECK(to_hex(bytes) == "00ab7f");
  CHECK(from_hex("00ab7f") == bytes);
  CHECK(from_hex("0x00AB7F") == bytes);
  CHECK(from_hex("").empty());
  CHECK_THROWS_AS(from_hex("abc"), FormatError);
  CHECK_THROWS_AS(from_hex("zz"), FormatError);
}
