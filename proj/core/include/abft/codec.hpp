#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abft/core.hpp"

namespace abft::codec {

// Element layout (see docs/FORMAT.md):
//   octets 0..5  Beacon Interval Control field, 48 bits, little-endian
//                B7..B9   A-BFT Length - 1
//                B10..B13 FSS - 1
//                B44      Overload Indicator
//                B45..B47 E-A-BFT Length - 1 (when present)
//   octet  6     extension control: bit 0 = E-A-BFT Length present
inline constexpr std::size_t kBicFieldSize = 6;
inline constexpr std::size_t kElementSize = 7;

inline constexpr int kAbftLengthShift = 7;
inline constexpr int kFssShift = 10;
inline constexpr int kOiBit = 44;
inline constexpr int kEAbftShift = 45;

inline constexpr std::uint64_t kAbftLengthMask = 0x7ULL << kAbftLengthShift;
inline constexpr std::uint64_t kFssMask = 0xFULL << kFssShift;
inline constexpr std::uint64_t kOiMask = 1ULL << kOiBit;
inline constexpr std::uint64_t kEAbftMask = 0x7ULL << kEAbftShift;
inline constexpr std::uint64_t kOwnedMask = kAbftLengthMask | kFssMask | kOiMask | kEAbftMask;
inline constexpr std::uint64_t kFieldMask = (1ULL << 48) - 1;

inline constexpr std::uint8_t kExtPresentFlag = 0x01;

struct BeaconIntervalControl {
  int abft_length{8};
  int fss{16};
  bool oi{false};
  int e_abft_length{0};
  // Bits of the 48-bit field outside kOwnedMask, carried verbatim.
  std::uint64_t other_bits{0};
  // Extension-control octet bits 1..7, carried verbatim.
  std::uint8_t ext_reserved{0};

  friend bool operator==(const BeaconIntervalControl&, const BeaconIntervalControl&) = default;
};

using Element = std::array<std::uint8_t, kElementSize>;

Element encode_bic(const BeaconIntervalControl& fields);

/// Reads the first kElementSize octets; throws TruncationError on shorter
/// input, FormatError when B45..B47 are set without the present flag.
BeaconIntervalControl decode_bic(std::span<const std::uint8_t> bytes);

struct NextDmgAti {
  int start_time_slots{0};
  Micros start_time{0};
};

/// ATI start pushed past both slot regions: (L + E) slots.
NextDmgAti ati_start_time(const AbftLayout& layout);

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws FormatError on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace abft::codec
