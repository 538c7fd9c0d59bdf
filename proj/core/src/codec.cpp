#include "abft/codec.hpp"

#include "abft/errors.hpp"

namespace abft::codec {

Element encode_bic(const BeaconIntervalControl& fields) {
  require_in_range("abft_length", fields.abft_length, 1, kMaxAbftLength);
  require_in_range("fss", fields.fss, 1, kMaxFss);
  require_in_range("e_abft_length", fields.e_abft_length, 0, kMaxEAbftLength);
  if ((fields.other_bits & ~(kFieldMask & ~kOwnedMask)) != 0) {
    throw RangeError("other_bits overlaps owned subfields or exceeds 48 bits");
  }
  if ((fields.ext_reserved & kExtPresentFlag) != 0) {
    throw RangeError("ext_reserved bit 0 is the E-A-BFT present flag");
  }

  const bool present = fields.e_abft_length >= 1;
  std::uint64_t value = fields.other_bits;
  value |= static_cast<std::uint64_t>(fields.abft_length - 1) << kAbftLengthShift;
  value |= static_cast<std::uint64_t>(fields.fss - 1) << kFssShift;
  value |= fields.oi ? kOiMask : 0;
  if (present) value |= static_cast<std::uint64_t>(fields.e_abft_length - 1) << kEAbftShift;

  Element out{};
  for (std::size_t b = 0; b < kBicFieldSize; ++b) {
    out[b] = static_cast<std::uint8_t>(value >> (8 * b));
  }
  out[kBicFieldSize] = static_cast<std::uint8_t>(fields.ext_reserved | (present ? kExtPresentFlag : 0));
  return out;
}

BeaconIntervalControl decode_bic(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kElementSize) {
    throw TruncationError("beacon interval control element needs " + std::to_string(kElementSize) +
                          " octets, got " + std::to_string(bytes.size()));
  }
  std::uint64_t value = 0;
  for (std::size_t b = 0; b < kBicFieldSize; ++b) {
    value |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  }
  const std::uint8_t ext = bytes[kBicFieldSize];
  const bool present = (ext & kExtPresentFlag) != 0;
  const auto e_bits = static_cast<int>((value & kEAbftMask) >> kEAbftShift);
  if (!present && e_bits != 0) {
    throw FormatError("B45..B47 set while the E-A-BFT present flag is clear");
  }

  BeaconIntervalControl fields;
  fields.abft_length = static_cast<int>((value & kAbftLengthMask) >> kAbftLengthShift) + 1;
  fields.fss = static_cast<int>((value & kFssMask) >> kFssShift) + 1;
  fields.oi = (value & kOiMask) != 0;
  fields.e_abft_length = present ? e_bits + 1 : 0;
  fields.other_bits = value & ~kOwnedMask;
  fields.ext_reserved = static_cast<std::uint8_t>(ext & ~kExtPresentFlag);
  return fields;
}

NextDmgAti ati_start_time(const AbftLayout& layout) {
  validate_layout(layout);
  NextDmgAti ati;
  ati.start_time_slots = layout.total_slots();
  ati.start_time = ati.start_time_slots * slot_duration_us(layout);
  return ati;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0) throw FormatError("hex string has odd length " + std::to_string(hex.size()));
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t k = 0; k < hex.size(); k += 2) {
    const int hi = nibble(hex[k]);
    const int lo = nibble(hex[k + 1]);
    if (hi < 0 || lo < 0) throw FormatError("non-hex character at offset " + std::to_string(hi < 0 ? k : k + 1));
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

}  // namespace abft::codec
