#pragma once

// Bit-exact wire format for one scan of quantized capacitance readings.
//
// Layout, little-endian:
//   magic   2 bytes  "SK"
//   version 1 byte
//   count   u16      number of readings
//   seq     u32
//   t_us    u64
//   data    count x i32, capacitance in 0.5 fF steps (pF * 2000)
//   crc     u32      CRC-32 (IEEE) over all preceding bytes

#include <cstdint>
#include <span>
#include <vector>

namespace skinsim {

inline constexpr std::uint8_t kFrameMagic0 = 0x53; // 'S'
inline constexpr std::uint8_t kFrameMagic1 = 0x4B; // 'K'
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 17;
inline constexpr std::size_t kFrameTrailerBytes = 4;
// Readings must stay within the +-15 pF converter range.
inline constexpr std::int32_t kMaxReadingSteps = 30000;

struct Frame {
    std::uint8_t version = kFrameVersion;
    std::uint32_t sequence = 0;
    std::uint64_t timestamp_us = 0;
    std::vector<std::int32_t> readings;

    bool operator==(const Frame&) const = default;

    double reading_pf(std::size_t i) const { return readings[i] / 2000.0; }
};

enum class DecodeStatus {
    Ok,
    ShortBuffer,
    BadMagic,
    UnknownVersion,
    LengthMismatch,
    CrcMismatch,
};

const char* decode_status_name(DecodeStatus status);

// CRC-32, IEEE 802.3 polynomial (reflected 0xEDB88320).
std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

std::size_t encoded_frame_size(std::size_t taxel_count);

// Serializes the frame. Throws std::domain_error when a reading exceeds the
// converter clamp.
std::vector<std::uint8_t> encode_frame(const Frame& frame);

// Validates magic, version, length and CRC in that order; on failure `out`
// is untouched and the status names the first failed check.
DecodeStatus decode_frame(std::span<const std::uint8_t> bytes, Frame& out);

// Stream/log framing: u32 little-endian payload length, then the payload.
void append_length_prefixed(std::vector<std::uint8_t>& sink,
                            std::span<const std::uint8_t> payload);

// Splits a buffer of concatenated length-prefixed frames. Throws
// std::runtime_error on a truncated record.
std::vector<std::vector<std::uint8_t>> split_length_prefixed(
    std::span<const std::uint8_t> buffer);

} // namespace skinsim
