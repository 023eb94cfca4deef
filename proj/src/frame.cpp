#include "skinsim/frame.hpp"

#include <array>
#include <cstdlib>
#include <stdexcept>

namespace skinsim {

namespace {

std::array<std::uint32_t, 256> make_crc_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

} // namespace

const char* decode_status_name(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::Ok: return "ok";
        case DecodeStatus::ShortBuffer: return "short buffer";
        case DecodeStatus::BadMagic: return "bad magic";
        case DecodeStatus::UnknownVersion: return "unknown version";
        case DecodeStatus::LengthMismatch: return "length mismatch";
        case DecodeStatus::CrcMismatch: return "crc mismatch";
    }
    return "unknown";
}

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
    static const std::array<std::uint32_t, 256> table = make_crc_table();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes) {
        crc = table[(crc ^ b) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

std::size_t encoded_frame_size(std::size_t taxel_count) {
    return kFrameHeaderBytes + 4 * taxel_count + kFrameTrailerBytes;
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    if (frame.readings.size() > 0xFFFF) {
        throw std::domain_error("encode frame: too many readings");
    }
    for (std::int32_t r : frame.readings) {
        if (r > kMaxReadingSteps || r < -kMaxReadingSteps) {
            throw std::domain_error("encode frame: reading outside converter clamp");
        }
    }
    std::vector<std::uint8_t> out;
    out.reserve(encoded_frame_size(frame.readings.size()));
    out.push_back(kFrameMagic0);
    out.push_back(kFrameMagic1);
    out.push_back(frame.version);
    put_u16(out, static_cast<std::uint16_t>(frame.readings.size()));
    put_u32(out, frame.sequence);
    put_u64(out, frame.timestamp_us);
    for (std::int32_t r : frame.readings) {
        put_u32(out, static_cast<std::uint32_t>(r));
    }
    put_u32(out, crc32_ieee({out.data(), out.size()}));
    return out;
}

DecodeStatus decode_frame(std::span<const std::uint8_t> bytes, Frame& out) {
    if (bytes.size() < kFrameHeaderBytes + kFrameTrailerBytes) {
        return DecodeStatus::ShortBuffer;
    }
    if (bytes[0] != kFrameMagic0 || bytes[1] != kFrameMagic1) {
        return DecodeStatus::BadMagic;
    }
    if (bytes[2] != kFrameVersion) {
        return DecodeStatus::UnknownVersion;
    }
    const std::uint16_t count = get_u16(bytes.data() + 3);
    const std::size_t expected = encoded_frame_size(count);
    if (bytes.size() < expected) {
        return DecodeStatus::ShortBuffer;
    }
    if (bytes.size() != expected) {
        return DecodeStatus::LengthMismatch;
    }
    const std::uint32_t stored = get_u32(bytes.data() + expected - 4);
    const std::uint32_t computed = crc32_ieee(bytes.first(expected - 4));
    if (stored != computed) {
        return DecodeStatus::CrcMismatch;
    }
    out.version = bytes[2];
    out.sequence = get_u32(bytes.data() + 5);
    out.timestamp_us = get_u64(bytes.data() + 9);
    out.readings.resize(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        out.readings[i] = static_cast<std::int32_t>(
            get_u32(bytes.data() + kFrameHeaderBytes + 4 * i));
    }
    return DecodeStatus::Ok;
}

void append_length_prefixed(std::vector<std::uint8_t>& sink,
                            std::span<const std::uint8_t> payload) {
    put_u32(sink, static_cast<std::uint32_t>(payload.size()));
    sink.insert(sink.end(), payload.begin(), payload.end());
}

std::vector<std::vector<std::uint8_t>> split_length_prefixed(
    std::span<const std::uint8_t> buffer) {
    std::vector<std::vector<std::uint8_t>> records;
    std::size_t pos = 0;
    while (pos < buffer.size()) {
        if (buffer.size() - pos < 4) {
            throw std::runtime_error("length-prefixed stream: truncated header");
        }
        const std::uint32_t len = get_u32(buffer.data() + pos);
        pos += 4;
        if (buffer.size() - pos < len) {
            throw std::runtime_error("length-prefixed stream: truncated record");
        }
        records.emplace_back(buffer.begin() + pos, buffer.begin() + pos + len);
        pos += len;
    }
    return records;
}

} // namespace skinsim
