#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfhh/sketch.hpp"

namespace tfhh {

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Little-endian byte sink.
class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t>& bytes() { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> bytes_;
};

// Little-endian byte source; throws DecodeError on truncation.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw DecodeError("truncated input");
    }
    std::uint64_t get(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Sketch wire layout, version 1, all fields little-endian:
//   "TFSK" | version u16 | depth u32 | width u32 | hash_seed u64
//   then depth*width cells row-major, each as two counters of
//   (item u32 | present u8 | fhat f64).
inline constexpr std::uint16_t kSketchFormatVersion = 1;
inline constexpr std::size_t kSketchHeaderBytes = 22;
inline constexpr std::size_t kCounterBytes = 13;

std::size_t encoded_sketch_size(std::size_t depth, std::size_t width);
void encode_sketch(const Sketch& sk, ByteWriter& out);
std::vector<std::uint8_t> encode_sketch(const Sketch& sk);
Sketch decode_sketch(ByteReader& in);
Sketch decode_sketch(std::span<const std::uint8_t> bytes);

}  // namespace tfhh
