#include "tfhh/codec.hpp"

#include <cmath>

namespace tfhh {

namespace {
constexpr std::uint8_t kMagic[4] = {'T', 'F', 'S', 'K'};
}

std::size_t encoded_sketch_size(std::size_t depth, std::size_t width) {
    return kSketchHeaderBytes + depth * width * 2 * kCounterBytes;
}

void encode_sketch(const Sketch& sk, ByteWriter& out) {
    out.raw(kMagic);
    out.u16(kSketchFormatVersion);
    out.u32(static_cast<std::uint32_t>(sk.depth()));
    out.u32(static_cast<std::uint32_t>(sk.width()));
    out.u64(sk.hash_seed());
    for (const SSummary& s : sk.cells()) {
        for (const Counter& c : s.counters) {
            out.u32(c.item.value_or(0));
            out.u8(c.empty() ? 0 : 1);
            out.f64(c.fhat);
        }
    }
}

std::vector<std::uint8_t> encode_sketch(const Sketch& sk) {
    ByteWriter w;
    w.bytes().reserve(encoded_sketch_size(sk.depth(), sk.width()));
    encode_sketch(sk, w);
    return w.take();
}

Sketch decode_sketch(ByteReader& in) {
    const auto magic = in.raw(4);
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
        throw DecodeError("bad sketch magic");
    }
    if (const auto version = in.u16(); version != kSketchFormatVersion) {
        throw DecodeError("unsupported sketch format version " + std::to_string(version));
    }
    const std::uint32_t depth = in.u32();
    const std::uint32_t width = in.u32();
    const std::uint64_t seed = in.u64();
    if (depth == 0 || width == 0) throw DecodeError("zero sketch dimension");
    if (in.remaining() < std::size_t{depth} * width * 2 * kCounterBytes) {
        throw DecodeError("truncated sketch body");
    }

    Sketch sk(depth, width, seed);
    for (SSummary& s : sk.cells()) {
        for (Counter& c : s.counters) {
            const std::uint32_t item = in.u32();
            const std::uint8_t present = in.u8();
            const double fhat = in.f64();
            if (present > 1 || !(fhat >= 0.0) || !std::isfinite(fhat)) {
                throw DecodeError("malformed counter");
            }
            if (present) {
                c.item = item;
                c.fhat = fhat;
            } else if (fhat != 0.0) {
                throw DecodeError("empty counter with non-zero weight");
            }
        }
    }
    return sk;
}

Sketch decode_sketch(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    Sketch sk = decode_sketch(r);
    if (r.remaining() != 0) throw DecodeError("trailing bytes after sketch");
    return sk;
}

}  // namespace tfhh
