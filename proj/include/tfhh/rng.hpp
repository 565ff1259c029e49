#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace tfhh {

__extension__ typedef unsigned __int128 uint128;

// Pinned pseudo-random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the helpers below replace the
// implementation-defined std distributions so that draws are bit-identical
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent sub-stream keyed by (master seed, component label, id).
    static Rng derive(std::uint64_t master, std::string_view label, std::uint64_t id = 0) {
        return Rng(mix_key(master, label, id));
    }

    static constexpr std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static constexpr std::uint64_t mix_key(std::uint64_t master, std::string_view label,
                                           std::uint64_t id) {
        std::uint64_t k = splitmix64(master);
        k = splitmix64(k ^ fnv1a(label));
        return splitmix64(k ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    // Uniform integer in [0, n), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        uint128 m = static_cast<uint128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<uint128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double prob) {
        if (prob <= 0.0) return false;
        if (prob >= 1.0) return true;
        return uniform01() < prob;
    }

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tfhh
