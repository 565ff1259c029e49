#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "tfhh/decay.hpp"
#include "tfhh/rng.hpp"

namespace tfhh {

struct StreamSpec {
    std::uint64_t length = 1'000'000;
    std::uint32_t universe = 100'000;
    double skew = 1.2;
    std::uint64_t seed = 1;

    void validate() const;
};

// Inverse-CDF sampler over ranks 0..m-1 with P(rank i) proportional to (i+1)^-skew.
class ZipfSampler {
public:
    ZipfSampler(std::uint32_t universe, double skew);

    std::uint32_t sample(Rng& rng) const;
    double pmf(std::uint32_t rank) const;
    std::uint32_t universe() const { return static_cast<std::uint32_t>(cdf_.size()); }

private:
    std::vector<double> cdf_;
};

// n i.i.d. Zipf draws; ranks map to item ids through a seed-derived
// permutation of [0, m) and arrival i (0-based) gets timestamp i + 1.
std::vector<Arrival> gen_stream(const StreamSpec& spec);

// Seed-derived rank -> item id mapping used by gen_stream.
std::vector<ItemId> rank_to_item(const StreamSpec& spec);

// Round-robin: arrival k (0-based) goes to peer k mod p.
std::vector<std::vector<Arrival>> partition(std::span<const Arrival> stream, std::size_t p);

struct ExactAnswer {
    std::unordered_map<ItemId, double> frequencies;  // normalised decayed frequencies
    double total = 0.0;                              // decayed count C(t)

    double frequency(ItemId item) const;
    // {v : f_v > phi * C}, sorted by item.
    std::vector<ItemId> heavy_hitters(double phi) const;
};

// Exact decayed frequencies at query time t. Throws std::invalid_argument if
// t <= L or t precedes an arrival.
ExactAnswer exact_oracle(std::span<const Arrival> stream, const DecaySpec& decay, Timestamp t);

// Binary stream file: one 12-byte little-endian record per arrival,
// item u32 then timestamp u64.
void write_stream(std::span<const Arrival> stream, std::ostream& out);
std::vector<Arrival> read_stream(std::istream& in);

}  // namespace tfhh
