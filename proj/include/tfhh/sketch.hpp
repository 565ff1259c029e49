#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tfhh/decay.hpp"

namespace tfhh {

// A Space-Saving counter. An empty counter has no item and zero weight.
struct Counter {
    std::optional<ItemId> item;
    double fhat = 0.0;

    bool empty() const { return !item.has_value(); }

    friend bool operator==(const Counter&, const Counter&) = default;
};

// Two-counter Space-Saving summary held in every sketch cell.
struct SSummary {
    std::array<Counter, 2> counters{};

    // Minimum counter value; 0 while a counter is still free.
    double min_frequency() const;
    double mass() const { return counters[0].fhat + counters[1].fhat; }
    const Counter* find(ItemId item) const;
    // The counter with the larger value (lower index on ties).
    const Counter& max_counter() const;
    // Counter value of a monitored item, otherwise the minimum counter.
    double estimate(ItemId item) const;

    // Space-Saving update with non-normalised weight x >= 0. A full summary
    // that does not monitor the item evicts its minimum counter (lower index
    // on ties) after adding x to it.
    void update(ItemId item, double x);

    friend bool operator==(const SSummary&, const SSummary&) = default;
};

SSummary ss_update(SSummary s, ItemId item, double x);

// Merge of two summaries: shared items sum, an item present on one side only
// gains the other side's minimum, and the two largest candidates survive,
// ordered by (value desc, item asc).
SSummary merge_summaries(const SSummary& a, const SSummary& b);

// Augmented Count-Min sketch: depth x width cells of 2-counter Space-Saving
// summaries. Hash functions h_j(x) = ((a_j x + b_j) mod P) mod width with
// P = 2^61 - 1 are derived from hash_seed, so sketches built from the same
// (depth, width, hash_seed) address identical cells and are mergeable.
class Sketch {
public:
    struct HashParams {
        std::uint64_t a = 1;
        std::uint64_t b = 0;

        friend bool operator==(const HashParams&, const HashParams&) = default;
    };

    static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

    Sketch(std::size_t depth, std::size_t width, std::uint64_t hash_seed);

    std::size_t depth() const { return depth_; }
    std::size_t width() const { return width_; }
    std::uint64_t hash_seed() const { return hash_seed_; }
    std::span<const HashParams> hashes() const { return hashes_; }

    std::size_t column(std::size_t row, ItemId item) const;

    SSummary& cell(std::size_t row, std::size_t col) { return cells_[row * width_ + col]; }
    const SSummary& cell(std::size_t row, std::size_t col) const {
        return cells_[row * width_ + col];
    }
    std::span<const SSummary> row(std::size_t r) const {
        return std::span<const SSummary>(cells_).subspan(r * width_, width_);
    }
    std::span<SSummary> cells() { return cells_; }
    std::span<const SSummary> cells() const { return cells_; }

    bool compatible(const Sketch& other) const {
        return depth_ == other.depth_ && width_ == other.width_ &&
               hash_seed_ == other.hash_seed_;
    }

    // Adds a non-normalised weight to the item's cell in every row.
    void update(ItemId item, double x);
    void update(const Arrival& a, const DecaySpec& decay);
    void update(std::span<const Arrival> stream, const DecaySpec& decay);

    // Non-normalised point estimate: min over rows of the cell estimate.
    double raw_estimate(ItemId item) const;
    // Non-normalised sum of counters in one row.
    double raw_row_mass(std::size_t row = 0) const;

    // Cell-wise merge_summaries; throws std::invalid_argument if incompatible.
    Sketch& merge_in(const Sketch& other);
    // Divides every counter by v > 0.
    Sketch& scale_down(double v);

    friend bool operator==(const Sketch&, const Sketch&) = default;

private:
    std::size_t depth_;
    std::size_t width_;
    std::uint64_t hash_seed_;
    std::vector<HashParams> hashes_;
    std::vector<SSummary> cells_;
};

struct HeavyHitter {
    ItemId item = 0;
    double frequency = 0.0;

    friend bool operator==(const HeavyHitter&, const HeavyHitter&) = default;
};

Sketch new_sketch(std::size_t depth, std::size_t width, std::uint64_t hash_seed);
Sketch sketch_update(Sketch sk, ItemId item, Timestamp ts, const DecaySpec& decay);

double point_estimate(const Sketch& sk, ItemId item, Timestamp t, const DecaySpec& decay);
double sketch_total(const Sketch& sk, Timestamp t, const DecaySpec& decay);

Sketch merge(const Sketch& a, const Sketch& b);
Sketch scale(Sketch sk, double v);

// Candidate heavy hitters with normalised estimates, sorted by item.
// tau = phi * C * (1 - eps_star) / (1 + eps_star); a cell's larger counter is
// point-queried when it exceeds tau and reported when the estimate does too.
std::vector<HeavyHitter> local_query(const Sketch& sk, double phi, double eps_star, Timestamp t,
                                     const DecaySpec& decay);

}  // namespace tfhh
