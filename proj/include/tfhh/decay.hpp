#pragma once

#include <cstdint>
#include <compare>
#include <string>

namespace tfhh {

using ItemId = std::uint32_t;

// Abstract time in integer ticks.
struct Timestamp {
    std::uint64_t tick = 0;

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// One stream occurrence.
struct Arrival {
    ItemId item = 0;
    Timestamp ts;

    friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Forward-decay function g and landmark L. Weights are g(t - L); the
// normalised weight of an arrival at t_i seen at time t is g(t_i - L) / g(t - L).
struct DecaySpec {
    enum class Kind { polynomial, exponential };

    Kind kind = Kind::polynomial;
    double parameter = 2.0;  // degree for polynomial, rate for exponential
    Timestamp landmark{0};

    static DecaySpec polynomial(double degree, Timestamp landmark = {0});
    static DecaySpec exponential(double rate, Timestamp landmark = {0});

    // Throws std::invalid_argument unless parameter > 0.
    void validate() const;

    friend bool operator==(const DecaySpec&, const DecaySpec&) = default;
};

std::string to_string(DecaySpec::Kind kind);
DecaySpec::Kind decay_kind_from_string(const std::string& name);

// Non-normalised weight g(ts - L). Throws std::invalid_argument if ts <= L.
double weight(Timestamp ts, const DecaySpec& decay);

// Normalised weight g(ts - L) / g(t - L).
double normalized_weight(Timestamp ts, Timestamp t, const DecaySpec& decay);

}  // namespace tfhh
