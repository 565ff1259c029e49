#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfhh/sketch.hpp"
#include "tfhh/workload.hpp"

namespace tfhh {

// A reported item that never occurred in the stream.
struct OracleMismatchError : std::logic_error {
    using std::logic_error::logic_error;
};

struct Score {
    double recall = 1.0;
    double precision = 1.0;
    double are = 0.0;  // mean |f^s - f| / f over reported items
    std::size_t reported = 0;
};

// Recall is 1 when there are no true heavy hitters; precision is 1 when
// nothing is reported; ARE is 0 when nothing is reported.
Score score(std::span<const HeavyHitter> reported, const ExactAnswer& exact, double phi);

struct MetricsRecord {
    int rep = 0;
    std::size_t peer = 0;
    double recall = 1.0;
    double precision = 1.0;
    double are = 0.0;
    std::size_t reported = 0;
    std::uint64_t rounds = 0;
};

struct MetricSummary {
    double mean = 0.0;
    double ci95_half_width = 0.0;  // 1.96 s / sqrt(k)
    std::size_t count = 0;
};

MetricSummary mean_ci95(std::span<const double> values);

struct Aggregate {
    MetricSummary recall;
    MetricSummary precision;
    MetricSummary are;
    std::size_t peers = 0;
};

// Averages each peer over its repetitions, then summarises across peers.
// Throws std::invalid_argument on empty input.
Aggregate aggregate(std::span<const MetricsRecord> records);

}  // namespace tfhh
