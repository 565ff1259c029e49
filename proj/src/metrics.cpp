#include "tfhh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace tfhh {

Score score(std::span<const HeavyHitter> reported, const ExactAnswer& exact, double phi) {
    const std::vector<ItemId> truth = exact.heavy_hitters(phi);
    Score s;
    s.reported = reported.size();

    std::size_t hits = 0;
    double rel_err = 0.0;
    for (const HeavyHitter& h : reported) {
        const double f = exact.frequency(h.item);
        if (!(f > 0.0)) {
            throw OracleMismatchError("reported item " + std::to_string(h.item) +
                                      " has zero exact frequency");
        }
        rel_err += std::abs(h.frequency - f) / f;
        if (std::binary_search(truth.begin(), truth.end(), h.item)) ++hits;
    }
    if (!truth.empty()) s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    if (!reported.empty()) {
        s.precision = static_cast<double>(hits) / static_cast<double>(reported.size());
        s.are = rel_err / static_cast<double>(reported.size());
    }
    return s;
}

MetricSummary mean_ci95(std::span<const double> values) {
    MetricSummary m;
    m.count = values.size();
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    const auto k = static_cast<double>(values.size());
    m.mean = sum / k;
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - m.mean) * (v - m.mean);
        const double s = std::sqrt(acc / (k - 1.0));
        m.ci95_half_width = 1.96 * s / std::sqrt(k);
    }
    return m;
}

Aggregate aggregate(std::span<const MetricsRecord> records) {
    if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");

    struct Acc {
        double recall = 0.0, precision = 0.0, are = 0.0;
        std::size_t n = 0;
    };
    std::map<std::size_t, Acc> per_peer;
    for (const MetricsRecord& r : records) {
        Acc& a = per_peer[r.peer];
        a.recall += r.recall;
        a.precision += r.precision;
        a.are += r.are;
        ++a.n;
    }

    std::vector<double> recall, precision, are;
    for (const auto& [peer, a] : per_peer) {
        const auto n = static_cast<double>(a.n);
        recall.push_back(a.recall / n);
        precision.push_back(a.precision / n);
        are.push_back(a.are / n);
    }
    return {mean_ci95(recall), mean_ci95(precision), mean_ci95(are), per_peer.size()};
}

}  // namespace tfhh
