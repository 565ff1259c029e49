#include "tfhh/simulator.hpp"

#include <numeric>

namespace tfhh {

RoundReport run_round(const Topology& topology, std::span<PeerState> states,
                      const GossipParams& params, ChurnModel& churn, std::uint64_t tick,
                      SimRngs& rngs) {
    churn_step(churn, states, tick, rngs.churn);

    RoundReport report;
    report.round = tick;
    std::vector<std::uint32_t> order;
    order.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].alive && states[i].online) order.push_back(static_cast<std::uint32_t>(i));
    }
    report.active_peers = order.size();
    rngs.gossip.shuffle(std::span<std::uint32_t>(order));

    const std::size_t msg_bytes =
        states.empty() ? 0 : message_size(states[0].sketch.depth(), states[0].sketch.width());
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i : order) {
        candidates.clear();
        for (std::uint32_t j : topology.adjacency[i]) {
            if (states[j].alive && states[j].online) candidates.push_back(j);
        }
        const std::size_t picks = std::min<std::size_t>(params.fan_out, candidates.size());
        // Partial Fisher-Yates: the first `picks` entries become the sample.
        for (std::size_t k = 0; k < picks; ++k) {
            const std::size_t r = k + rngs.gossip.below(candidates.size() - k);
            std::swap(candidates[k], candidates[r]);
            exchange(states[i], states[candidates[k]]);
            ++report.interactions;
            report.bytes += 2 * msg_bytes;
        }
    }
    for (PeerState& s : states) {
        if (s.alive) s.round = tick;
    }
    return report;
}

double live_variance(std::span<const PeerState> states,
                     const std::function<double(const PeerState&)>& value) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const PeerState& s : states) {
        if (!s.alive) continue;
        sum += value(s);
        ++n;
    }
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    double acc = 0.0;
    for (const PeerState& s : states) {
        if (!s.alive) continue;
        const double d = value(s) - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(n - 1);
}

std::vector<ConvergenceStats> track_q_convergence(const Topology& topology,
                                                  std::span<PeerState> states,
                                                  const GossipParams& params, ChurnModel& churn,
                                                  int rounds, SimRngs& rngs) {
    const auto q_of = [](const PeerState& s) { return s.q; };
    std::vector<ConvergenceStats> out;
    out.push_back({0, live_variance(states, q_of), 0.0});
    for (int r = 1; r <= rounds; ++r) {
        run_round(topology, states, params, churn, static_cast<std::uint64_t>(r), rngs);
        const double s2 = live_variance(states, q_of);
        const double prev = out.back().sigma2;
        out.push_back({static_cast<std::uint64_t>(r), s2, prev > 0.0 ? s2 / prev : 0.0});
    }
    return out;
}

}  // namespace tfhh
