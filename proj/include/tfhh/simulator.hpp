#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tfhh/churn.hpp"
#include "tfhh/gossip.hpp"
#include "tfhh/rng.hpp"
#include "tfhh/topology.hpp"

namespace tfhh {

// Independent random sub-streams used by the round loop.
struct SimRngs {
    Rng churn;
    Rng gossip;

    static SimRngs derive(std::uint64_t seed) {
        return {Rng::derive(seed, "churn"), Rng::derive(seed, "gossip")};
    }
};

struct RoundReport {
    std::uint64_t round = 0;
    std::size_t active_peers = 0;  // alive and online after churn
    std::size_t interactions = 0;  // push-pull exchanges
    std::size_t bytes = 0;         // push + pull payload bytes
};

// One synchronous gossip round at the given tick: apply churn, then walk the
// active peers in random order; each pushes to fan_out distinct random active
// neighbours and adopts the averaged state returned by every pull.
RoundReport run_round(const Topology& topology, std::span<PeerState> states,
                      const GossipParams& params, ChurnModel& churn, std::uint64_t tick,
                      SimRngs& rngs);

struct ConvergenceStats {
    std::uint64_t round = 0;
    double sigma2 = 0.0;
    double ratio = 0.0;  // sigma2 / previous sigma2; 0 for the first record
};

// Sample variance (1 / (n - 1)) of a per-peer scalar over alive peers.
double live_variance(std::span<const PeerState> states,
                     const std::function<double(const PeerState&)>& value);

// sigma^2 of q per round for `rounds` rounds, starting with round 0.
std::vector<ConvergenceStats> track_q_convergence(const Topology& topology,
                                                  std::span<PeerState> states,
                                                  const GossipParams& params, ChurnModel& churn,
                                                  int rounds, SimRngs& rngs);

}  // namespace tfhh
