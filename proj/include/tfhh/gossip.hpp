#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tfhh/codec.hpp"
#include "tfhh/rng.hpp"
#include "tfhh/sketch.hpp"

namespace tfhh {

// Raised when a peer is queried before any of the initiator's mass reached it.
struct NotConvergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GossipParams {
    double p_star = 1.0;    // upper estimate of the peer count
    double delta_g = 0.05;  // gossip failure probability
    double gamma = 0.0;     // convergence factor; 0 selects 1/(2 sqrt(e))
    int fan_out = 1;
    int rounds = 24;
    double phi = 0.02;

    double convergence() const;
    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Local state of one peer: its sketch and the averaging scalar q, an
// estimate of 1/p.
struct PeerState {
    std::size_t id = 0;
    Sketch sketch;
    double q = 0.0;
    std::uint64_t round = 0;
    bool alive = true;
    bool online = true;
};

// Builds the peer sketch over its local stream. Peer 0 seeds q = 1, every
// other peer q = 0.
PeerState init_peer(std::size_t id, std::span<const Arrival> local_stream, std::size_t depth,
                    std::size_t width, std::uint64_t hash_seed, const DecaySpec& decay);

// Averaged state of an interacting pair: sketch = scale(merge(a, b), 2),
// q = (a.q + b.q) / 2. Keeps si's identity fields.
PeerState pair_update(const PeerState& si, const PeerState& sj);

// Atomic push-pull: both peers adopt the averaged sketch and q in place.
void exchange(PeerState& a, PeerState& b);

// p* sqrt(gamma^r / delta_g), unclamped.
double epsilon_star(const GossipParams& params, std::uint64_t round);

// 1 / q; throws NotConvergedError when q == 0.
double estimate_p(const PeerState& state);

struct QueryResult {
    std::vector<HeavyHitter> items;  // frequencies already scaled by p~
    double eps_star = 0.0;           // value actually used, in [0, 1)
    double p_estimate = 0.0;
    bool pre_convergence = false;    // eps* >= 1 had to be clamped
};

QueryResult query(const PeerState& state, const GossipParams& params, Timestamp t,
                  const DecaySpec& decay);

// Same selection with an explicit eps*, in [0, 1).
QueryResult query_with(const PeerState& state, double phi, double eps_star, Timestamp t,
                       const DecaySpec& decay);

// One AVG-Merge round over the global state: walk a random permutation and
// average each peer with a uniformly chosen different peer.
void avg_merge_round_in_place(std::span<PeerState> states, Rng& rng);
std::vector<PeerState> avg_merge_round(std::vector<PeerState> states, Rng& rng);

struct GossipMessage {
    enum class Kind : std::uint8_t { push = 0, pull = 1 };

    Kind kind = Kind::push;
    std::uint32_t sender = 0;
    double q = 0.0;
    Sketch sketch;
};

// Message layout: kind u8 | sender u32 | q f64 | sketch (codec layout).
inline constexpr std::size_t kMessageHeaderBytes = 13;
std::size_t message_size(std::size_t depth, std::size_t width);
std::vector<std::uint8_t> encode_message(const GossipMessage& msg);
GossipMessage decode_message(std::span<const std::uint8_t> bytes);

}  // namespace tfhh
