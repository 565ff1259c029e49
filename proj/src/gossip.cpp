#include "tfhh/gossip.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tfhh/planner.hpp"

namespace tfhh {

double GossipParams::convergence() const { return gamma > 0.0 ? gamma : planner::gamma(); }

void GossipParams::validate() const {
    if (!(p_star >= 1.0)) throw std::invalid_argument("p_star must be >= 1");
    if (!(delta_g > 0.0 && delta_g < 1.0)) throw std::invalid_argument("delta_g must lie in (0, 1)");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
    if (fan_out < 1) throw std::invalid_argument("fan_out must be >= 1");
    if (rounds < 0) throw std::invalid_argument("rounds must be >= 0");
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0, 1)");
}

PeerState init_peer(std::size_t id, std::span<const Arrival> local_stream, std::size_t depth,
                    std::size_t width, std::uint64_t hash_seed, const DecaySpec& decay) {
    PeerState s{id, Sketch(depth, width, hash_seed), id == 0 ? 1.0 : 0.0, 0, true, true};
    s.sketch.update(local_stream, decay);
    return s;
}

PeerState pair_update(const PeerState& si, const PeerState& sj) {
    PeerState out = si;
    out.sketch.merge_in(sj.sketch).scale_down(2.0);
    out.q = (si.q + sj.q) / 2.0;
    return out;
}

void exchange(PeerState& a, PeerState& b) {
    a.sketch.merge_in(b.sketch).scale_down(2.0);
    a.q = (a.q + b.q) / 2.0;
    b.sketch = a.sketch;
    b.q = a.q;
}

double epsilon_star(const GossipParams& params, std::uint64_t round) {
    const double gamma = params.convergence();
    return params.p_star * std::sqrt(std::pow(gamma, static_cast<double>(round)) / params.delta_g);
}

double estimate_p(const PeerState& state) {
    if (!(state.q > 0.0)) {
        throw NotConvergedError("peer " + std::to_string(state.id) +
                                " holds no averaging mass yet (q = 0)");
    }
    return 1.0 / state.q;
}

QueryResult query_with(const PeerState& state, double phi, double eps_star, Timestamp t,
                       const DecaySpec& decay) {
    QueryResult r;
    r.p_estimate = estimate_p(state);
    r.eps_star = eps_star;
    r.items = local_query(state.sketch, phi, eps_star, t, decay);
    for (HeavyHitter& h : r.items) h.frequency *= r.p_estimate;
    return r;
}

QueryResult query(const PeerState& state, const GossipParams& params, Timestamp t,
                  const DecaySpec& decay) {
    double eps = epsilon_star(params, state.round);
    bool clamped = false;
    if (!(eps < 1.0)) {
        eps = std::nextafter(1.0, 0.0);
        clamped = true;
    }
    QueryResult r = query_with(state, params.phi, eps, t, decay);
    r.pre_convergence = clamped;
    return r;
}

void avg_merge_round_in_place(std::span<PeerState> states, Rng& rng) {
    const std::size_t p = states.size();
    if (p < 2) return;
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
        std::size_t j = rng.below(p - 1);
        if (j >= i) ++j;
        exchange(states[i], states[j]);
    }
}

std::vector<PeerState> avg_merge_round(std::vector<PeerState> states, Rng& rng) {
    avg_merge_round_in_place(states, rng);
    return states;
}

std::size_t message_size(std::size_t depth, std::size_t width) {
    return kMessageHeaderBytes + encoded_sketch_size(depth, width);
}

std::vector<std::uint8_t> encode_message(const GossipMessage& msg) {
    ByteWriter w;
    w.bytes().reserve(message_size(msg.sketch.depth(), msg.sketch.width()));
    w.u8(static_cast<std::uint8_t>(msg.kind));
    w.u32(msg.sender);
    w.f64(msg.q);
    encode_sketch(msg.sketch, w);
    return w.take();
}

GossipMessage decode_message(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw DecodeError("unknown message kind");
    const std::uint32_t sender = r.u32();
    const double q = r.f64();
    if (!(q >= 0.0) || !std::isfinite(q)) throw DecodeError("malformed q");
    Sketch sk = decode_sketch(r);
    if (r.remaining() != 0) throw DecodeError("trailing bytes after message");
    return GossipMessage{static_cast<GossipMessage::Kind>(kind), sender, q, std::move(sk)};
}

}  // namespace tfhh
