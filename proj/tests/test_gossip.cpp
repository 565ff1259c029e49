#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "tfhh/churn.hpp"
#include "tfhh/gossip.hpp"
#include "tfhh/simulator.hpp"
#include "tfhh/topology.hpp"
#include "tfhh/workload.hpp"

using namespace tfhh;

namespace {

std::vector<PeerState> scalar_peers(std::size_t p) {
    std::vector<PeerState> out;
    for (std::size_t i = 0; i < p; ++i) out.push_back(init_peer(i, {}, 1, 1, 0, DecaySpec{}));
    return out;
}

double q_sum(std::span<const PeerState> states) {
    return std::accumulate(states.begin(), states.end(), 0.0,
                           [](double acc, const PeerState& s) { return acc + s.q; });
}

double q_variance(std::span<const PeerState> states) {
    return live_variance(states, [](const PeerState& s) { return s.q; });
}

}  // namespace

TEST_CASE("init_peer") {
    const DecaySpec lin = DecaySpec::polynomial(1.0);
    const PeerState first = init_peer(0, {}, 2, 4, 1, lin);
    CHECK(first.q == 1.0);
    CHECK(first.round == 0);
    CHECK(first.sketch == new_sketch(2, 4, 1));
    CHECK(init_peer(1, {}, 2, 4, 1, lin).q == 0.0);

    const std::vector<Arrival> s{{7, Timestamp{1}}, {7, Timestamp{2}}};
    const PeerState p = init_peer(0, s, 2, 4, 1, lin);
    for (std::size_t j = 0; j < 2; ++j) {
        const SSummary& cell = p.sketch.cell(j, p.sketch.column(j, 7));
        CHECK(cell.counters[0] == Counter{7, 3.0});
        CHECK(cell.counters[1].empty());
    }
}

TEST_CASE("pair_update averages sketch and q") {
    PeerState a = init_peer(0, {}, 1, 1, 0, DecaySpec{});
    PeerState b = init_peer(1, {}, 1, 1, 0, DecaySpec{});
    a.sketch.cell(0, 0).counters = {Counter{1, 5}, Counter{2, 3}};
    b.sketch.cell(0, 0).counters = {Counter{1, 2}, Counter{3, 4}};
    const PeerState u = pair_update(a, b);
    CHECK(u.id == 0);
    CHECK(u.q == 0.5);
    CHECK(u.sketch.cell(0, 0).mass() == 7.0);
    CHECK(u.sketch.cell(0, 0).counters[0] == Counter{1, 3.5});

    exchange(a, b);
    CHECK(a.q == 0.5);
    CHECK(b.q == 0.5);
    CHECK(a.sketch == b.sketch);
    CHECK(a.id == 0);
    CHECK(b.id == 1);
    CHECK(a.q + b.q == 1.0);
    CHECK(a.sketch.cell(0, 0).mass() + b.sketch.cell(0, 0).mass() == 14.0);

    const PeerState same = pair_update(a, a);
    CHECK(same.q == a.q);
    CHECK(same.sketch == a.sketch);

    PeerState other = init_peer(1, {}, 1, 2, 0, DecaySpec{});
    CHECK_THROWS_AS(pair_update(a, other), std::invalid_argument);
}

TEST_CASE("epsilon_star") {
    GossipParams gp;
    gp.p_star = 10;
    gp.delta_g = 0.04;
    CHECK(epsilon_star(gp, 0) == doctest::Approx(50.0).epsilon(1e-12));
    gp.p_star = 100;
    gp.delta_g = 0.05;
    // 100 * sqrt(gamma^24 / 0.05) with gamma = 1 / (2 sqrt(e))
    CHECK(epsilon_star(gp, 24) == doctest::Approx(2.7047e-4).epsilon(1e-3));
    for (std::uint64_t r = 0; r < 30; ++r) {
        CHECK(epsilon_star(gp, r + 1) == doctest::Approx(std::sqrt(gp.convergence()) * epsilon_star(gp, r)));
    }
    CHECK(gp.convergence() == doctest::Approx(1.0 / (2.0 * std::sqrt(std::exp(1.0)))));
}

TEST_CASE("estimate_p") {
    PeerState s = init_peer(3, {}, 1, 1, 0, DecaySpec{});
    CHECK_THROWS_AS(estimate_p(s), NotConvergedError);
    s.q = 0.2;
    CHECK(estimate_p(s) == doctest::Approx(5.0));
    s.q = 1.0;
    CHECK(estimate_p(s) == 1.0);
}

TEST_CASE("p estimate lands in its error band in most trials") {
    constexpr std::size_t p = 20;
    GossipParams gp;
    gp.p_star = p;
    gp.delta_g = 0.05;
    constexpr int rounds = 12;
    const double eps = epsilon_star(gp, rounds);
    REQUIRE(eps < 1.0);
    const Topology topo = gen_complete(p);
    std::size_t inside = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto states = scalar_peers(p);
        ChurnModel churn = no_churn();
        SimRngs rngs = SimRngs::derive(seed);
        for (int r = 1; r <= rounds; ++r) run_round(topo, states, gp, churn, r, rngs);
        for (const PeerState& s : states) {
            ++total;
            if (s.q <= 0.0) continue;
            const double pt = estimate_p(s);
            if (pt > p / (1 + eps) && pt < p / (1 - eps)) ++inside;
        }
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(total) >= 1.0 - gp.delta_g);
}

TEST_CASE("query on a single peer matches the local query") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    const auto stream = gen_stream(StreamSpec{3000, 100, 1.3, 2});
    const PeerState s = init_peer(0, stream, 3, 32, 5, sq);
    const QueryResult r = query_with(s, 0.05, 0.0, Timestamp{3000}, sq);
    CHECK(r.items == local_query(s.sketch, 0.05, 0.0, Timestamp{3000}, sq));
    CHECK(r.p_estimate == 1.0);
    CHECK_FALSE(r.pre_convergence);

    GossipParams gp;
    gp.p_star = 10;
    gp.phi = 0.05;
    const QueryResult early = query(s, gp, Timestamp{3000}, sq);
    CHECK(early.pre_convergence);
    CHECK(early.eps_star < 1.0);

    PeerState cold = init_peer(1, stream, 3, 32, 5, sq);
    CHECK_THROWS_AS(query(cold, gp, Timestamp{3000}, sq), NotConvergedError);
}

TEST_CASE("four converged peers report the exact heavy hitters") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    const StreamSpec spec{4000, 60, 1.4, 21};
    const auto stream = gen_stream(spec);
    const auto parts = partition(stream, 4);
    std::vector<PeerState> states;
    for (std::size_t i = 0; i < 4; ++i) states.push_back(init_peer(i, parts[i], 4, 128, 77, sq));
    GossipParams gp;
    gp.p_star = 4;
    gp.phi = 0.05;
    const Topology topo = gen_complete(4);
    ChurnModel churn = no_churn();
    SimRngs rngs = SimRngs::derive(3);
    for (int r = 1; r <= 40; ++r) run_round(topo, states, gp, churn, r, rngs);

    const Timestamp t{spec.length};
    const ExactAnswer exact = exact_oracle(stream, sq, t);
    const auto truth = exact.heavy_hitters(gp.phi);
    REQUIRE(!truth.empty());
    for (const PeerState& s : states) {
        const QueryResult r = query(s, gp, t, sq);
        CHECK_FALSE(r.pre_convergence);
        std::vector<ItemId> got;
        for (const auto& h : r.items) {
            got.push_back(h.item);
            CHECK(h.frequency == doctest::Approx(exact.frequency(h.item)).epsilon(0.05));
        }
        CHECK(got == truth);
    }
}

TEST_CASE("AVG-Merge round") {
    Rng rng(1);
    auto one = scalar_peers(1);
    CHECK(avg_merge_round(one, rng)[0].q == 1.0);

    auto four = scalar_peers(4);
    for (int r = 0; r < 30; ++r) {
        four = avg_merge_round(four, rng);
        CHECK(q_sum(four) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (const PeerState& s : four) CHECK(s.q == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("AVG-Merge conserves per-cell sketch mass") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    const auto stream = gen_stream(StreamSpec{5000, 500, 1.0, 4});
    const auto parts = partition(stream, 10);
    std::vector<PeerState> states;
    for (std::size_t i = 0; i < 10; ++i) states.push_back(init_peer(i, parts[i], 2, 8, 9, sq));
    auto cell_mass = [&](std::size_t k) {
        double m = 0;
        for (const PeerState& s : states) m += s.sketch.cells()[k].mass();
        return m;
    };
    std::vector<double> before;
    for (std::size_t k = 0; k < 16; ++k) before.push_back(cell_mass(k));
    Rng rng(2);
    for (int r = 0; r < 15; ++r) avg_merge_round_in_place(states, rng);
    for (std::size_t k = 0; k < 16; ++k) CHECK(cell_mass(k) == doctest::Approx(before[k]).epsilon(1e-9));
}

TEST_CASE("AVG-Merge variance shrinks by about 1/(2 sqrt e) per round") {
    constexpr std::size_t p = 1000;
    constexpr int rounds = 20;
    std::vector<double> mean_var(rounds + 1, 0.0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto states = scalar_peers(p);
        Rng rng = Rng::derive(seed, "avg-merge-test");
        mean_var[0] += q_variance(states);
        for (int r = 1; r <= rounds; ++r) {
            avg_merge_round_in_place(states, rng);
            mean_var[r] += q_variance(states);
        }
    }
    double ratio = 0;
    for (int r = 5; r < rounds; ++r) ratio += mean_var[r + 1] / mean_var[r];
    ratio /= rounds - 5;
    CHECK(ratio >= 0.25);
    CHECK(ratio <= 0.36);
}

TEST_CASE("gossip message codec") {
    GossipMessage m{GossipMessage::Kind::pull, 1234, 0.125, new_sketch(2, 3, 42)};
    m.sketch.update(5, 2.5);
    const auto bytes = encode_message(m);
    CHECK(bytes.size() == message_size(2, 3));
    CHECK(bytes.size() == kMessageHeaderBytes + encoded_sketch_size(2, 3));
    const GossipMessage back = decode_message(bytes);
    CHECK(back.kind == m.kind);
    CHECK(back.sender == m.sender);
    CHECK(back.q == m.q);
    CHECK(back.sketch == m.sketch);
    auto bad = bytes;
    bad[0] = 7;
    CHECK_THROWS_AS(decode_message(bad), DecodeError);
}

TEST_CASE("gossip params validation") {
    GossipParams gp;
    CHECK_NOTHROW(gp.validate());
    gp.delta_g = 1.0;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
    gp = GossipParams{};
    gp.fan_out = 0;
    CHECK_THROWS_AS(gp.validate(), std::invalid_argument);
}
