#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "tfhh/codec.hpp"
#include "tfhh/rng.hpp"
#include "tfhh/sketch.hpp"
#include "tfhh/workload.hpp"

using namespace tfhh;

namespace {

constexpr ItemId A = 1, B = 2, C = 3, D = 4;

SSummary cell_of(Counter x, Counter y) {
    SSummary s;
    s.counters = {x, y};
    return s;
}

Counter ctr(ItemId item, double f) { return Counter{item, f}; }

bool close_rel(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

SSummary random_summary(Rng& rng, ItemId universe) {
    SSummary s;
    const auto n = rng.below(3);
    for (std::uint64_t k = 0; k < n; ++k) {
        s.update(static_cast<ItemId>(rng.below(universe)), 1.0 + 99.0 * rng.uniform01());
    }
    return s;
}

}  // namespace

TEST_CASE("new_sketch allocates empty cells") {
    const Sketch sk = new_sketch(4, 8, 7);
    CHECK(sk.cells().size() == 32);
    std::size_t empty = 0;
    for (const SSummary& s : sk.cells()) {
        for (const Counter& c : s.counters) empty += c.empty() ? 1 : 0;
    }
    CHECK(empty == 64);
    CHECK_THROWS_AS(new_sketch(0, 8, 7), std::invalid_argument);
    CHECK_THROWS_AS(new_sketch(4, 0, 7), std::invalid_argument);
}

TEST_CASE("hash functions are shared by seed and stay in range") {
    const Sketch a = new_sketch(4, 8, 99), b = new_sketch(4, 8, 99), c = new_sketch(4, 8, 100);
    Rng rng(5);
    bool differs = false;
    for (int k = 0; k < 100000; ++k) {
        const auto x = static_cast<ItemId>(rng.next());
        const std::size_t h = a.column(0, x);
        REQUIRE(h < 8);
        CHECK(h == b.column(0, x));
        differs = differs || h != c.column(0, x);
    }
    CHECK(differs);
    CHECK(std::equal(a.hashes().begin(), a.hashes().end(), b.hashes().begin()));
}

TEST_CASE("forward decay weights") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    CHECK(weight(Timestamp{5}, sq) == 25.0);
    CHECK(normalized_weight(Timestamp{5}, Timestamp{10}, sq) == doctest::Approx(0.25));
    CHECK(normalized_weight(Timestamp{7}, Timestamp{7}, DecaySpec::exponential(0.1)) == 1.0);
    CHECK(weight(Timestamp{3}, DecaySpec::polynomial(1.0)) == 3.0);
    CHECK_THROWS_AS(weight(Timestamp{0}, sq), std::invalid_argument);
    CHECK_THROWS_AS(weight(Timestamp{4}, DecaySpec::polynomial(2.0, Timestamp{4})),
                    std::invalid_argument);
    CHECK(weight(Timestamp{6}, DecaySpec::polynomial(2.0, Timestamp{4})) == 4.0);
    CHECK(weight(Timestamp{2}, DecaySpec::exponential(0.5)) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("space-saving update") {
    SSummary s;
    CHECK(ss_update(s, A, 3.5) == cell_of(ctr(A, 3.5), Counter{}));
    s = cell_of(ctr(A, 5.0), ctr(B, 2.0));
    CHECK(ss_update(s, A, 1.5) == cell_of(ctr(A, 6.5), ctr(B, 2.0)));
    CHECK(ss_update(s, C, 1.0) == cell_of(ctr(A, 5.0), ctr(C, 3.0)));
    // tie at the minimum evicts the lower index
    s = cell_of(ctr(A, 2.0), ctr(B, 2.0));
    CHECK(ss_update(s, C, 1.0) == cell_of(ctr(C, 3.0), ctr(B, 2.0)));
}

TEST_CASE("sketch update on a single cell") {
    const DecaySpec lin = DecaySpec::polynomial(1.0);
    Sketch sk = new_sketch(1, 1, 0);
    sk = sketch_update(sk, A, Timestamp{2}, lin);
    CHECK(sk.cell(0, 0) == cell_of(ctr(A, 2.0), Counter{}));
    sk = sketch_update(sk, A, Timestamp{2}, lin);
    CHECK(sk.cell(0, 0) == cell_of(ctr(A, 4.0), Counter{}));
}

TEST_CASE("1-norm: every cell holds the weight hashed to it") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Sketch sk = new_sketch(3, 16, rng.next());
        std::vector<std::vector<double>> expect(3, std::vector<double>(16, 0.0));
        double total = 0.0;
        for (std::uint64_t t = 1; t <= 2000; ++t) {
            const auto x = static_cast<ItemId>(rng.below(300));
            sk.update(x, weight(Timestamp{t}, sq));
            total += weight(Timestamp{t}, sq);
            for (std::size_t j = 0; j < 3; ++j) expect[j][sk.column(j, x)] += weight(Timestamp{t}, sq);
        }
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(close_rel(sk.raw_row_mass(j), total));
            for (std::size_t c = 0; c < 16; ++c) CHECK(close_rel(sk.cell(j, c).mass(), expect[j][c]));
        }
    }
}

TEST_CASE("point estimates") {
    const DecaySpec lin = DecaySpec::polynomial(1.0);
    Sketch sk = new_sketch(1, 1, 0);
    CHECK(point_estimate(sk, A, Timestamp{1}, lin) == 0.0);
    sk.cell(0, 0) = cell_of(ctr(A, 5.0), ctr(B, 2.0));
    CHECK(point_estimate(sk, A, Timestamp{1}, lin) == 5.0);
    CHECK(point_estimate(sk, C, Timestamp{1}, lin) == 2.0);
}

TEST_CASE("point estimates never underestimate and stay within the cell minimum") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    const StreamSpec spec{20000, 2000, 1.1, 3};
    const auto stream = gen_stream(spec);
    const Timestamp t{spec.length};
    const ExactAnswer exact = exact_oracle(stream, sq, t);
    Sketch sk = new_sketch(4, 64, 17);
    sk.update(std::span<const Arrival>(stream), sq);
    const double norm = weight(t, sq);
    for (const auto& [item, f] : exact.frequencies) {
        const double est = point_estimate(sk, item, t, sq);
        CHECK(est >= f * (1 - 1e-12));
        for (std::size_t j = 0; j < sk.depth(); ++j) {
            const SSummary& cell = sk.cell(j, sk.column(j, item));
            CHECK(cell.estimate(item) / norm - f <= cell.min_frequency() / norm * (1 + 1e-12) + 1e-15);
            CHECK(cell.min_frequency() <= cell.mass() / 2);
        }
    }
}

TEST_CASE("overestimation beyond e C / (2w) is rare") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    constexpr std::size_t d = 3, w = 50;
    std::size_t bad = 0, items = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const StreamSpec spec{50000, 5000, 0.8, seed};
        const auto stream = gen_stream(spec);
        const Timestamp t{spec.length};
        const ExactAnswer exact = exact_oracle(stream, sq, t);
        Sketch sk = new_sketch(d, w, seed);
        sk.update(std::span<const Arrival>(stream), sq);
        const double slack = std::numbers::e * exact.total / (2.0 * w);
        for (const auto& [item, f] : exact.frequencies) {
            ++items;
            if (point_estimate(sk, item, t, sq) > f + slack) ++bad;
        }
    }
    CHECK(static_cast<double>(bad) / static_cast<double>(items) <= std::exp(-3.0) + 0.02);
}

TEST_CASE("sketch_total") {
    const DecaySpec lin = DecaySpec::polynomial(1.0);
    Sketch sk = new_sketch(3, 5, 1);
    CHECK(sketch_total(sk, Timestamp{10}, lin) == 0.0);
    sk.update(A, 2.0);
    sk.update(B, 3.0);
    CHECK(sketch_total(sk, Timestamp{10}, lin) == doctest::Approx(0.5));
    for (std::size_t j = 1; j < 3; ++j) CHECK(sk.raw_row_mass(j) == sk.raw_row_mass(0));
}

TEST_CASE("merge of summaries") {
    const SSummary m = merge_summaries(cell_of(ctr(A, 5), ctr(B, 3)), cell_of(ctr(A, 2), ctr(C, 4)));
    CHECK(m == cell_of(ctr(A, 7), ctr(C, 7)));
    const SSummary disjoint =
        merge_summaries(cell_of(ctr(A, 5), ctr(B, 3)), cell_of(ctr(C, 4), ctr(D, 2)));
    CHECK(disjoint == cell_of(ctr(A, 7), ctr(C, 7)));
    CHECK(disjoint.mass() == 14);
    const SSummary x = cell_of(ctr(A, 5), ctr(B, 3));
    CHECK(merge_summaries(x, SSummary{}) == x);
    CHECK(merge_summaries(SSummary{}, x) == x);
    const SSummary half = merge_summaries(cell_of(ctr(A, 5), Counter{}), cell_of(ctr(B, 2), Counter{}));
    CHECK(half == cell_of(ctr(A, 5), ctr(B, 2)));
}

TEST_CASE("randomized merge preserves mass and never lowers estimates") {
    Rng rng(23);
    for (int k = 0; k < 20000; ++k) {
        const SSummary a = random_summary(rng, 6), b = random_summary(rng, 6);
        const SSummary m = merge_summaries(a, b);
        CHECK(close_rel(m.mass(), a.mass() + b.mass()));
        for (ItemId x = 0; x < 6; ++x) {
            CHECK(m.estimate(x) >= a.estimate(x) * (1 - 1e-12));
            CHECK(m.estimate(x) >= b.estimate(x) * (1 - 1e-12));
        }
        if (m.counters[0].item && m.counters[1].item) CHECK(*m.counters[0].item != *m.counters[1].item);
    }
}

TEST_CASE("merge requires compatible sketches") {
    const Sketch a = new_sketch(2, 4, 1);
    CHECK_THROWS_AS(merge(a, new_sketch(2, 4, 2)), std::invalid_argument);
    CHECK_THROWS_AS(merge(a, new_sketch(3, 4, 1)), std::invalid_argument);
    CHECK(merge(a, new_sketch(2, 4, 1)) == a);
}

TEST_CASE("scale") {
    Sketch sk = new_sketch(1, 1, 0);
    sk.cell(0, 0) = cell_of(ctr(A, 7), ctr(C, 7));
    CHECK(scale(sk, 1.0) == sk);
    CHECK(scale(sk, 2.0).cell(0, 0) == cell_of(ctr(A, 3.5), ctr(C, 3.5)));
    Rng rng(4);
    Sketch big = new_sketch(3, 7, 2);
    for (int k = 0; k < 500; ++k) big.update(static_cast<ItemId>(rng.below(50)), rng.uniform01() * 10);
    const Sketch back = scale(scale(big, 2.0), 0.5);
    for (std::size_t k = 0; k < big.cells().size(); ++k) {
        for (int c = 0; c < 2; ++c) {
            CHECK(back.cells()[k].counters[c].item == big.cells()[k].counters[c].item);
            CHECK(close_rel(back.cells()[k].counters[c].fhat, big.cells()[k].counters[c].fhat));
        }
    }
    CHECK_THROWS_AS(scale(sk, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scale(sk, -1.0), std::invalid_argument);
}

TEST_CASE("local query") {
    const DecaySpec lin = DecaySpec::polynomial(1.0);
    CHECK(local_query(new_sketch(2, 4, 0), 0.5, 0.0, Timestamp{1}, lin).empty());
    Sketch sk = new_sketch(1, 1, 0);
    sk.cell(0, 0) = cell_of(ctr(A, 8), ctr(B, 2));
    const auto h = local_query(sk, 0.5, 0.0, Timestamp{1}, lin);
    REQUIRE(h.size() == 1);
    CHECK(h[0] == HeavyHitter{A, 8.0});
    CHECK_THROWS_AS(local_query(sk, 0.0, 0.0, Timestamp{1}, lin), std::invalid_argument);
    CHECK_THROWS_AS(local_query(sk, 0.5, 1.0, Timestamp{1}, lin), std::invalid_argument);
}

TEST_CASE("local query reports each item once, sorted") {
    const DecaySpec sq = DecaySpec::polynomial(2.0);
    const StreamSpec spec{5000, 200, 1.5, 8};
    const auto stream = gen_stream(spec);
    Sketch sk = new_sketch(5, 40, 3);
    sk.update(std::span<const Arrival>(stream), sq);
    const auto h = local_query(sk, 0.05, 0.0, Timestamp{spec.length}, sq);
    REQUIRE(!h.empty());
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k - 1].item < h[k].item);
}

TEST_CASE("sketch codec round trip") {
    Rng rng(9);
    Sketch sk = new_sketch(3, 5, 0xfeedULL);
    for (int k = 0; k < 40; ++k) sk.update(static_cast<ItemId>(rng.next()), rng.uniform01() * 1e6);
    const auto bytes = encode_sketch(sk);
    CHECK(bytes.size() == encoded_sketch_size(3, 5));
    CHECK(bytes.size() == kSketchHeaderBytes + 3 * 5 * 2 * kCounterBytes);
    CHECK(decode_sketch(bytes) == sk);
    CHECK(bytes[0] == 'T');
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(decode_sketch(encode_sketch(new_sketch(1, 1, 0))) == new_sketch(1, 1, 0));
}

TEST_CASE("sketch codec rejects malformed input") {
    const auto good = encode_sketch(new_sketch(2, 2, 5));
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_sketch(bad_magic), DecodeError);
    auto bad_version = good;
    bad_version[4] = 9;
    CHECK_THROWS_AS(decode_sketch(bad_version), DecodeError);
    CHECK_THROWS_AS(decode_sketch(std::span(good).first(good.size() - 1)), DecodeError);
    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_sketch(trailing), DecodeError);
    auto bad_flag = good;
    bad_flag[kSketchHeaderBytes + 4] = 2;
    CHECK_THROWS_AS(decode_sketch(bad_flag), DecodeError);
}
