#include "tfhh/sketch.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "tfhh/rng.hpp"

namespace tfhh {

double SSummary::min_frequency() const {
    if (counters[0].empty() || counters[1].empty()) return 0.0;
    return std::min(counters[0].fhat, counters[1].fhat);
}

const Counter* SSummary::find(ItemId item) const {
    for (const auto& c : counters) {
        if (c.item == item) return &c;
    }
    return nullptr;
}

const Counter& SSummary::max_counter() const {
    return counters[1].fhat > counters[0].fhat ? counters[1] : counters[0];
}

double SSummary::estimate(ItemId item) const {
    if (const Counter* c = find(item)) return c->fhat;
    return min_frequency();
}

void SSummary::update(ItemId item, double x) {
    for (auto& c : counters) {
        if (c.item == item) {
            c.fhat += x;
            return;
        }
    }
    for (auto& c : counters) {
        if (c.empty()) {
            c.item = item;
            c.fhat = x;
            return;
        }
    }
    Counter& victim = counters[1].fhat < counters[0].fhat ? counters[1] : counters[0];
    victim.fhat += x;
    victim.item = item;
}

SSummary ss_update(SSummary s, ItemId item, double x) {
    s.update(item, x);
    return s;
}

SSummary merge_summaries(const SSummary& a, const SSummary& b) {
    struct Candidate {
        ItemId item;
        double fhat;
    };
    std::array<Candidate, 4> candidates{};
    std::size_t n = 0;

    const double min_a = a.min_frequency();
    const double min_b = b.min_frequency();
    for (const auto& ca : a.counters) {
        if (ca.empty()) continue;
        const Counter* cb = b.find(*ca.item);
        candidates[n++] = {*ca.item, ca.fhat + (cb ? cb->fhat : min_b)};
    }
    for (const auto& cb : b.counters) {
        if (cb.empty() || a.find(*cb.item)) continue;
        candidates[n++] = {*cb.item, cb.fhat + min_a};
    }
    std::sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
              [](const Candidate& x, const Candidate& y) {
                  if (x.fhat != y.fhat) return x.fhat > y.fhat;
                  return x.item < y.item;
              });

    SSummary out;
    for (std::size_t k = 0; k < std::min<std::size_t>(n, 2); ++k) {
        out.counters[k] = Counter{candidates[k].item, candidates[k].fhat};
    }
    return out;
}

Sketch::Sketch(std::size_t depth, std::size_t width, std::uint64_t hash_seed)
    : depth_(depth), width_(width), hash_seed_(hash_seed) {
    if (depth == 0 || width == 0) {
        throw std::invalid_argument("sketch depth and width must be positive");
    }
    hashes_.reserve(depth);
    for (std::size_t j = 0; j < depth; ++j) {
        Rng rng = Rng::derive(hash_seed, "sketch-hash", j);
        HashParams h;
        h.a = 1 + rng.below(kPrime - 1);
        h.b = rng.below(kPrime);
        hashes_.push_back(h);
    }
    cells_.resize(depth * width);
}

std::size_t Sketch::column(std::size_t row, ItemId item) const {
    const HashParams& h = hashes_[row];
    const uint128 v = static_cast<uint128>(h.a) * item + h.b;
    return static_cast<std::size_t>(static_cast<std::uint64_t>(v % kPrime) % width_);
}

void Sketch::update(ItemId item, double x) {
    for (std::size_t j = 0; j < depth_; ++j) {
        cell(j, column(j, item)).update(item, x);
    }
}

void Sketch::update(const Arrival& a, const DecaySpec& decay) { update(a.item, weight(a.ts, decay)); }

void Sketch::update(std::span<const Arrival> stream, const DecaySpec& decay) {
    for (const Arrival& a : stream) update(a, decay);
}

double Sketch::raw_estimate(ItemId item) const {
    double answer = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < depth_; ++j) {
        answer = std::min(answer, cell(j, column(j, item)).estimate(item));
    }
    return answer;
}

double Sketch::raw_row_mass(std::size_t r) const {
    double total = 0.0;
    for (const SSummary& s : row(r)) total += s.mass();
    return total;
}

Sketch& Sketch::merge_in(const Sketch& other) {
    if (!compatible(other)) {
        throw std::invalid_argument("cannot merge sketches with different (depth, width, hash seed)");
    }
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        cells_[k] = merge_summaries(cells_[k], other.cells_[k]);
    }
    return *this;
}

Sketch& Sketch::scale_down(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("scale factor must be positive");
    for (SSummary& s : cells_) {
        for (Counter& c : s.counters) c.fhat /= v;
    }
    return *this;
}

Sketch new_sketch(std::size_t depth, std::size_t width, std::uint64_t hash_seed) {
    return Sketch(depth, width, hash_seed);
}

Sketch sketch_update(Sketch sk, ItemId item, Timestamp ts, const DecaySpec& decay) {
    sk.update(item, weight(ts, decay));
    return sk;
}

double point_estimate(const Sketch& sk, ItemId item, Timestamp t, const DecaySpec& decay) {
    return sk.raw_estimate(item) / weight(t, decay);
}

double sketch_total(const Sketch& sk, Timestamp t, const DecaySpec& decay) {
    return sk.raw_row_mass(0) / weight(t, decay);
}

Sketch merge(const Sketch& a, const Sketch& b) {
    Sketch out = a;
    out.merge_in(b);
    return out;
}

Sketch scale(Sketch sk, double v) {
    sk.scale_down(v);
    return sk;
}

std::vector<HeavyHitter> local_query(const Sketch& sk, double phi, double eps_star, Timestamp t,
                                     const DecaySpec& decay) {
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0, 1)");
    if (!(eps_star >= 0.0 && eps_star < 1.0)) {
        throw std::invalid_argument("eps_star must lie in [0, 1)");
    }
    const double norm = weight(t, decay);
    const double total = sk.raw_row_mass(0) / norm;
    const double tau = phi * total * (1.0 - eps_star) / (1.0 + eps_star);

    std::map<ItemId, double> found;
    for (const SSummary& s : sk.cells()) {
        const Counter& top = s.max_counter();
        if (top.empty() || !(top.fhat / norm > tau)) continue;
        const double estimate = sk.raw_estimate(*top.item) / norm;
        if (estimate > tau) found.emplace(*top.item, estimate);
    }

    std::vector<HeavyHitter> out;
    out.reserve(found.size());
    for (const auto& [item, f] : found) out.push_back({item, f});
    return out;
}

}  // namespace tfhh
