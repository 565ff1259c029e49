#include "tfhh/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "tfhh/codec.hpp"

namespace tfhh {

void StreamSpec::validate() const {
    if (length < 1) throw std::invalid_argument("stream length must be >= 1");
    if (universe < 1) throw std::invalid_argument("universe must be >= 1");
    if (!(skew > 0.0) || !std::isfinite(skew)) throw std::invalid_argument("skew must be positive");
}

ZipfSampler::ZipfSampler(std::uint32_t universe, double skew) {
    if (universe < 1) throw std::invalid_argument("universe must be >= 1");
    if (!(skew > 0.0)) throw std::invalid_argument("skew must be positive");
    cdf_.resize(universe);
    double acc = 0.0;
    for (std::uint32_t i = 0; i < universe; ++i) {
        acc += std::pow(static_cast<double>(i) + 1.0, -skew);
        cdf_[i] = acc;
    }
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0;
}

std::uint32_t ZipfSampler::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
        std::distance(cdf_.begin(), it), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

double ZipfSampler::pmf(std::uint32_t rank) const {
    return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

std::vector<ItemId> rank_to_item(const StreamSpec& spec) {
    std::vector<ItemId> ids(spec.universe);
    std::iota(ids.begin(), ids.end(), ItemId{0});
    Rng rng = Rng::derive(spec.seed, "zipf-ids");
    rng.shuffle(std::span<ItemId>(ids));
    return ids;
}

std::vector<Arrival> gen_stream(const StreamSpec& spec) {
    spec.validate();
    const ZipfSampler zipf(spec.universe, spec.skew);
    const std::vector<ItemId> ids = rank_to_item(spec);
    Rng rng = Rng::derive(spec.seed, "zipf-draws");
    std::vector<Arrival> out;
    out.reserve(spec.length);
    for (std::uint64_t k = 0; k < spec.length; ++k) {
        out.push_back({ids[zipf.sample(rng)], Timestamp{k + 1}});
    }
    return out;
}

std::vector<std::vector<Arrival>> partition(std::span<const Arrival> stream, std::size_t p) {
    if (p < 1) throw std::invalid_argument("partition needs p >= 1");
    std::vector<std::vector<Arrival>> parts(p);
    for (auto& part : parts) part.reserve(stream.size() / p + 1);
    for (std::size_t k = 0; k < stream.size(); ++k) parts[k % p].push_back(stream[k]);
    return parts;
}

double ExactAnswer::frequency(ItemId item) const {
    const auto it = frequencies.find(item);
    return it == frequencies.end() ? 0.0 : it->second;
}

std::vector<ItemId> ExactAnswer::heavy_hitters(double phi) const {
    std::vector<ItemId> out;
    const double threshold = phi * total;
    for (const auto& [item, f] : frequencies) {
        if (f > threshold) out.push_back(item);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ExactAnswer exact_oracle(std::span<const Arrival> stream, const DecaySpec& decay, Timestamp t) {
    const double norm = weight(t, decay);
    ExactAnswer ans;
    std::unordered_map<ItemId, double> raw;
    double raw_total = 0.0;
    for (const Arrival& a : stream) {
        if (a.ts > t) throw std::invalid_argument("query time precedes a stream arrival");
        const double x = weight(a.ts, decay);
        raw[a.item] += x;
        raw_total += x;
    }
    ans.frequencies.reserve(raw.size());
    for (const auto& [item, x] : raw) ans.frequencies.emplace(item, x / norm);
    ans.total = raw_total / norm;
    return ans;
}

void write_stream(std::span<const Arrival> stream, std::ostream& out) {
    ByteWriter w;
    w.bytes().reserve(stream.size() * 12);
    for (const Arrival& a : stream) {
        w.u32(a.item);
        w.u64(a.ts.tick);
    }
    const auto& bytes = w.bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed to write stream");
}

std::vector<Arrival> read_stream(std::istream& in) {
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                          std::istreambuf_iterator<char>()};
    if (bytes.size() % 12 != 0) throw DecodeError("stream file size is not a multiple of 12");
    ByteReader r(bytes);
    std::vector<Arrival> out;
    out.reserve(bytes.size() / 12);
    while (r.remaining() > 0) {
        const ItemId item = r.u32();
        const std::uint64_t tick = r.u64();
        out.push_back({item, Timestamp{tick}});
    }
    return out;
}

}  // namespace tfhh
