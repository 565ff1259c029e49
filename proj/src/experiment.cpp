#include "tfhh/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <thread>

#include "tfhh/gossip.hpp"
#include "tfhh/rng.hpp"
#include "tfhh/simulator.hpp"
#include "tfhh/workload.hpp"

namespace tfhh {

using nlohmann::json;

ExperimentConfig ExperimentConfig::desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::full() {
    ExperimentConfig c;
    c.stream_length = 100'000'000;
    c.peers = 5000;
    c.width = 2500;
    c.p_star = 5000.0;
    return c;
}

double ExperimentConfig::effective_edge_prob() const {
    return edge_prob > 0.0 ? edge_prob : default_edge_prob(peers);
}

GossipParams ExperimentConfig::gossip_params() const {
    GossipParams g;
    g.p_star = p_star;
    g.delta_g = delta_g;
    g.fan_out = fan_out;
    g.rounds = rounds;
    g.phi = phi;
    return g;
}

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw ConfigError("field '" + field + "': " + why);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (stream_length < 1) bad("stream_length", "must be >= 1");
    if (universe < 1) bad("universe", "must be >= 1");
    if (!(skew > 0.0) || !std::isfinite(skew)) bad("skew", "must be positive");
    if (peers < 1) bad("peers", "must be >= 1");
    if (topology == Topology::Kind::barabasi_albert &&
        (m_attach < 1 || peers <= static_cast<std::size_t>(m_attach))) {
        bad("m_attach", "barabasi_albert needs peers > m_attach >= 1");
    }
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) bad("edge_prob", "must lie in [0, 1]");
    if (depth < 1) bad("depth", "must be >= 1");
    if (width < 1) bad("width", "must be >= 1");
    if (rounds < 0) bad("rounds", "must be >= 0");
    if (fan_out < 1) bad("fan_out", "must be >= 1");
    if (!(phi > 0.0 && phi < 1.0)) bad("phi", "must lie in (0, 1)");
    if (!(p_star >= static_cast<double>(peers))) bad("p_star", "must be >= peers");
    if (!(delta_g > 0.0 && delta_g < 1.0)) bad("delta_g", "must lie in (0, 1)");
    if (!(decay.parameter > 0.0) || !std::isfinite(decay.parameter)) {
        bad("decay_parameter", "must be positive");
    }
    if (decay.landmark.tick >= 1) bad("landmark", "must precede the first timestamp (tick 1)");
    if (!(fail_prob >= 0.0 && fail_prob <= 1.0)) bad("fail_prob", "must lie in [0, 1]");
    if (repetitions < 1) bad("repetitions", "must be >= 1");
    if (output.empty()) bad("output", "must not be empty");
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["stream_length"] = c.stream_length;
    j["universe"] = c.universe;
    j["skew"] = c.skew;
    j["peers"] = c.peers;
    j["topology"] = to_string(c.topology);
    j["m_attach"] = c.m_attach;
    j["edge_prob"] = c.edge_prob;
    j["depth"] = c.depth;
    j["width"] = c.width;
    j["rounds"] = c.rounds;
    j["fan_out"] = c.fan_out;
    j["phi"] = c.phi;
    j["p_star"] = c.p_star;
    j["delta_g"] = c.delta_g;
    j["decay"] = to_string(c.decay.kind);
    j["decay_parameter"] = c.decay.parameter;
    j["landmark"] = c.decay.landmark.tick;
    j["churn"] = to_string(c.churn);
    j["fail_prob"] = c.fail_prob;
    j["lifetime"] = to_string(c.lifetime);
    j["repetitions"] = c.repetitions;
    j["master_seed"] = c.master_seed;
    j["output"] = c.output;
    return j;
}

namespace {

template <typename T>
void read_field(const json& doc, const char* key, T& dst) {
    const auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
        if constexpr (std::is_unsigned_v<T>) {
            if (it->is_number_integer() && !it->is_number_unsigned() &&
                it->template get<std::int64_t>() < 0) {
                bad(key, "must be non-negative");
            }
            if (!it->is_number_integer()) bad(key, "expected an integer");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) bad(key, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) bad(key, "expected a number");
        } else {
            if (!it->is_string()) bad(key, "expected a string");
        }
        dst = it->template get<T>();
    } catch (const json::exception& e) {
        bad(key, e.what());
    }
}

template <typename Enum, typename Parse>
void read_enum(const json& doc, const char* key, Enum& dst, Parse parse) {
    std::string name;
    read_field(doc, key, name);
    if (name.empty()) return;
    try {
        dst = parse(name);
    } catch (const std::invalid_argument& e) {
        bad(key, e.what());
    }
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k;
        const json fields = to_json(ExperimentConfig{});
        for (const auto& [key, value] : fields.items()) k.insert(key);
        return k;
    }();
    return keys;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, const ExperimentConfig& base) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "sweep" && !known_keys().count(key)) bad(key, "unknown field");
    }
    ExperimentConfig c = base;
    read_field(doc, "stream_length", c.stream_length);
    read_field(doc, "universe", c.universe);
    read_field(doc, "skew", c.skew);
    read_field(doc, "peers", c.peers);
    read_enum(doc, "topology", c.topology, topology_kind_from_string);
    read_field(doc, "m_attach", c.m_attach);
    read_field(doc, "edge_prob", c.edge_prob);
    read_field(doc, "depth", c.depth);
    read_field(doc, "width", c.width);
    read_field(doc, "rounds", c.rounds);
    read_field(doc, "fan_out", c.fan_out);
    read_field(doc, "phi", c.phi);
    read_field(doc, "p_star", c.p_star);
    read_field(doc, "delta_g", c.delta_g);
    read_enum(doc, "decay", c.decay.kind, decay_kind_from_string);
    read_field(doc, "decay_parameter", c.decay.parameter);
    read_field(doc, "landmark", c.decay.landmark.tick);
    read_enum(doc, "churn", c.churn, churn_kind_from_string);
    read_field(doc, "fail_prob", c.fail_prob);
    read_enum(doc, "lifetime", c.lifetime, lifetime_from_string);
    read_field(doc, "repetitions", c.repetitions);
    read_field(doc, "master_seed", c.master_seed);
    read_field(doc, "output", c.output);
    c.validate();
    return c;
}

std::string render(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig parse_config(const std::string& text, const ExperimentConfig& base) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(doc, base);
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = to_json(cfg);
    j.erase("output");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, Rng::fnv1a(j.dump()));
    return buf;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    if (!known_keys().count(key)) bad(key, "unknown field");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    doc[key] = std::move(value);
}

std::vector<ExperimentConfig> expand_sweep(const json& doc, const ExperimentConfig& base) {
    const auto it = doc.find("sweep");
    if (it == doc.end()) return {config_from_json(doc, base)};
    const json& sweep = *it;
    if (!sweep.is_object() || !sweep.contains("field") || !sweep["field"].is_string() ||
        !sweep.contains("values") || !sweep["values"].is_array() || sweep["values"].empty()) {
        throw ConfigError("field 'sweep': expected {\"field\": name, \"values\": [..]}");
    }
    const auto field = sweep["field"].get<std::string>();
    if (!known_keys().count(field)) bad("sweep", "unknown field '" + field + "'");
    std::vector<ExperimentConfig> out;
    for (const json& v : sweep["values"]) {
        json d = doc;
        d.erase("sweep");
        d[field] = v;
        out.push_back(config_from_json(d, base));
    }
    return out;
}

std::uint64_t repetition_seed(const ExperimentConfig& cfg, int rep) {
    return Rng::mix_key(cfg.master_seed, "repetition", static_cast<std::uint64_t>(rep));
}

std::vector<Arrival> repetition_stream(const ExperimentConfig& cfg, int rep) {
    const StreamSpec spec{cfg.stream_length, cfg.universe, cfg.skew,
                          Rng::mix_key(repetition_seed(cfg, rep), "stream", 0)};
    return gen_stream(spec);
}

Topology repetition_topology(const ExperimentConfig& cfg, int rep) {
    const std::uint64_t seed = Rng::mix_key(repetition_seed(cfg, rep), "topology", 0);
    switch (cfg.topology) {
        case Topology::Kind::complete: return gen_complete(cfg.peers);
        case Topology::Kind::erdos_renyi:
            return gen_erdos_renyi(cfg.peers, cfg.effective_edge_prob(), seed);
        case Topology::Kind::barabasi_albert:
            return gen_barabasi_albert(cfg.peers, cfg.m_attach, seed);
    }
    throw ConfigError("field 'topology': unsupported kind");
}

SimulatedRepetition simulate_repetition(const ExperimentConfig& cfg, int rep) {
    const std::uint64_t rep_seed = repetition_seed(cfg, rep);
    SimulatedRepetition sim;
    sim.stream = repetition_stream(cfg, rep);
    const Topology topo = repetition_topology(cfg, rep);

    const std::uint64_t hash_seed = Rng::mix_key(rep_seed, "sketch", 0);
    std::vector<PeerState>& states = sim.peers;
    states.reserve(cfg.peers);
    {
        const auto parts = partition(sim.stream, cfg.peers);
        for (std::size_t i = 0; i < cfg.peers; ++i) {
            states.push_back(init_peer(i, parts[i], cfg.depth, cfg.width, hash_seed, cfg.decay));
        }
    }

    ChurnModel churn;
    switch (cfg.churn) {
        case ChurnModel::Kind::none: churn = no_churn(); break;
        case ChurnModel::Kind::fail_stop: churn = fail_stop(cfg.fail_prob); break;
        case ChurnModel::Kind::yao: {
            Rng init = Rng::derive(rep_seed, "yao-init");
            churn = yao_init(cfg.peers, cfg.lifetime, init);
            break;
        }
    }

    const GossipParams params = cfg.gossip_params();
    SimRngs rngs = SimRngs::derive(rep_seed);
    for (int r = 1; r <= cfg.rounds; ++r) {
        sim.bytes += run_round(topo, states, params, churn, static_cast<std::uint64_t>(r), rngs).bytes;
    }
    return sim;
}

RepetitionResult run_repetition(const ExperimentConfig& cfg, int rep) {
    const SimulatedRepetition sim = simulate_repetition(cfg, rep);
    const std::vector<Arrival>& stream = sim.stream;
    const std::vector<PeerState>& states = sim.peers;
    const GossipParams params = cfg.gossip_params();

    RepetitionResult out;
    out.rep = rep;
    out.bytes = sim.bytes;
    out.valid = std::any_of(states.begin(), states.end(),
                            [](const PeerState& s) { return s.alive && s.q > 0.0; });
    if (!out.valid) return out;

    const Timestamp t{cfg.stream_length};
    const ExactAnswer exact = exact_oracle(stream, cfg.decay, t);
    for (const PeerState& s : states) {
        if (!s.alive || !s.online) continue;
        if (!(s.q > 0.0)) {
            ++out.unconverged;
            continue;
        }
        const QueryResult q = query(s, params, t, cfg.decay);
        if (q.pre_convergence) ++out.pre_convergence;
        const Score sc = score(q.items, exact, cfg.phi);
        out.records.push_back({rep, s.id, sc.recall, sc.precision, sc.are, sc.reported, s.round});
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    const auto reps = static_cast<std::size_t>(cfg.repetitions);
    std::vector<RepetitionResult> results(reps);

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
    if (threads == 1) {
        for (std::size_t r = 0; r < reps; ++r) results[r] = run_repetition(cfg, static_cast<int>(r));
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t r = next++; r < reps; r = next++) {
                        results[r] = run_repetition(cfg, static_cast<int>(r));
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    ExperimentResult out;
    out.config = cfg;
    out.hash = config_hash(cfg);
    for (RepetitionResult& r : results) {
        if (!r.valid) ++out.invalid_repetitions;
        out.unconverged += r.unconverged;
        out.pre_convergence += r.pre_convergence;
        out.bytes += r.bytes;
        out.records.insert(out.records.end(), r.records.begin(), r.records.end());
    }
    return out;
}

std::string csv_header() {
    return "config_hash,rep,peer,recall,precision,are,reported,rounds,churn_kind,topology\n";
}

void write_csv_rows(std::ostream& out, const ExperimentResult& result) {
    const std::string churn = to_string(result.config.churn);
    const std::string topo = to_string(result.config.topology);
    char buf[256];
    for (const MetricsRecord& r : result.records) {
        std::snprintf(buf, sizeof buf, "%s,%d,%zu,%.12g,%.12g,%.12g,%zu,%" PRIu64 ",%s,%s\n",
                      result.hash.c_str(), r.rep, r.peer, r.recall, r.precision, r.are, r.reported,
                      r.rounds, churn.c_str(), topo.c_str());
        out << buf;
    }
}

std::string summary_header() {
    return "config_hash,metric,mean,ci95_half_width,peers,invalid_reps,unconverged_peers\n";
}

void write_summary_rows(std::ostream& out, const ExperimentResult& result) {
    if (!result.has_summary()) return;
    const Aggregate agg = result.summary();
    const std::pair<const char*, MetricSummary> rows[] = {
        {"recall", agg.recall}, {"precision", agg.precision}, {"are", agg.are}};
    char buf[256];
    for (const auto& [name, m] : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.12g,%.12g,%zu,%d,%zu\n", result.hash.c_str(), name,
                      m.mean, m.ci95_half_width, agg.peers, result.invalid_repetitions,
                      result.unconverged);
        out << buf;
    }
}

}  // namespace tfhh
