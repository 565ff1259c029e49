#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfhh/churn.hpp"
#include "tfhh/decay.hpp"
#include "tfhh/errors.hpp"
#include "tfhh/gossip.hpp"
#include "tfhh/metrics.hpp"
#include "tfhh/topology.hpp"

namespace tfhh {

// Full parameterisation of one experiment. Serialised as a flat JSON object
// whose keys match the field names below.
struct ExperimentConfig {
    std::uint64_t stream_length = 1'000'000;
    std::uint32_t universe = 100'000;
    double skew = 1.2;
    std::size_t peers = 100;

    Topology::Kind topology = Topology::Kind::erdos_renyi;
    int m_attach = 3;
    double edge_prob = 0.0;  // 0 selects 2 ln(p) / p

    std::size_t depth = 4;
    std::size_t width = 600;
    int rounds = 24;
    int fan_out = 1;
    double phi = 0.02;
    double p_star = 100.0;
    double delta_g = 0.05;

    DecaySpec decay = DecaySpec{DecaySpec::Kind::polynomial, 2.0, Timestamp{0}};

    ChurnModel::Kind churn = ChurnModel::Kind::none;
    double fail_prob = 0.0;
    ChurnModel::Lifetime lifetime = ChurnModel::Lifetime::pareto;

    int repetitions = 10;
    std::uint64_t master_seed = 42;
    std::string output = "results.csv";

    // Desk-scale profile: p=100, n=10^6, m=10^5, w=600, d=4, R=24, fo=1.
    static ExperimentConfig desk();
    // Full-scale profile: p=5000, n=10^8, w=2500.
    static ExperimentConfig full();

    double effective_edge_prob() const;
    GossipParams gossip_params() const;

    // Throws ConfigError naming the offending field.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Missing keys keep the values of `base`; unknown keys and bad values throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  const ExperimentConfig& base = ExperimentConfig::desk());
std::string render(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& text,
                              const ExperimentConfig& base = ExperimentConfig::desk());

// 16 hex digits of FNV-1a over the rendered parameters (output path excluded).
std::string config_hash(const ExperimentConfig& cfg);

// Sets one leaf field from "key=value" text; the value is read as JSON when
// it parses, as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// A config document may carry {"sweep": {"field": "skew", "values": [...]}};
// the result is one config per value (or just the base config).
std::vector<ExperimentConfig> expand_sweep(const nlohmann::json& doc,
                                           const ExperimentConfig& base = ExperimentConfig::desk());

struct RepetitionResult {
    int rep = 0;
    std::vector<MetricsRecord> records;
    bool valid = true;               // false when the initiator's q-mass was lost
    std::size_t unconverged = 0;     // queried peers still holding q = 0
    std::size_t pre_convergence = 0; // peers queried with eps* clamped below 1
    std::uint64_t bytes = 0;         // gossip payload bytes over all rounds
};

// Inputs of one repetition, derived from (master_seed, rep).
std::uint64_t repetition_seed(const ExperimentConfig& cfg, int rep);
std::vector<Arrival> repetition_stream(const ExperimentConfig& cfg, int rep);
Topology repetition_topology(const ExperimentConfig& cfg, int rep);

// Peer states after the configured rounds, before any query.
struct SimulatedRepetition {
    std::vector<Arrival> stream;
    std::vector<PeerState> peers;
    std::uint64_t bytes = 0;
};

SimulatedRepetition simulate_repetition(const ExperimentConfig& cfg, int rep);
RepetitionResult run_repetition(const ExperimentConfig& cfg, int rep);

struct ExperimentResult {
    ExperimentConfig config;
    std::string hash;
    std::vector<MetricsRecord> records;  // ordered by (rep, peer)
    int invalid_repetitions = 0;
    std::size_t unconverged = 0;
    std::size_t pre_convergence = 0;
    std::uint64_t bytes = 0;

    bool has_summary() const { return !records.empty(); }
    Aggregate summary() const { return aggregate(records); }
};

// Runs every repetition (threads > 1 runs repetitions concurrently; output
// does not depend on the thread count).
ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

// CSV columns, in order:
// config_hash,rep,peer,recall,precision,are,reported,rounds,churn_kind,topology
std::string csv_header();
void write_csv_rows(std::ostream& out, const ExperimentResult& result);

// config_hash,metric,mean,ci95_half_width,peers,invalid_reps,unconverged_peers
std::string summary_header();
void write_summary_rows(std::ostream& out, const ExperimentResult& result);

}  // namespace tfhh
