#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfhh/gossip.hpp"
#include "tfhh/rng.hpp"

namespace tfhh {

// Pareto type II (shifted Pareto): F(x) = 1 - (1 + (x - mu) / beta)^(-alpha), x >= mu.
struct ParetoII {
    double mu = 0.0;
    double beta = 1.0;
    double alpha = 1.0;

    double cdf(double x) const;
    // P(X > x).
    double survival(double x) const;
    // Inverse CDF at u in [0, 1).
    double sample(double u) const;
    // mu + beta / (alpha - 1); infinite for alpha <= 1.
    double mean() const;
};

double sample_pareto2(double mu, double beta, double alpha, double u);

// Per-peer Yao churn constants.
namespace yao {
inline constexpr ParetoII kMeanLifetime{1.01, 1.0, 3.0};  // l_i
inline constexpr ParetoII kMeanOffline{1.01, 2.0, 3.0};   // d_i
inline constexpr double kDurationShift = 1.01;
inline constexpr double kLifetimeBeta = 2.0;
inline constexpr double kOfflineBeta = 3.0;
}  // namespace yao

struct ChurnModel {
    enum class Kind { none, fail_stop, yao };
    enum class Lifetime { pareto, exponential };

    Kind kind = Kind::none;
    double fail_prob = 0.0;
    Lifetime lifetime = Lifetime::pareto;

    // Yao per-peer state.
    std::vector<double> mean_lifetime;  // l_i
    std::vector<double> mean_offline;   // d_i
    std::vector<std::uint64_t> next_transition;

    // F_i: ParetoII(1.01, 2, 2 l_i) or Exponential(1 / l_i).
    double draw_online(std::size_t peer, Rng& rng) const;
    // G_i: ParetoII(1.01, 3, 2 d_i).
    double draw_offline(std::size_t peer, Rng& rng) const;
    double online_mean(std::size_t peer) const;
    double offline_mean(std::size_t peer) const;
    ParetoII offline_distribution(std::size_t peer) const;
};

std::string to_string(ChurnModel::Kind kind);
ChurnModel::Kind churn_kind_from_string(const std::string& name);
std::string to_string(ChurnModel::Lifetime kind);
ChurnModel::Lifetime lifetime_from_string(const std::string& name);

ChurnModel no_churn();
ChurnModel fail_stop(double fail_prob);

// Continuous duration to whole rounds: max(1, ceil(x)).
std::uint64_t duration_rounds(double x);

// Draws l_i, d_i for p peers; every peer starts online with its first
// offline transition scheduled from tick 0.
ChurnModel yao_init(std::size_t p, ChurnModel::Lifetime lifetime, Rng& rng);

// Each alive peer fails for good with probability fail_prob.
void fail_stop_step(const ChurnModel& churn, std::span<PeerState> states, Rng& rng);

// Peers whose transition tick has arrived flip online/offline and schedule
// the next flip. Offline peers keep their state.
void yao_step(ChurnModel& churn, std::span<PeerState> states, std::uint64_t tick, Rng& rng);

// Dispatch on churn.kind.
void churn_step(ChurnModel& churn, std::span<PeerState> states, std::uint64_t tick, Rng& rng);

}  // namespace tfhh
