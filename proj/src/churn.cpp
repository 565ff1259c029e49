#include "tfhh/churn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tfhh {

double ParetoII::cdf(double x) const { return 1.0 - survival(x); }

double ParetoII::survival(double x) const {
    if (x <= mu) return 1.0;
    return std::pow(1.0 + (x - mu) / beta, -alpha);
}

double ParetoII::sample(double u) const { return mu + beta * (std::pow(1.0 - u, -1.0 / alpha) - 1.0); }

double ParetoII::mean() const {
    if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
    return mu + beta / (alpha - 1.0);
}

double sample_pareto2(double mu, double beta, double alpha, double u) {
    if (!(beta > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("pareto2 needs beta, alpha > 0");
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("pareto2 needs u in [0, 1)");
    return ParetoII{mu, beta, alpha}.sample(u);
}

double ChurnModel::draw_online(std::size_t peer, Rng& rng) const {
    const double l = mean_lifetime[peer];
    if (lifetime == Lifetime::exponential) return -l * std::log(1.0 - rng.uniform01());
    return ParetoII{yao::kDurationShift, yao::kLifetimeBeta, 2.0 * l}.sample(rng.uniform01());
}

ParetoII ChurnModel::offline_distribution(std::size_t peer) const {
    return ParetoII{yao::kDurationShift, yao::kOfflineBeta, 2.0 * mean_offline[peer]};
}

double ChurnModel::draw_offline(std::size_t peer, Rng& rng) const {
    return offline_distribution(peer).sample(rng.uniform01());
}

double ChurnModel::online_mean(std::size_t peer) const {
    const double l = mean_lifetime[peer];
    if (lifetime == Lifetime::exponential) return l;
    return ParetoII{yao::kDurationShift, yao::kLifetimeBeta, 2.0 * l}.mean();
}

double ChurnModel::offline_mean(std::size_t peer) const { return offline_distribution(peer).mean(); }

std::string to_string(ChurnModel::Kind kind) {
    switch (kind) {
        case ChurnModel::Kind::none: return "none";
        case ChurnModel::Kind::fail_stop: return "fail_stop";
        case ChurnModel::Kind::yao: return "yao";
    }
    return "unknown";
}

ChurnModel::Kind churn_kind_from_string(const std::string& name) {
    if (name == "none") return ChurnModel::Kind::none;
    if (name == "fail_stop") return ChurnModel::Kind::fail_stop;
    if (name == "yao") return ChurnModel::Kind::yao;
    throw std::invalid_argument("unknown churn kind '" + name + "'");
}

std::string to_string(ChurnModel::Lifetime kind) {
    return kind == ChurnModel::Lifetime::pareto ? "pareto" : "exponential";
}

ChurnModel::Lifetime lifetime_from_string(const std::string& name) {
    if (name == "pareto") return ChurnModel::Lifetime::pareto;
    if (name == "exponential") return ChurnModel::Lifetime::exponential;
    throw std::invalid_argument("unknown lifetime kind '" + name + "'");
}

ChurnModel no_churn() { return ChurnModel{}; }

ChurnModel fail_stop(double fail_prob) {
    if (!(fail_prob >= 0.0 && fail_prob <= 1.0)) {
        throw std::invalid_argument("fail_prob must lie in [0, 1]");
    }
    ChurnModel c;
    c.kind = ChurnModel::Kind::fail_stop;
    c.fail_prob = fail_prob;
    return c;
}

std::uint64_t duration_rounds(double x) {
    if (!(x > 1.0)) return 1;
    return static_cast<std::uint64_t>(std::ceil(x));
}

ChurnModel yao_init(std::size_t p, ChurnModel::Lifetime lifetime, Rng& rng) {
    ChurnModel c;
    c.kind = ChurnModel::Kind::yao;
    c.lifetime = lifetime;
    c.mean_lifetime.resize(p);
    c.mean_offline.resize(p);
    c.next_transition.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        c.mean_lifetime[i] = yao::kMeanLifetime.sample(rng.uniform01());
        c.mean_offline[i] = yao::kMeanOffline.sample(rng.uniform01());
    }
    for (std::size_t i = 0; i < p; ++i) {
        c.next_transition[i] = duration_rounds(c.draw_online(i, rng));
    }
    return c;
}

void fail_stop_step(const ChurnModel& churn, std::span<PeerState> states, Rng& rng) {
    for (PeerState& s : states) {
        if (s.alive && rng.bernoulli(churn.fail_prob)) {
            s.alive = false;
            s.online = false;
        }
    }
}

void yao_step(ChurnModel& churn, std::span<PeerState> states, std::uint64_t tick, Rng& rng) {
    for (std::size_t i = 0; i < states.size(); ++i) {
        PeerState& s = states[i];
        if (!s.alive || churn.next_transition[i] > tick) continue;
        s.online = !s.online;
        const double next = s.online ? churn.draw_online(i, rng) : churn.draw_offline(i, rng);
        churn.next_transition[i] = tick + duration_rounds(next);
    }
}

void churn_step(ChurnModel& churn, std::span<PeerState> states, std::uint64_t tick, Rng& rng) {
    switch (churn.kind) {
        case ChurnModel::Kind::none: return;
        case ChurnModel::Kind::fail_stop: fail_stop_step(churn, states, rng); return;
        case ChurnModel::Kind::yao: yao_step(churn, states, tick, rng); return;
    }
}

}  // namespace tfhh
