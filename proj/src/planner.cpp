#include "tfhh/planner.hpp"

#include <cmath>
#include <numbers>

namespace tfhh::planner {

namespace {
constexpr double kE = std::numbers::e;
}

void PlanInput::validate() const {
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must lie in (0, 1)");
    if (!(eps > 0.0 && eps < phi)) throw std::invalid_argument("eps must lie in (0, phi)");
    if (!(delta_g > 0.0 && delta_g < 1.0)) throw std::invalid_argument("delta_g must lie in (0, 1)");
    if (!(delta > delta_g && delta < 1.0)) throw std::invalid_argument("delta must lie in (delta_g, 1)");
    if (!(p_star >= 1.0)) throw std::invalid_argument("p_star must be >= 1");
}

std::string to_string(Strategy s) {
    return s == Strategy::time_dominant ? "time_dominant" : "space_dominant";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "time_dominant" || name == "time") return Strategy::time_dominant;
    if (name == "space_dominant" || name == "space") return Strategy::space_dominant;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

double gamma() { return 1.0 / (2.0 * std::sqrt(kE)); }

double eps_star_at(double p_star, double delta_g, std::int64_t rounds) {
    return p_star * std::sqrt(std::pow(gamma(), static_cast<double>(rounds)) / delta_g);
}

std::int64_t w_given_eps_star(double phi, double eps, double eps_star) {
    if (!(eps_star >= 0.0 && eps_star < 1.0)) {
        throw RoundsInsufficientError("eps* must lie in [0, 1); add rounds");
    }
    const double denom = 2.0 * eps * (1.0 + eps_star) * (1.0 + eps_star) - 8.0 * phi * eps_star;
    if (!(denom > 0.0)) {
        throw RoundsInsufficientError("no finite width reaches the tolerance at this eps*");
    }
    return static_cast<std::int64_t>(std::ceil(kE * (1.0 - eps_star * eps_star) / denom));
}

std::int64_t w_given_R(const PlanInput& in, std::int64_t rounds) {
    return w_given_eps_star(in.phi, in.eps, eps_star_at(in.p_star, in.delta_g, rounds));
}

std::int64_t r_min(const PlanInput& in) {
    const double root = 2.0 * in.phi - in.eps - 2.0 * std::sqrt(in.phi * in.phi - in.eps * in.phi);
    const double bound =
        (std::log(in.delta_g) + 2.0 * std::log(root / (in.eps * in.p_star))) / std::log(gamma());
    return static_cast<std::int64_t>(std::floor(bound)) + 1;
}

std::int64_t w_min(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    return static_cast<std::int64_t>(std::floor(kE / (2.0 * eps))) + 1;
}

double eps_star_space_dominant(const PlanInput& in) {
    const auto w = static_cast<double>(w_min(in.eps));
    const double phi = in.phi;
    const double eps = in.eps;
    // Quadratic root in rationalised form.
    return std::fma(2.0 * w, eps, -kE) /
           (2.0 * w * (2.0 * phi - eps) + std::sqrt(16.0 * phi * w * w * (phi - eps) + kE * kE));
}

std::int64_t r_for_space_dominant(const PlanInput& in) {
    const double es = eps_star_space_dominant(in);
    if (!(es > 0.0)) throw DegeneratePlanError("space-dominant eps* is not positive");
    const double r =
        (2.0 * std::log(es) - 2.0 * std::log(in.p_star) + std::log(in.delta_g)) / std::log(gamma());
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(r)) + 1);
}

std::int64_t d_min(double delta, double delta_g) {
    if (!(delta_g >= 0.0 && delta_g < 1.0) || !(delta > delta_g)) {
        throw std::invalid_argument("d_min requires 0 <= delta_g < delta");
    }
    const double d = std::ceil(std::log((1.0 - delta_g) / (delta - delta_g)));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(d));
}

double predicted_tolerance(std::int64_t width, double eps_star, double phi) {
    const double w = static_cast<double>(width);
    const double one_plus = 1.0 + eps_star;
    return 4.0 * eps_star * phi / (one_plus * one_plus) +
           kE / (2.0 * w) * (1.0 - eps_star) / one_plus;
}

double failure_probability(std::int64_t depth, double delta_g) {
    return delta_g + std::exp(-static_cast<double>(depth)) * (1.0 - delta_g);
}

Plan plan(const PlanInput& in, Strategy strategy) {
    in.validate();
    Plan p;
    p.depth = d_min(in.delta, in.delta_g);
    if (strategy == Strategy::time_dominant) {
        p.rounds = r_min(in);
        p.width = w_given_R(in, p.rounds);
    } else {
        p.width = w_min(in.eps);
        p.rounds = r_for_space_dominant(in);
    }
    p.eps_star = eps_star_at(in.p_star, in.delta_g, p.rounds);
    p.predicted_tolerance = predicted_tolerance(p.width, p.eps_star, in.phi);
    return p;
}

}  // namespace tfhh::planner
