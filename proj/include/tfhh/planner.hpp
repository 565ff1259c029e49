#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

// Closed-form choice of sketch depth, width and gossip rounds for a target
// support threshold phi, false-positive tolerance eps and failure probability
// delta. All logarithms are natural.
namespace tfhh::planner {

// The plan asks for fewer rounds than the tolerance allows at any width.
struct RoundsInsufficientError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DegeneratePlanError : std::domain_error {
    using std::domain_error::domain_error;
};

struct PlanInput {
    double phi = 0.02;
    double eps = 0.01;
    double delta_g = 0.01;
    double delta = 0.02;
    double p_star = 5000.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct Plan {
    std::int64_t depth = 0;
    std::int64_t width = 0;
    std::int64_t rounds = 0;
    double eps_star = 0.0;             // gossip error factor after `rounds`
    double predicted_tolerance = 0.0;  // false-positive tolerance of (width, eps_star)
};

enum class Strategy { time_dominant, space_dominant };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

// Averaging convergence factor for permutation pair selection, 1 / (2 sqrt(e)).
double gamma();

// p* sqrt(gamma^R / delta_g).
double eps_star_at(double p_star, double delta_g, std::int64_t rounds);

// e (1 - eps*^2) / (2 eps (1 + eps*)^2 - 8 phi eps*), ceiled. Throws
// RoundsInsufficientError when the denominator is not positive.
std::int64_t w_given_eps_star(double phi, double eps, double eps_star);
std::int64_t w_given_R(const PlanInput& in, std::int64_t rounds);

// Smallest R for which some finite width reaches the tolerance.
std::int64_t r_min(const PlanInput& in);

// floor(e / (2 eps)) + 1.
std::int64_t w_min(double eps);

// eps* solving the width/round relation at w = w_min(eps).
double eps_star_space_dominant(const PlanInput& in);
std::int64_t r_for_space_dominant(const PlanInput& in);

// ceil(ln((1 - delta_g) / (delta - delta_g))), at least 1.
std::int64_t d_min(double delta, double delta_g);

// 4 eps* phi / (1 + eps*)^2 + e / (2w) * (1 - eps*) / (1 + eps*).
double predicted_tolerance(std::int64_t width, double eps_star, double phi);

// delta_g + e^{-d} (1 - delta_g).
double failure_probability(std::int64_t depth, double delta_g);

Plan plan(const PlanInput& in, Strategy strategy);

}  // namespace tfhh::planner
