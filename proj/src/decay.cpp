#include "tfhh/decay.hpp"

#include <cmath>
#include <stdexcept>

namespace tfhh {

DecaySpec DecaySpec::polynomial(double degree, Timestamp landmark) {
    DecaySpec d{Kind::polynomial, degree, landmark};
    d.validate();
    return d;
}

DecaySpec DecaySpec::exponential(double rate, Timestamp landmark) {
    DecaySpec d{Kind::exponential, rate, landmark};
    d.validate();
    return d;
}

void DecaySpec::validate() const {
    if (!(parameter > 0.0) || !std::isfinite(parameter)) {
        throw std::invalid_argument("decay parameter must be positive and finite");
    }
}

std::string to_string(DecaySpec::Kind kind) {
    return kind == DecaySpec::Kind::polynomial ? "polynomial" : "exponential";
}

DecaySpec::Kind decay_kind_from_string(const std::string& name) {
    if (name == "polynomial") return DecaySpec::Kind::polynomial;
    if (name == "exponential") return DecaySpec::Kind::exponential;
    throw std::invalid_argument("unknown decay kind '" + name + "'");
}

double weight(Timestamp ts, const DecaySpec& decay) {
    if (ts.tick <= decay.landmark.tick) {
        throw std::invalid_argument("timestamp must be later than the decay landmark");
    }
    const auto age = static_cast<double>(ts.tick - decay.landmark.tick);
    switch (decay.kind) {
        case DecaySpec::Kind::polynomial:
            if (decay.parameter == 1.0) return age;
            if (decay.parameter == 2.0) return age * age;
            return std::pow(age, decay.parameter);
        case DecaySpec::Kind::exponential:
            return std::exp(decay.parameter * age);
    }
    return 0.0;
}

double normalized_weight(Timestamp ts, Timestamp t, const DecaySpec& decay) {
    return weight(ts, decay) / weight(t, decay);
}

}  // namespace tfhh
