#pragma once

#include <stdexcept>

namespace tfhh {

// Invalid or unsatisfiable experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tfhh
