#pragma once

#include <stdexcept>
#include <string>

namespace earcardio {

// Error taxonomy mirrors the CLI exit codes: config (2), data (3), training (4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace earcardio
