// Exception types shared by all ddsim modules

#pragma once

#include <stdexcept>
#include <string>

namespace ddsim {

// Bad input: wrong shapes, violated preconditions, unusable configuration.
// The CLI maps these to exit code 1.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ModelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct AmplitudeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ScheduleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure on valid input. The CLI maps these to exit code 2.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IntegrabilityError : NumericError {
    using NumericError::NumericError;
};
struct AccuracyError : NumericError {
    using NumericError::NumericError;
};
struct EstimationError : NumericError {
    using NumericError::NumericError;
};

} // namespace ddsim
