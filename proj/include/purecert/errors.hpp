#pragma once

#include <stdexcept>
#include <string>

namespace purecert {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedKind : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMarginal : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateSigma : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooFewSamples : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoOtherLabels : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroMass : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CenterOutside : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidCounts : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace purecert
