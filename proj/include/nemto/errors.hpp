#pragma once

#include <stdexcept>
#include <string>

namespace nemto {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedHeader : IoError {
    using IoError::IoError;
};

struct UnexpectedEof : IoError {
    using IoError::IoError;
};

struct NonPositiveDimensions : IoError {
    using IoError::IoError;
};

struct EmptyLevelSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateGradient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDirection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoExit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckpointMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nemto
