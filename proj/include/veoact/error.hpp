#pragma once

#include <stdexcept>
#include <string>

namespace veoact {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scene sampling could not satisfy the placement constraints.
struct PlacementInfeasibleError : Error {
    using Error::Error;
};

// The scripted planner could not complete the task within its step budget.
struct PlanInfeasibleError : Error {
    using Error::Error;
};

// Non-finite loss or gradient during training.
struct TrainingDivergedError : Error {
    using Error::Error;
};

// Vector width does not match the model or layout.
struct DimensionError : Error {
    using Error::Error;
};

// Scene holds more objects than the observation layout has slots for.
struct CapacityError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, long line) : Error(what), line_number(line) {}
    long line_number;
};

struct VersionMismatchError : Error {
    using Error::Error;
};

}  // namespace veoact
