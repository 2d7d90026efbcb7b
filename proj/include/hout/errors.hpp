#pragma once

#include <stdexcept>
#include <string>

namespace hout {

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OrderError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// f returned NaN/Inf at some quadrature node.
struct EvaluationError : std::runtime_error {
    EvaluationError(const std::string& msg, long node) : std::runtime_error(msg), node_index(node) {}
    long node_index;
};

}  // namespace hout
