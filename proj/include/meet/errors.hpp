#pragma once

#include <stdexcept>

namespace meet {

// std::invalid_argument and std::out_of_range cover plain argument and index
// errors. The types below name the remaining failure modes.

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidTapeError : std::logic_error {
    using std::logic_error::logic_error;
};

struct InvalidMaskError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A caller broke an operation precondition that the library relies on
// (e.g. a visit count of zero reaching a 1/N term).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Empty sum tree, empty replay buffer, empty record set.
struct EmptyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EpisodeFinishedError : std::logic_error {
    using std::logic_error::logic_error;
};

// NaN or Inf showed up in parameters, gradients or a loss.
struct NonFiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace meet
