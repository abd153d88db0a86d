#pragma once

#include <stdexcept>
#include <string>

namespace cyclerep {

/// Violated precondition on a numeric or structural argument.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed serialized input (JSON, rational literal, CSV).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace cyclerep
