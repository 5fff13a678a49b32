#pragma once

#include <stdexcept>
#include <string>

namespace dvfs {

/// Contract or type-invariant violation (bad input, malformed file, bad flag).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request the model refuses to answer, e.g. a window shorter
/// than K/f_max or SMFS on a processor without a cubic power curve.
class Refusal : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace dvfs
