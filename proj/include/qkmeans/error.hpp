#pragma once

#include <stdexcept>
#include <string>

namespace qkm {

/// Malformed or inconsistent input data (files, schedules, shot tables).
/// Contract violations on arguments throw std::invalid_argument instead.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qkm
