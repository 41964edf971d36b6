#pragma once

#include <stdexcept>
#include <string>

namespace rgs {

// Error taxonomy mirrors the CLI exit codes: usage 2, data 3, numeric 4.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rgs
