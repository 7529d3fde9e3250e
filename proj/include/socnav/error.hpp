#pragma once

#include <stdexcept>
#include <string>

namespace socnav {

// Error categories map onto the CLI exit-code contract:
// 1 usage, 2 data, 3 run failure.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunError : std::runtime_error {
    explicit RunError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace socnav
