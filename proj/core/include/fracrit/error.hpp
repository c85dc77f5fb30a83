#pragma once

#include <stdexcept>
#include <string>

namespace fracrit {

// Runtime failure tagged with a stable, machine-readable code
// (e.g. "degenerate-field", "no-descent"). what() carries the detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace fracrit
