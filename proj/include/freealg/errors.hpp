#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freealg {

struct ContextError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation left the domain of regularity (a singular inverse).
struct DomainError : std::runtime_error {
    std::string subexpression;
    DomainError(const std::string& msg, std::string sub = {})
        : std::runtime_error(msg), subexpression(std::move(sub)) {}
};

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InconclusiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace freealg
