#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskdiv {

enum class ErrorCode {
    InvalidArgument,
    ModelInvalid,
    EmptySupport,
    GridTooShort,
    MaxIterExceeded,
    NotBandStructured,
    PreconditionViolated,
    RegimeViolation,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct NotBandStructured : Error {
    NotBandStructured(std::size_t node, const std::string& what)
        : Error(ErrorCode::NotBandStructured, what), violating_node(node) {}
    std::size_t violating_node;
};

}  // namespace riskdiv
