#pragma once

#include <stdexcept>
#include <string>

namespace prf {

enum class ErrorKind {
    Parse,
    Configuration,
    Infrastructure,
    Localization,
    Generation,
    PoolLoad,
    Report,
    Benchmark,
    Contract,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure the framework reports is an Error tagged with the stage that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace prf
