#pragma once

#include <stdexcept>
#include <string>

namespace botmut {

enum class Errc {
    MissingDomainFile,
    MalformedDocument,
    DuplicateName,
    IoFailure,
    UnknownElement,
    StaleSite,
    MalformedScript,
    BaselineRed,
    RunnerFailure,
    MissingVerdict,
    UndefinedScore,
    UnknownOperator,
};

std::string to_string(Errc code);

// Single exception type for all recoverable failures; the code tells the
// CLI which exit status to use.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(to_string(code) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace botmut
