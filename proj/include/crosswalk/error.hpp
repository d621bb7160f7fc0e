#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crosswalk {

enum class ErrorCode {
    MalformedCurie,
    UnresolvedPrefix,
    UncontractableUri,
    InvalidHeader,
    RowArity,
    Schema,
    Value,
    RuleSyntax,
    DuplicateRule,
    RangeRestriction,
    UnknownFact,
    IdCollision,
    PrefixConflict,
    Io,
    UnknownField,
    Validation,
    NotFound,
    ContractViolation,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI, the HTTP layer) can map it onto exit codes and statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace crosswalk
