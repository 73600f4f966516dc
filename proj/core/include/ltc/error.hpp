#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltc
{

enum class ErrorCode
{
    // vocabulary validation
    MultipleTimeArgs,
    TimeValuedOutput,
    NoTimeSort,
    // LTC checks
    NonLtcSentence,
    FutureReference,
    // transform
    NameCollision,
    NotUniversal,
    // semantics
    StaticMismatch,
    UnknownElement,
    // solving
    UnboundedSort,
    Unsat,
    Budget,
    Cancelled,
    // inference
    HookFailure,
    // text input
    Lexical,
    Syntax,
    Scope,
    Type,
    // anything else a caller passed in wrongly
    InvalidArgument,
};

std::string_view to_string( ErrorCode code ) noexcept;

struct SourceSpan
{
    std::size_t line = 0; // 1-based, 0 when unknown
    std::size_t column = 0;
};

struct Issue
{
    ErrorCode code;
    std::string message;
    SourceSpan span{};
};

std::string format_issue( const Issue& issue );

class Error : public std::runtime_error
{
    ErrorCode _code;
    std::vector< Issue > _issues;

public:
    Error( ErrorCode code, const std::string& message );
    Error( std::vector< Issue > issues );

    ErrorCode code() const noexcept { return _code; }
    const std::vector< Issue >& issues() const noexcept { return _issues; }
};

} // namespace ltc
