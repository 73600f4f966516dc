#include "ltc/error.hpp"

#include <sstream>

namespace ltc
{

std::string_view to_string( ErrorCode code ) noexcept
{
    switch ( code )
    {
    case ErrorCode::MultipleTimeArgs: return "MultipleTimeArgs";
    case ErrorCode::TimeValuedOutput: return "TimeValuedOutput";
    case ErrorCode::NoTimeSort: return "NoTimeSort";
    case ErrorCode::NonLtcSentence: return "NonLtcSentence";
    case ErrorCode::FutureReference: return "FutureReference";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::NotUniversal: return "NotUniversal";
    case ErrorCode::StaticMismatch: return "StaticMismatch";
    case ErrorCode::UnknownElement: return "UnknownElement";
    case ErrorCode::UnboundedSort: return "UnboundedSort";
    case ErrorCode::Unsat: return "Unsat";
    case ErrorCode::Budget: return "Budget";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::HookFailure: return "HookFailure";
    case ErrorCode::Lexical: return "LexicalError";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Scope: return "ScopeError";
    case ErrorCode::Type: return "TypeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

std::string format_issue( const Issue& issue )
{
    std::ostringstream out;
    if ( issue.span.line > 0 )
        out << issue.span.line << ":" << issue.span.column << ": ";
    out << to_string( issue.code ) << ": " << issue.message;
    return out.str();
}

namespace
{

std::string join_issues( const std::vector< Issue >& issues )
{
    std::string text;
    for ( const auto& issue : issues )
    {
        if ( !text.empty() )
            text += "\n";
        text += format_issue( issue );
    }
    return text;
}

} // namespace

Error::Error( ErrorCode code, const std::string& message )
    : std::runtime_error( std::string( to_string( code ) ) + ": " + message ), _code( code ),
      _issues{ Issue{ code, message, {} } }
{
}

Error::Error( std::vector< Issue > issues )
    : std::runtime_error( join_issues( issues ) ),
      _code( issues.empty() ? ErrorCode::InvalidArgument : issues.front().code ), _issues( std::move( issues ) )
{
}

} // namespace ltc
