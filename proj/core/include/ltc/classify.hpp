#pragma once

#include "ltc/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ltc
{

enum class SentenceKind
{
    Static,
    Initial,
    UniversalSingleState,
    UniversalBistate,
    Other,
};

std::string_view to_string( SentenceKind kind ) noexcept;

struct SentenceClass
{
    SentenceKind kind = SentenceKind::Other;
    std::string reason;                   // why a sentence is Other
    std::optional< Variable > time_var;   // the universally quantified Time variable

    bool is_universal() const
    {
        return kind == SentenceKind::UniversalSingleState || kind == SentenceKind::UniversalBistate;
    }
};

SentenceClass classify( const FormulaPtr& sentence );
SentenceClass classify( const Rule& rule );

// A theory accepted by check_ltc_theory, with the classification of every
// sentence and rule (definitions keep their order).
struct LtcTheory
{
    Theory theory;
    std::vector< SentenceClass > sentence_classes;
    std::vector< std::vector< SentenceClass > > rule_classes;
};

struct LtcCheck
{
    std::optional< LtcTheory > theory;
    std::vector< Issue > errors;
    std::vector< Issue > warnings;

    bool ok() const noexcept { return errors.empty(); }
};

// Accepts iff all sentences and rules are static, initial, universal
// single-state or universal bistate, and no rule defines an atom from a
// strictly later time point.
LtcCheck check_ltc_theory( const Theory& theory );

// Convenience: throws ltc::Error carrying all issues on rejection.
LtcTheory require_ltc_theory( const Theory& theory );

} // namespace ltc
