#pragma once

#include "ltc/classify.hpp"
#include "ltc/syntax.hpp"

#include <map>
#include <string>

namespace ltc
{

// Static, single-state and bistate vocabularies of a linear-time vocabulary.
struct DerivedVocabularies
{
    struct Projection
    {
        std::string projected; // symbol at the current state
        std::string next;      // symbol at the next state
    };

    VocabularyPtr base;
    VocabularyPtr static_voc;
    VocabularyPtr single_state;
    VocabularyPtr bistate;
    std::map< std::string, Projection > projections; // dynamic symbol -> names

    bool is_dynamic( const std::string& symbol ) const { return projections.contains( symbol ); }
    // Dynamic symbol whose projected symbol is `name`, if any.
    const std::string* dynamic_of_projected( const std::string& name ) const;
    const std::string* dynamic_of_next( const std::string& name ) const;
};

inline constexpr std::string_view next_suffix = "_n";

DerivedVocabularies derive_vocabularies( const VocabularyPtr& vocabulary );

// Macro symbols of a fluent P: C_P (caused true), Cn_P (caused false), I_P
// (initially true).
struct FluentSymbols
{
    std::string caused, caused_not, initially;
};
FluentSymbols fluent_symbols( const std::string& predicate );

// The vocabulary with each fluent's macro symbols declared. The result keeps
// the name and the fluent list.
VocabularyPtr expand_fluent_vocabulary( const VocabularyPtr& vocabulary );

// Appends the inertia rules of every fluent of the theory's vocabulary to its
// (first) definition. The theory must be over the expanded vocabulary.
Theory expand_fluent_macro( const Theory& theory );

// Time elimination; throws Error(NotUniversal) unless the input is universal
// single-state or bistate.
FormulaPtr time_eliminate( const FormulaPtr& sentence, const DerivedVocabularies& derived );
Rule time_eliminate( const Rule& rule, const DerivedVocabularies& derived );

// phi[Succ(t)/t] for a single-state phi with Time variable t.
FormulaPtr shift_to_next( const FormulaPtr& sentence, const Variable& t );
Rule shift_to_next( const Rule& rule, const Variable& t );

struct DerivedTheories
{
    DerivedVocabularies vocabularies;
    Theory initial;    // T0 over the single-state vocabulary
    Theory transition; // Tt over the bistate vocabulary
    std::vector< Issue > warnings;
};

Theory derive_initial_theory( const LtcTheory& theory, const DerivedVocabularies& derived );
Theory derive_transition_theory( const LtcTheory& theory, const DerivedVocabularies& derived );
DerivedTheories derive_theories( const LtcTheory& theory );

// Syntactic check that a formula mentions no Time term, Init or Succ.
bool is_time_free( const FormulaPtr& f );

} // namespace ltc
