#pragma once

#include "ltc/structure.hpp"
#include "ltc/syntax.hpp"
#include "ltc/transform.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ltc
{

// Free variables are bound by name to element names.
using Assignment = std::map< std::string, std::string >;

// Kleene valuation on a partial structure. A term whose value is unknown,
// or a Succ past the last time point, makes the enclosing atom Unknown.
// Quantified Time variables range over 0..n-d, where d is the deepest Succ
// nesting around the variable in the quantifier's scope.
TruthValue kleene_eval( const FormulaPtr& f, const Structure& s, const Assignment& assignment = {} );

// Element name of a term's value, or nullopt when unknown.
std::optional< std::string > eval_term( const TermPtr& t, const Structure& s, const Assignment& assignment = {} );

// Copy of s whose defined symbols hold their three-valued well-founded
// values, computed from the values of the open symbols in s.
Structure well_founded_values( const Definition& d, const Structure& s );

// Kleene value of a definition: on a structure that is two-valued for all
// symbols involved, t iff the defined symbols equal the well-founded model;
// otherwise f when a known defined entry contradicts a known well-founded
// value, and u when none does.
TruthValue eval_definition( const Definition& d, const Structure& s );

TruthValue eval_theory( const Theory& t, const Structure& s );
bool satisfies( const Structure& s, const Theory& t );

// --- state projections

// k-projection onto the single-state vocabulary: statics as in I, each
// projected symbol as its dynamic symbol at time k.
Structure project_state( const Structure& I, int k, const DerivedVocabularies& v );
// Bistate projection: current symbols at k, next symbols at k+1.
Structure project_bistate( const Structure& I, int k, const DerivedVocabularies& v );
// Bistate structure from two states; throws Error(StaticMismatch) unless
// they agree on domains and static symbols.
Structure pair_states( const Structure& current, const Structure& next, const DerivedVocabularies& v );
// The current / next half of a bistate structure, as a state.
Structure current_state( const Structure& bistate, const DerivedVocabularies& v );
Structure next_state( const Structure& bistate, const DerivedVocabularies& v );

// Whether two states agree on domains and static symbols.
bool same_statics( const Structure& a, const Structure& b, const DerivedVocabularies& v );

// Same-named sorts and symbols copied into a structure over `voc`.
Structure rebase( const Structure& s, const VocabularyPtr& voc );

// A finite sequence of states.
struct Chain
{
    std::vector< Structure > states;

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    const Structure& back() const { return states.back(); }
};

// Structure over the linear-time vocabulary with Time = {0..k+lookahead},
// where k+1 is the chain length: levels 0..k hold the states, later levels
// are unknown. Throws Error(StaticMismatch) if states disagree on statics.
Structure chain_as_structure( const Chain& chain, const DerivedVocabularies& v, int lookahead = 0 );

// The states of a structure with a bounded Time domain.
Chain chain_of( const Structure& I, const DerivedVocabularies& v );

} // namespace ltc
