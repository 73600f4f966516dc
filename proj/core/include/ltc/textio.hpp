#pragma once

#include "ltc/structure.hpp"
#include "ltc/syntax.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ltc
{

struct StructureBlock
{
    Structure structure;
    std::string vocabulary_name; // as written in the block header
    bool state = false;          // written as `state`, over the single-state vocabulary
};

struct SourceProgram
{
    enum class BlockKind
    {
        Vocabulary,
        Theory,
        Structure,
    };
    struct BlockRef
    {
        BlockKind kind;
        std::size_t index;
        SourceSpan span;
    };

    std::vector< VocabularyPtr > vocabularies;          // as declared (fluents unexpanded)
    std::vector< VocabularyPtr > expanded_vocabularies; // parallel: fluent macro symbols added
    std::vector< Theory > theories;            // typed against the fluent-expanded vocabulary
    std::vector< StructureBlock > structures;
    std::vector< BlockRef > blocks; // this program's own blocks, in source order

    const VocabularyPtr* find_vocabulary( std::string_view name ) const;
    const Theory* find_theory( std::string_view name ) const;
    const StructureBlock* find_structure( std::string_view name ) const;

    // The vocabulary theories over `name` are typed against.
    VocabularyPtr theory_vocabulary( std::string_view name ) const;
};

struct ParseResult
{
    std::optional< SourceProgram > program;
    std::vector< Issue > diagnostics;

    bool ok() const noexcept { return diagnostics.empty(); }
};

// Parses a program. Blocks may refer to vocabularies, theories and
// structures of `context` (e.g. a goal file referring to the main program);
// the result contains only the newly parsed blocks plus the context's entries
// needed for lookup.
ParseResult parse( std::string_view text, const SourceProgram* context = nullptr );

// Throwing variant: Error carries all diagnostics.
SourceProgram parse_or_throw( std::string_view text, const SourceProgram* context = nullptr );

// Single formula or term over a vocabulary, with optional extra variables
// in scope.
FormulaPtr parse_formula( std::string_view text, const VocabularyPtr& vocabulary,
                          const std::vector< Variable >& scope = {} );
TermPtr parse_term( std::string_view text, const VocabularyPtr& vocabulary, const std::vector< Variable >& scope = {} );

std::string print( const TermPtr& t );
std::string print( const FormulaPtr& f );
std::string print( const Rule& r );
std::string print( const Vocabulary& v );
std::string print( const Theory& t );
std::string print( const Structure& s, bool as_state = false );
std::string print( const SourceProgram& p );

} // namespace ltc
