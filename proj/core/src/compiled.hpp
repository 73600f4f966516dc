#pragma once

#include "ltc/structure.hpp"
#include "ltc/syntax.hpp"

#include <cstdint>
#include <vector>

namespace ltc::detail
{

// Formulas with names resolved against a vocabulary and a structure's
// domains. Variables live in numbered slots of an environment vector.
struct CTerm
{
    enum class Kind : std::uint8_t
    {
        Var,
        Apply,
        Elem,
        Init,
        Succ,
    };
    Kind kind;
    int index = -1; // slot, symbol or element
    std::vector< CTerm > args;
};

struct QVar
{
    int slot;
    int sort;
    int range; // number of values the variable takes
};

struct CFormula
{
    enum class Kind : std::uint8_t
    {
        True,
        False,
        Atom,
        Eq,
        Not,
        And,
        Or,
        Implies,
        Iff,
        Forall,
        Exists,
    };
    Kind kind;
    int symbol = -1;
    std::vector< CTerm > terms;
    std::vector< CFormula > kids;
    std::vector< QVar > vars;
};

struct CRule
{
    std::vector< QVar > vars;
    CFormula head; // Atom, or Eq with an Apply on the left
    CFormula body;
    int symbol = -1;
};

class Compiler
{
public:
    // Element literals and variable ranges are resolved against `domains`;
    // throws Error(UnboundedSort) when a needed sort has no domain.
    Compiler( const Vocabulary& voc, const Structure& domains ) : _voc( voc ), _domains( domains ) {}

    // Binds free variables (in order) to the first slots.
    CFormula formula( const FormulaPtr& f, const std::vector< Variable >& free = {} );
    CTerm term( const TermPtr& t, const std::vector< Variable >& free = {} );
    CRule rule( const Rule& r );

    int slots() const { return _max_slots; }

private:
    const Vocabulary& _voc;
    const Structure& _domains;
    std::vector< std::pair< std::string, int > > _scope;
    int _max_slots = 0;

    int bind( const Variable& v );
    QVar quantified( const Variable& v, int depth );
    void unbind( std::size_t n ) { _scope.resize( _scope.size() - n ); }
    int sort_index( const std::string& sort ) const;
    CTerm compile( const TermPtr& t );
    CFormula compile( const FormulaPtr& f );
};

// Maximum number of Succ applications around variable `name` within f.
int succ_depth( const FormulaPtr& f, const std::string& name );
int succ_depth( const TermPtr& t, const std::string& name );

// Value of a term under an environment: element index, or -1 when undefined
// or unknown.
int eval_term( const CTerm& t, const Structure& s, std::vector< int >& env );

// Kleene valuation directly on the (partial) structure.
TruthValue eval_formula( const CFormula& f, const Structure& s, std::vector< int >& env );

// Iterates all assignments of a quantifier block; fn returns false to stop.
template < typename Fn >
void for_each_assignment( const std::vector< QVar >& vars, std::vector< int >& env, Fn&& fn )
{
    for ( const auto& v : vars )
        if ( v.range <= 0 )
            return;
    for ( const auto& v : vars )
        env[ static_cast< std::size_t >( v.slot ) ] = 0;
    while ( true )
    {
        if ( !fn() )
            return;
        std::size_t i = vars.size();
        while ( i > 0 )
        {
            auto& slot = env[ static_cast< std::size_t >( vars[ i - 1 ].slot ) ];
            if ( ++slot < vars[ i - 1 ].range )
                break;
            slot = 0;
            --i;
        }
        if ( i == 0 )
            return;
    }
}

} // namespace ltc::detail
