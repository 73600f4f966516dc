#pragma once

#include "ltc/structure.hpp"
#include "ltc/syntax.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace ltc
{

// A ground atom: a predicate tuple, or one point (tuple, value) of a
// function graph. Atoms of one function entry form a group.
struct GroundAtom
{
    std::size_t symbol;
    std::size_t tuple;
    int value = -1;      // graph atoms: element index of the output
    int group = -1;      // function entry this graph atom belongs to
    int definition = -1; // defining definition, -1 for open atoms
};

struct GroundGroup
{
    std::size_t symbol;
    std::size_t tuple;
    std::vector< int > atoms; // indexed by output element
    int definition = -1;
};

// Negation normal form nodes. Nodes 0, 1, 2 are the constants false, true
// and unknown (an undefined term).
struct GroundNode
{
    enum class Kind : std::uint8_t
    {
        False,
        True,
        Unknown,
        Lit,
        And,
        Or,
    };
    Kind kind;
    bool positive = true;
    int atom = -1;
    std::vector< int > kids;
};

struct GroundDefinition
{
    std::vector< int > atoms; // every atom of the defined symbols
    std::vector< int > body;  // parallel to atoms: disjunction of rule bodies
};

inline constexpr int ground_false = 0;
inline constexpr int ground_true = 1;
inline constexpr int ground_unknown = 2;

struct GroundTheory
{
    VocabularyPtr vocabulary;
    std::vector< GroundAtom > atoms;
    std::vector< GroundGroup > groups;
    std::vector< GroundNode > nodes;
    std::vector< int > constraints; // conjuncts that are not trivially true
    std::vector< GroundDefinition > definitions;

    int find_atom( std::size_t symbol, std::size_t tuple, int value = -1 ) const;
    std::string describe_atom( int atom, const Structure& domains ) const;
    std::string describe_node( int node, const Structure& domains ) const;

    // (symbol, tuple, value) -> atom
    std::unordered_map< std::uint64_t, int > atom_index;
    static std::uint64_t key( std::size_t symbol, std::size_t tuple, int value );
};

class Grounder;

// Grounds a theory over the domains of `context`. Symbols in `parameters`
// and defined symbols always become atoms; other symbols with known
// entries in `context` are replaced by their values.
class Grounding
{
public:
    Grounding( const Theory& theory, const Structure& context, const std::set< std::string >& parameters = {} );
    ~Grounding();
    Grounding( Grounding&& ) noexcept;
    Grounding& operator=( Grounding&& ) noexcept;

    const GroundTheory& theory() const;

    // Returns the root node of a grounded sentence without adding it.
    int ground_sentence( const FormulaPtr& sentence );
    // Adds a grounded sentence as a constraint.
    void add_constraint( const FormulaPtr& sentence );
    // Adds the constraint  cost < bound  (or cost = bound); cost must be a
    // closed term whose values are integers.
    void add_cost_constraint( const TermPtr& cost, long bound, bool equal );

private:
    std::unique_ptr< Grounder > _impl;
};

GroundTheory ground( const Theory& theory, const Structure& context, const std::set< std::string >& parameters = {} );

// Integer value of an element name; throws ltc::Error(InvalidArgument).
long element_as_integer( const std::string& element );

} // namespace ltc
