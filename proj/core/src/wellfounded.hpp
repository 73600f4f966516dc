#pragma once

#include "ltc/ground.hpp"

#include <vector>

namespace ltc::detail
{

TruthValue eval_node( const GroundTheory& g, int node, const std::vector< TruthValue >& vals );

// Three-valued well-founded evaluation of the definitions of a ground
// theory. Definitions are processed in dependency order; definitions that
// depend on each other cyclically are "guessed": their atoms are read as
// inputs, and their recomputed values go to a separate vector to be
// compared by the caller.
class WellFounded
{
public:
    explicit WellFounded( const GroundTheory& g );

    // Reads open atoms (and guessed atoms) from vals. Writes the values of
    // non-guessed defined atoms into vals and recomputed guessed atoms into
    // `guessed`, which must have one entry per atom.
    void compute( std::vector< TruthValue >& vals, std::vector< TruthValue >& guessed ) const;

    bool is_guessed_definition( int def ) const { return def >= 0 && _guessed[ static_cast< std::size_t >( def ) ]; }
    bool is_computed( int atom ) const;

private:
    struct Component
    {
        std::vector< int > atoms;
        std::vector< int > bodies;
        bool recursive = false;
    };
    struct Plan
    {
        int definition;
        std::vector< Component > components;
    };

    const GroundTheory& _g;
    std::vector< char > _guessed;
    std::vector< Plan > _plans;
    mutable std::vector< char > _in_scc, _x, _y;

    bool eval2( int node, const std::vector< TruthValue >& vals, bool upper ) const;
    void solve_component( const Component& c, const std::vector< TruthValue >& vals,
                          std::vector< TruthValue >& out ) const;
};

} // namespace ltc::detail
