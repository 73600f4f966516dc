#include "wellfounded.hpp"

#include <algorithm>
#include <functional>

namespace ltc::detail
{

namespace
{

// Iterative Tarjan. Components come out dependencies first.
std::vector< std::vector< int > > strongly_connected( int n, const std::vector< std::vector< int > >& succ )
{
    std::vector< int > index( static_cast< std::size_t >( n ), -1 ), low( static_cast< std::size_t >( n ), 0 );
    std::vector< char > on_stack( static_cast< std::size_t >( n ), 0 );
    std::vector< int > stack;
    std::vector< std::vector< int > > out;
    int counter = 0;
    std::vector< std::pair< int, std::size_t > > work;
    for ( int root = 0; root < n; ++root )
    {
        if ( index[ static_cast< std::size_t >( root ) ] >= 0 )
            continue;
        work.emplace_back( root, 0 );
        while ( !work.empty() )
        {
            auto& [ v, next ] = work.back();
            const auto vs = static_cast< std::size_t >( v );
            if ( next == 0 && index[ vs ] < 0 )
            {
                index[ vs ] = low[ vs ] = counter++;
                stack.push_back( v );
                on_stack[ vs ] = 1;
            }
            if ( next < succ[ vs ].size() )
            {
                const int w = succ[ vs ][ next++ ];
                const auto ws = static_cast< std::size_t >( w );
                if ( index[ ws ] < 0 )
                    work.emplace_back( w, 0 );
                else if ( on_stack[ ws ] )
                    low[ vs ] = std::min( low[ vs ], index[ ws ] );
                continue;
            }
            if ( low[ vs ] == index[ vs ] )
            {
                std::vector< int > comp;
                int w;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[ static_cast< std::size_t >( w ) ] = 0;
                    comp.push_back( w );
                } while ( w != v );
                std::reverse( comp.begin(), comp.end() );
                out.push_back( std::move( comp ) );
            }
            const int done = v;
            work.pop_back();
            if ( !work.empty() )
            {
                const auto ps = static_cast< std::size_t >( work.back().first );
                low[ ps ] = std::min( low[ ps ], low[ static_cast< std::size_t >( done ) ] );
            }
        }
    }
    return out;
}

void collect_atoms( const GroundTheory& g, int node, std::vector< int >& seen, int stamp,
                    const std::function< void( int ) >& fn )
{
    std::vector< int > todo{ node };
    while ( !todo.empty() )
    {
        const int k = todo.back();
        todo.pop_back();
        if ( seen[ static_cast< std::size_t >( k ) ] == stamp )
            continue;
        seen[ static_cast< std::size_t >( k ) ] = stamp;
        const auto& n = g.nodes[ static_cast< std::size_t >( k ) ];
        if ( n.kind == GroundNode::Kind::Lit )
            fn( n.atom );
        for ( int c : n.kids )
            todo.push_back( c );
    }
}

} // namespace

TruthValue eval_node( const GroundTheory& g, int node, const std::vector< TruthValue >& vals )
{
    const auto& n = g.nodes[ static_cast< std::size_t >( node ) ];
    switch ( n.kind )
    {
    case GroundNode::Kind::False: return TruthValue::False;
    case GroundNode::Kind::True: return TruthValue::True;
    case GroundNode::Kind::Unknown: return TruthValue::Unknown;
    case GroundNode::Kind::Lit:
    {
        const auto v = vals[ static_cast< std::size_t >( n.atom ) ];
        return n.positive ? v : inverse( v );
    }
    case GroundNode::Kind::And:
    {
        auto v = TruthValue::True;
        for ( int k : n.kids )
            if ( ( v = meet( v, eval_node( g, k, vals ) ) ) == TruthValue::False )
                break;
        return v;
    }
    case GroundNode::Kind::Or:
    {
        auto v = TruthValue::False;
        for ( int k : n.kids )
            if ( ( v = join( v, eval_node( g, k, vals ) ) ) == TruthValue::True )
                break;
        return v;
    }
    }
    return TruthValue::Unknown;
}

WellFounded::WellFounded( const GroundTheory& g ) : _g( g )
{
    const auto ndefs = static_cast< int >( g.definitions.size() );
    const auto natoms = g.atoms.size();
    _in_scc.assign( natoms, 0 );
    _x.assign( natoms, 0 );
    _y.assign( natoms, 0 );

    // definition-level dependencies
    std::vector< std::vector< int > > def_succ( static_cast< std::size_t >( ndefs ) );
    std::vector< std::vector< std::vector< int > > > atom_deps( static_cast< std::size_t >( ndefs ) );
    std::vector< int > seen( g.nodes.size(), 0 );
    int stamp = 0;
    for ( int d = 0; d < ndefs; ++d )
    {
        const auto& gd = g.definitions[ static_cast< std::size_t >( d ) ];
        auto& deps = atom_deps[ static_cast< std::size_t >( d ) ];
        deps.resize( gd.atoms.size() );
        std::vector< char > dep_on( static_cast< std::size_t >( ndefs ), 0 );
        for ( std::size_t k = 0; k < gd.atoms.size(); ++k )
        {
            collect_atoms( g, gd.body[ k ], seen, ++stamp, [ & ]( int a ) {
                const int ad = g.atoms[ static_cast< std::size_t >( a ) ].definition;
                if ( ad == d )
                    deps[ k ].push_back( a );
                else if ( ad >= 0 && !dep_on[ static_cast< std::size_t >( ad ) ] )
                {
                    dep_on[ static_cast< std::size_t >( ad ) ] = 1;
                    def_succ[ static_cast< std::size_t >( d ) ].push_back( ad );
                }
            } );
        }
    }
    _guessed.assign( static_cast< std::size_t >( ndefs ), 0 );
    for ( const auto& comp : strongly_connected( ndefs, def_succ ) )
    {
        if ( comp.size() > 1 )
            for ( int d : comp )
                _guessed[ static_cast< std::size_t >( d ) ] = 1;
        for ( int d : comp )
        {
            const auto& gd = g.definitions[ static_cast< std::size_t >( d ) ];
            const auto& deps = atom_deps[ static_cast< std::size_t >( d ) ];
            // local numbering of the definition's atoms
            std::vector< int > local( natoms, -1 );
            for ( std::size_t k = 0; k < gd.atoms.size(); ++k )
                local[ static_cast< std::size_t >( gd.atoms[ k ] ) ] = static_cast< int >( k );
            std::vector< std::vector< int > > succ( gd.atoms.size() );
            for ( std::size_t k = 0; k < gd.atoms.size(); ++k )
                for ( int a : deps[ k ] )
                    succ[ k ].push_back( local[ static_cast< std::size_t >( a ) ] );
            Plan plan{ d, {} };
            for ( const auto& sc : strongly_connected( static_cast< int >( gd.atoms.size() ), succ ) )
            {
                Component c;
                for ( int k : sc )
                {
                    c.atoms.push_back( gd.atoms[ static_cast< std::size_t >( k ) ] );
                    c.bodies.push_back( gd.body[ static_cast< std::size_t >( k ) ] );
                }
                const auto k0 = static_cast< std::size_t >( sc[ 0 ] );
                c.recursive = sc.size() > 1 ||
                              std::find( succ[ k0 ].begin(), succ[ k0 ].end(), sc[ 0 ] ) != succ[ k0 ].end();
                plan.components.push_back( std::move( c ) );
            }
            _plans.push_back( std::move( plan ) );
        }
    }
}

bool WellFounded::is_computed( int atom ) const
{
    const int d = _g.atoms[ static_cast< std::size_t >( atom ) ].definition;
    return d >= 0 && !_guessed[ static_cast< std::size_t >( d ) ];
}

// Two-valued reading of a node. Atoms of the current component read _x for
// positive and _y for negative occurrences; other atoms are read
// optimistically (upper) or pessimistically (lower).
bool WellFounded::eval2( int node, const std::vector< TruthValue >& vals, bool upper ) const
{
    const auto& n = _g.nodes[ static_cast< std::size_t >( node ) ];
    switch ( n.kind )
    {
    case GroundNode::Kind::False: return false;
    case GroundNode::Kind::True: return true;
    case GroundNode::Kind::Unknown: return upper;
    case GroundNode::Kind::Lit:
    {
        const auto a = static_cast< std::size_t >( n.atom );
        if ( _in_scc[ a ] )
            return n.positive ? _x[ a ] != 0 : _y[ a ] == 0;
        const auto v = vals[ a ];
        const auto want = n.positive ? TruthValue::True : TruthValue::False;
        return upper ? v == want || v == TruthValue::Unknown : v == want;
    }
    case GroundNode::Kind::And:
        for ( int k : n.kids )
            if ( !eval2( k, vals, upper ) )
                return false;
        return true;
    case GroundNode::Kind::Or:
        for ( int k : n.kids )
            if ( eval2( k, vals, upper ) )
                return true;
        return false;
    }
    return false;
}

void WellFounded::solve_component( const Component& c, const std::vector< TruthValue >& vals,
                                   std::vector< TruthValue >& out ) const
{
    if ( !c.recursive )
    {
        const bool lo = eval2( c.bodies[ 0 ], vals, false );
        const bool hi = lo || eval2( c.bodies[ 0 ], vals, true );
        out[ static_cast< std::size_t >( c.atoms[ 0 ] ) ] = lo ? TruthValue::True : hi ? TruthValue::Unknown : TruthValue::False;
        return;
    }
    for ( int a : c.atoms )
        _in_scc[ static_cast< std::size_t >( a ) ] = 1;
    const auto n = c.atoms.size();
    std::vector< char > lower( n, 0 ), upper( n, 0 );
    // least fixpoint of the body operator; negative occurrences read `neg`
    auto lfp = [ & ]( const std::vector< char >& neg, bool optimistic ) {
        for ( std::size_t k = 0; k < n; ++k )
        {
            _x[ static_cast< std::size_t >( c.atoms[ k ] ) ] = 0;
            _y[ static_cast< std::size_t >( c.atoms[ k ] ) ] = neg[ k ];
        }
        std::vector< char > res( n, 0 );
        bool changed = true;
        while ( changed )
        {
            changed = false;
            for ( std::size_t k = 0; k < n; ++k )
                if ( !res[ k ] && eval2( c.bodies[ k ], vals, optimistic ) )
                {
                    res[ k ] = 1;
                    _x[ static_cast< std::size_t >( c.atoms[ k ] ) ] = 1;
                    changed = true;
                }
        }
        return res;
    };
    while ( true )
    {
        upper = lfp( lower, true );
        auto next = lfp( upper, false );
        if ( next == lower )
            break;
        lower = std::move( next );
    }
    for ( std::size_t k = 0; k < n; ++k )
    {
        const auto a = static_cast< std::size_t >( c.atoms[ k ] );
        out[ a ] = lower[ k ] ? TruthValue::True : upper[ k ] ? TruthValue::Unknown : TruthValue::False;
        _in_scc[ a ] = _x[ a ] = _y[ a ] = 0;
    }
}

void WellFounded::compute( std::vector< TruthValue >& vals, std::vector< TruthValue >& guessed ) const
{
    for ( const auto& plan : _plans )
    {
        if ( !_guessed[ static_cast< std::size_t >( plan.definition ) ] )
        {
            for ( const auto& c : plan.components )
                solve_component( c, vals, vals );
            continue;
        }
        // Recompute from the guesses of other definitions only.
        auto local = vals;
        for ( const auto& c : plan.components )
            solve_component( c, local, local );
        for ( const auto& c : plan.components )
            for ( int a : c.atoms )
                guessed[ static_cast< std::size_t >( a ) ] = local[ static_cast< std::size_t >( a ) ];
    }
}

} // namespace ltc::detail
