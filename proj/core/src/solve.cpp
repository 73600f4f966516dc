#include "ltc/solve.hpp"

#include "ltc/semantics.hpp"
#include "wellfounded.hpp"

#include <algorithm>
#include <optional>

namespace ltc
{

namespace
{

// A search variable: an open predicate atom, or an open function entry.
struct Unit
{
    std::size_t symbol;
    std::size_t tuple;
    int atom = -1;  // predicate atom, or -1
    int group = -1; // function group, or -1
    std::size_t domain = 2;
};

bool unit_less( const Unit& a, const Unit& b )
{
    return a.symbol != b.symbol ? a.symbol < b.symbol : a.tuple < b.tuple;
}

TruthValue given_value( const GroundAtom& a, const Structure& s )
{
    if ( a.value < 0 )
        return s.truth( a.symbol, a.tuple );
    const int v = s.value( a.symbol, a.tuple );
    return v < 0 ? TruthValue::Unknown : from_bool( v == a.value );
}

} // namespace

struct ModelExpander::Impl
{
    Grounding grounding;
    std::optional< detail::WellFounded > wf;
    SolveStats stats;

    // per call
    const Structure* partial = nullptr;
    SolveOptions options;
    std::vector< TruthValue > fixed; // given values of computed defined atoms
    std::vector< char > assignable;
    std::vector< Unit > units;
    std::vector< Unit > free_units;
    std::vector< int > assignable_groups;
    std::vector< int > computed_groups;
    std::vector< TruthValue > scratch;
    std::size_t produced = 0;
    const std::function< bool( const Structure& ) >* sink = nullptr;
    bool halted = false;

    Impl( const Theory& t, const Structure& context, const std::set< std::string >& parameters )
        : grounding( t, context, parameters )
    {
    }

    const GroundTheory& g() const { return grounding.theory(); }

    void refresh()
    {
        wf.reset();
        wf.emplace( g() );
        stats.atoms = g().atoms.size();
        stats.constraints = g().constraints.size();
    }

    std::vector< TruthValue > initial_values( const Structure& s )
    {
        const auto& gt = g();
        const auto n = gt.atoms.size();
        std::vector< TruthValue > vals( n, TruthValue::Unknown );
        fixed.assign( n, TruthValue::Unknown );
        assignable.assign( n, 0 );
        units.clear();
        free_units.clear();
        assignable_groups.clear();
        computed_groups.clear();
        for ( std::size_t i = 0; i < n; ++i )
        {
            const auto& a = gt.atoms[ i ];
            const auto given = given_value( a, s );
            if ( wf->is_computed( static_cast< int >( i ) ) )
            {
                fixed[ i ] = given;
                continue;
            }
            vals[ i ] = given;
            assignable[ i ] = 1;
            if ( a.group < 0 && !is_known( given ) )
                units.push_back( { a.symbol, a.tuple, static_cast< int >( i ), -1, 2 } );
        }
        for ( std::size_t gi = 0; gi < gt.groups.size(); ++gi )
        {
            const auto& grp = gt.groups[ gi ];
            if ( wf->is_computed( grp.atoms[ 0 ] ) )
            {
                computed_groups.push_back( static_cast< int >( gi ) );
                continue;
            }
            assignable_groups.push_back( static_cast< int >( gi ) );
            if ( s.value( grp.symbol, grp.tuple ) < 0 )
                units.push_back( { grp.symbol, grp.tuple, -1, static_cast< int >( gi ), grp.atoms.size() } );
        }
        std::sort( units.begin(), units.end(), unit_less );

        const auto& voc = *gt.vocabulary;
        std::vector< char > defined( voc.symbols().size(), 0 );
        for ( const auto& a : gt.atoms )
            if ( a.definition >= 0 )
                defined[ a.symbol ] = 1;
        for ( std::size_t sym = 0; sym < voc.symbols().size(); ++sym )
        {
            const auto& d = voc.symbols()[ sym ];
            if ( defined[ sym ] || is_ltc_symbol_name( d.name ) )
                continue;
            if ( !s.has_table( sym ) )
                throw Error( ErrorCode::UnboundedSort, "symbol " + d.name + " needs domains for all its sorts" );
            const auto size = s.table_size( sym );
            for ( std::size_t t = 0; t < size; ++t )
            {
                if ( d.is_function() )
                {
                    if ( s.value( sym, t ) < 0 && gt.find_atom( sym, t, 0 ) < 0 )
                        free_units.push_back(
                            { sym, t, -1, -1, s.domain( *voc.sort_index( *d.out_sort ) ).size() } );
                }
                else if ( !is_known( s.truth( sym, t ) ) && gt.find_atom( sym, t, -1 ) < 0 )
                    free_units.push_back( { sym, t, -1, -1, 2 } );
            }
        }
        scratch.assign( n, TruthValue::Unknown );
        return vals;
    }

    bool assign( std::vector< TruthValue >& vals, int atom, TruthValue v, bool& changed )
    {
        auto& cur = vals[ static_cast< std::size_t >( atom ) ];
        if ( cur == v )
            return true;
        if ( is_known( cur ) )
            return false;
        cur = v;
        changed = true;
        return true;
    }

    // Makes node true by unit propagation where that is forced.
    bool force( int node, std::vector< TruthValue >& vals, bool& changed )
    {
        const auto& gt = g();
        const auto& n = gt.nodes[ static_cast< std::size_t >( node ) ];
        switch ( n.kind )
        {
        case GroundNode::Kind::True: return true;
        case GroundNode::Kind::False:
        case GroundNode::Kind::Unknown: return false;
        case GroundNode::Kind::Lit:
        {
            const auto v = vals[ static_cast< std::size_t >( n.atom ) ];
            if ( is_known( v ) )
                return ( v == TruthValue::True ) == n.positive;
            if ( !assignable[ static_cast< std::size_t >( n.atom ) ] )
                return true;
            return assign( vals, n.atom, from_bool( n.positive ), changed );
        }
        case GroundNode::Kind::And:
            for ( int k : n.kids )
                if ( detail::eval_node( gt, k, vals ) != TruthValue::True && !force( k, vals, changed ) )
                    return false;
            return true;
        case GroundNode::Kind::Or:
        {
            int open = -1;
            int count = 0;
            for ( int k : n.kids )
            {
                if ( k == ground_unknown )
                    continue;
                const auto v = detail::eval_node( gt, k, vals );
                if ( v == TruthValue::True )
                    return true;
                if ( v == TruthValue::Unknown )
                {
                    open = k;
                    if ( ++count > 1 )
                        return true;
                }
            }
            if ( count == 0 )
                return false;
            return force( open, vals, changed );
        }
        }
        return true;
    }

    bool exactly_one( const GroundGroup& grp, std::vector< TruthValue >& vals, bool& changed )
    {
        int trues = 0, unknown = 0, last_unknown = -1;
        for ( int a : grp.atoms )
        {
            const auto v = vals[ static_cast< std::size_t >( a ) ];
            if ( v == TruthValue::True )
                ++trues;
            else if ( v == TruthValue::Unknown )
            {
                ++unknown;
                last_unknown = a;
            }
        }
        if ( trues > 1 || ( trues == 0 && unknown == 0 ) )
            return false;
        if ( trues == 1 && unknown > 0 )
        {
            for ( int a : grp.atoms )
                if ( vals[ static_cast< std::size_t >( a ) ] == TruthValue::Unknown )
                    vals[ static_cast< std::size_t >( a ) ] = TruthValue::False;
            changed = true;
        }
        else if ( trues == 0 && unknown == 1 )
        {
            vals[ static_cast< std::size_t >( last_unknown ) ] = TruthValue::True;
            changed = true;
        }
        return true;
    }

    bool propagate( std::vector< TruthValue >& vals )
    {
        const auto& gt = g();
        while ( true )
        {
            bool changed = false;
            wf->compute( vals, scratch );
            for ( std::size_t i = 0; i < vals.size(); ++i )
            {
                const auto& a = gt.atoms[ i ];
                if ( a.definition < 0 )
                    continue;
                if ( !assignable[ i ] )
                {
                    if ( is_known( fixed[ i ] ) && is_known( vals[ i ] ) && fixed[ i ] != vals[ i ] )
                        return false;
                }
                else if ( is_known( scratch[ i ] ) && !assign( vals, static_cast< int >( i ), scratch[ i ], changed ) )
                    return false;
            }
            for ( int c : gt.constraints )
            {
                const auto v = detail::eval_node( gt, c, vals );
                if ( v == TruthValue::False )
                    return false;
                if ( v == TruthValue::Unknown && !force( c, vals, changed ) )
                    return false;
            }
            for ( int gi : assignable_groups )
                if ( !exactly_one( gt.groups[ static_cast< std::size_t >( gi ) ], vals, changed ) )
                    return false;
            if ( !changed )
                return true;
        }
    }

    bool leaf_ok( const std::vector< TruthValue >& vals )
    {
        const auto& gt = g();
        for ( std::size_t i = 0; i < vals.size(); ++i )
        {
            if ( !is_known( vals[ i ] ) )
                return false;
            if ( gt.atoms[ i ].definition < 0 )
                continue;
            if ( !assignable[ i ] && is_known( fixed[ i ] ) && fixed[ i ] != vals[ i ] )
                return false;
            if ( assignable[ i ] && scratch[ i ] != vals[ i ] )
                return false;
        }
        for ( int gi : computed_groups )
        {
            int trues = 0;
            for ( int a : gt.groups[ static_cast< std::size_t >( gi ) ].atoms )
                trues += vals[ static_cast< std::size_t >( a ) ] == TruthValue::True;
            if ( trues != 1 )
                return false;
        }
        for ( int c : gt.constraints )
            if ( detail::eval_node( gt, c, vals ) != TruthValue::True )
                return false;
        return true;
    }

    void tick()
    {
        ++stats.nodes;
        if ( options.stop && options.stop->load( std::memory_order_relaxed ) )
            throw Error( ErrorCode::Cancelled, "search cancelled" );
        if ( options.max_nodes && stats.nodes > options.max_nodes )
            throw Error( ErrorCode::Budget, "search exceeded " + std::to_string( options.max_nodes ) + " nodes" );
    }

    bool unit_assigned( const Unit& u, const std::vector< TruthValue >& vals ) const
    {
        if ( u.atom >= 0 )
            return is_known( vals[ static_cast< std::size_t >( u.atom ) ] );
        for ( int a : g().groups[ static_cast< std::size_t >( u.group ) ].atoms )
            if ( vals[ static_cast< std::size_t >( a ) ] == TruthValue::True )
                return true;
        return false;
    }

    void emit( const std::vector< TruthValue >& vals )
    {
        const auto& gt = g();
        Structure model = *partial;
        for ( std::size_t i = 0; i < vals.size(); ++i )
        {
            const auto& a = gt.atoms[ i ];
            if ( a.value < 0 )
                model.set_truth( a.symbol, a.tuple, vals[ i ] );
            else if ( vals[ i ] == TruthValue::True )
                model.set_value( a.symbol, a.tuple, a.value );
        }
        std::vector< std::size_t > pick( free_units.size(), 0 );
        while ( !halted )
        {
            for ( std::size_t k = 0; k < free_units.size(); ++k )
            {
                const auto& u = free_units[ k ];
                if ( gt.vocabulary->symbols()[ u.symbol ].is_function() )
                    model.set_value( u.symbol, u.tuple, static_cast< int >( pick[ k ] ) );
                else
                    model.set_truth( u.symbol, u.tuple, from_bool( pick[ k ] == 1 ) );
            }
            ++produced;
            if ( !( *sink )( model ) || ( options.nbmodels && produced >= options.nbmodels ) )
            {
                halted = true;
                return;
            }
            std::size_t k = free_units.size();
            while ( k > 0 )
            {
                if ( ++pick[ k - 1 ] < free_units[ k - 1 ].domain )
                    break;
                pick[ k - 1 ] = 0;
                --k;
            }
            if ( k == 0 )
                return;
        }
    }

    void search( std::vector< TruthValue >& vals, std::size_t from )
    {
        tick();
        if ( !propagate( vals ) )
        {
            ++stats.conflicts;
            return;
        }
        while ( from < units.size() && unit_assigned( units[ from ], vals ) )
            ++from;
        if ( from == units.size() )
        {
            if ( leaf_ok( vals ) )
                emit( vals );
            return;
        }
        const auto& u = units[ from ];
        if ( u.atom >= 0 )
        {
            for ( const auto v : { TruthValue::False, TruthValue::True } )
            {
                auto next = vals;
                next[ static_cast< std::size_t >( u.atom ) ] = v;
                search( next, from + 1 );
                if ( halted )
                    return;
            }
            return;
        }
        const auto& atoms = g().groups[ static_cast< std::size_t >( u.group ) ].atoms;
        for ( std::size_t v = 0; v < atoms.size(); ++v )
        {
            if ( vals[ static_cast< std::size_t >( atoms[ v ] ) ] == TruthValue::False )
                continue;
            auto next = vals;
            for ( std::size_t w = 0; w < atoms.size(); ++w )
                next[ static_cast< std::size_t >( atoms[ w ] ) ] = from_bool( w == v );
            search( next, from + 1 );
            if ( halted )
                return;
        }
    }

    std::size_t run( const Structure& s, const SolveOptions& opts, const std::function< bool( const Structure& ) >& fn )
    {
        if ( !( s.vocabulary() == *g().vocabulary ) )
            throw Error( ErrorCode::InvalidArgument, "structure " + s.name() + " is not over vocabulary " +
                                                         g().vocabulary->name() );
        if ( !wf )
            refresh();
        partial = &s;
        options = opts;
        sink = &fn;
        produced = 0;
        halted = false;
        auto vals = initial_values( s );
        search( vals, 0 );
        partial = nullptr;
        sink = nullptr;
        return produced;
    }
};

ModelExpander::ModelExpander( const Theory& theory, const Structure& context, const std::set< std::string >& parameters )
    : _impl( std::make_unique< Impl >( theory, context, parameters ) )
{
}

ModelExpander::~ModelExpander() = default;
ModelExpander::ModelExpander( ModelExpander&& ) noexcept = default;
ModelExpander& ModelExpander::operator=( ModelExpander&& ) noexcept = default;

std::size_t ModelExpander::for_each_model( const Structure& partial, const SolveOptions& options,
                                           const std::function< bool( const Structure& ) >& fn )
{
    return _impl->run( partial, options, fn );
}

std::vector< Structure > ModelExpander::expand( const Structure& partial, const SolveOptions& options )
{
    std::vector< Structure > out;
    for_each_model( partial, options, [ & ]( const Structure& m ) {
        out.push_back( m );
        return true;
    } );
    return out;
}

bool ModelExpander::satisfiable( const Structure& partial, const SolveOptions& options )
{
    auto o = options;
    o.nbmodels = 1;
    return for_each_model( partial, o, []( const Structure& ) { return false; } ) > 0;
}

void ModelExpander::add_constraint( const FormulaPtr& sentence )
{
    _impl->grounding.add_constraint( sentence );
    _impl->wf.reset();
}

void ModelExpander::add_cost_constraint( const TermPtr& cost, long bound, bool equal )
{
    _impl->grounding.add_cost_constraint( cost, bound, equal );
    _impl->wf.reset();
}

const GroundTheory& ModelExpander::ground_theory() const
{
    return _impl->g();
}

const SolveStats& ModelExpander::stats() const
{
    return _impl->stats;
}

std::vector< Structure > model_expand( const Theory& theory, const Structure& partial, const SolveOptions& options )
{
    ModelExpander m( theory, partial );
    return m.expand( partial, options );
}

namespace
{

long cost_of( const TermPtr& cost, const Structure& model )
{
    const auto v = eval_term( cost, model );
    if ( !v )
        throw Error( ErrorCode::InvalidArgument, "cost term has no value in a model" );
    return element_as_integer( *v );
}

} // namespace

MinimizeResult minimize( const Theory& theory, const Structure& partial, const TermPtr& cost,
                         const SolveOptions& options )
{
    MinimizeResult out;
    ModelExpander m( theory, partial );
    auto one = options;
    one.nbmodels = 1;
    auto first = m.expand( partial, one );
    if ( first.empty() )
        return out;
    out.satisfiable = true;
    long best = cost_of( cost, first.front() );
    while ( true )
    {
        m.add_cost_constraint( cost, best, false );
        auto better = m.expand( partial, one );
        if ( better.empty() )
            break;
        best = cost_of( cost, better.front() );
    }
    out.optimum = best;
    ModelExpander witnesses( theory, partial );
    witnesses.add_cost_constraint( cost, best, true );
    out.models = witnesses.expand( partial, options );
    return out;
}

} // namespace ltc
