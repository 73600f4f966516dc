#include "oracle.hpp"

#include <deque>
#include <stdexcept>

namespace ltc::testing
{

std::vector< std::size_t > user_symbols( const Vocabulary& v )
{
    std::vector< std::size_t > out;
    for ( std::size_t i = 0; i < v.symbols().size(); ++i )
        if ( !is_ltc_symbol_name( v.symbols()[ i ].name ) )
            out.push_back( i );
    return out;
}

std::vector< std::size_t > state_dynamic_symbols( const DerivedVocabularies& v )
{
    std::vector< std::size_t > out;
    for ( const auto& [ dyn, p ] : v.projections )
        out.push_back( *v.single_state->symbol_index( p.projected ) );
    return out;
}

namespace
{

struct Entry
{
    std::size_t symbol;
    std::size_t index;
    int values; // 2 for predicates, |out sort| for functions
    bool function;
};

} // namespace

std::size_t for_each_completion( const Structure& base, const std::vector< std::size_t >& symbols,
                                 const std::function< bool( const Structure& ) >& fn )
{
    Structure s = base;
    const auto& voc = s.vocabulary();
    std::vector< Entry > entries;
    for ( auto f : symbols )
    {
        const auto& d = voc.symbols()[ f ];
        if ( !s.has_table( f ) )
            throw std::invalid_argument( "no table for " + d.name );
        const int values = d.is_function() ? static_cast< int >( s.domain( *voc.sort_index( *d.out_sort ) ).size() ) : 2;
        for ( std::size_t i = 0; i < s.table_size( f ); ++i )
            entries.push_back( { f, i, values, d.is_function() } );
    }
    std::vector< int > digit( entries.size(), 0 );
    auto apply = [ & ]( std::size_t k ) {
        const auto& e = entries[ k ];
        if ( e.function )
            s.set_value( e.symbol, e.index, digit[ k ] );
        else
            s.set_truth( e.symbol, e.index, digit[ k ] ? TruthValue::True : TruthValue::False );
    };
    for ( std::size_t k = 0; k < entries.size(); ++k )
    {
        if ( entries[ k ].values == 0 )
            return 0;
        apply( k );
    }
    std::size_t n = 0;
    for ( ;; )
    {
        ++n;
        if ( !fn( s ) )
            return n;
        std::size_t k = 0;
        for ( ; k < entries.size(); ++k )
        {
            if ( ++digit[ k ] < entries[ k ].values )
            {
                apply( k );
                break;
            }
            digit[ k ] = 0;
            apply( k );
        }
        if ( k == entries.size() )
            return n;
    }
}

std::string key( const Structure& s )
{
    return to_json( s ).dump();
}

std::set< std::string > keys( const std::vector< Structure >& states )
{
    std::set< std::string > out;
    for ( const auto& s : states )
        out.insert( key( s ) );
    return out;
}

std::vector< Structure > brute_successors( const Engine& e, const Structure& state )
{
    const auto& v = e.vocabularies();
    Structure base = state;
    const auto dyn = state_dynamic_symbols( v );
    for ( auto f : dyn )
        base.clear( f );
    std::vector< Structure > out;
    for_each_completion( base, dyn, [ & ]( const Structure& next ) {
        if ( satisfies( pair_states( state, next, v ), e.derived().transition ) )
            out.push_back( next );
        return true;
    } );
    return out;
}

std::vector< Structure > brute_weak_successors( const Engine& e, const Chain& chain )
{
    const auto& v = e.vocabularies();
    Structure base = chain.back();
    const auto dyn = state_dynamic_symbols( v );
    for ( auto f : dyn )
        base.clear( f );
    std::vector< Structure > out;
    for_each_completion( base, dyn, [ & ]( const Structure& next ) {
        Chain c = chain;
        c.states.push_back( next );
        if ( e.kleene_compatibility( c, 1 ) != TruthValue::False )
            out.push_back( next );
        return true;
    } );
    return out;
}

std::vector< Structure > brute_initial_states( const Engine& e, const Structure& domain )
{
    const auto& v = e.vocabularies();
    Structure base = rebase( domain, v.single_state );
    std::vector< std::size_t > open;
    for ( auto f : user_symbols( *v.single_state ) )
        if ( !base.symbol_two_valued( f ) )
        {
            base.clear( f );
            open.push_back( f );
        }
    std::vector< Structure > out;
    for_each_completion( base, open, [ & ]( const Structure& s ) {
        if ( satisfies( s, e.derived().initial ) )
            out.push_back( s );
        return true;
    } );
    return out;
}

namespace
{

using Env = std::map< std::string, int >;

// Deepest Succ nesting around variable v in t; -1 when v does not occur.
int succ_depth( const TermPtr& t, const std::string& v )
{
    switch ( t->kind )
    {
    case Term::Kind::Variable: return t->name == v ? 0 : -1;
    case Term::Kind::Succ:
    {
        const int d = succ_depth( t->args[ 0 ], v );
        return d < 0 ? -1 : d + 1;
    }
    case Term::Kind::Apply:
    {
        int best = -1;
        for ( const auto& a : t->args )
            best = std::max( best, succ_depth( a, v ) );
        return best;
    }
    default: return -1;
    }
}

int succ_depth( const FormulaPtr& f, const std::string& v )
{
    int best = -1;
    for ( const auto& t : f->terms )
        best = std::max( best, succ_depth( t, v ) );
    if ( f->is_quantifier() )
        for ( const auto& q : f->vars )
            if ( q.name == v )
                return best;
    for ( const auto& c : f->children )
        best = std::max( best, succ_depth( c, v ) );
    return best;
}

class Classical
{
public:
    explicit Classical( const Structure& s ) : _s( s ), _voc( s.vocabulary() ) {}

    int term( const TermPtr& t, const Env& env ) const
    {
        switch ( t->kind )
        {
        case Term::Kind::Variable: return env.at( t->name );
        case Term::Kind::Init: return 0;
        case Term::Kind::Succ:
        {
            const int x = term( t->args[ 0 ], env ) + 1;
            if ( x > *_s.time_horizon() )
                throw std::out_of_range( "Succ past the last time point" );
            return x;
        }
        case Term::Kind::Element:
        {
            const auto idx = _s.element_index( *_voc.sort_index( t->sort ), t->name );
            if ( !idx )
                throw std::out_of_range( "unknown element " + t->name );
            return *idx;
        }
        case Term::Kind::Apply:
        {
            std::vector< int > args;
            for ( const auto& a : t->args )
                args.push_back( term( a, env ) );
            const int v = _s.value( *_voc.symbol_index( t->name ), args );
            if ( v < 0 )
                throw std::invalid_argument( "structure is not two-valued at " + t->name );
            return v;
        }
        }
        return -1;
    }

    bool formula( const FormulaPtr& f, Env& env ) const
    {
        using K = Formula::Kind;
        switch ( f->kind )
        {
        case K::True: return true;
        case K::False: return false;
        case K::Atom:
        {
            std::vector< int > args;
            for ( const auto& a : f->terms )
                args.push_back( term( a, env ) );
            const auto v = _s.truth( *_voc.symbol_index( f->symbol ), args );
            if ( v == TruthValue::Unknown )
                throw std::invalid_argument( "structure is not two-valued at " + f->symbol );
            return v == TruthValue::True;
        }
        case K::Eq: return term( f->terms[ 0 ], env ) == term( f->terms[ 1 ], env );
        case K::Not: return !formula( f->children[ 0 ], env );
        case K::And:
            for ( const auto& c : f->children )
                if ( !formula( c, env ) )
                    return false;
            return true;
        case K::Or:
            for ( const auto& c : f->children )
                if ( formula( c, env ) )
                    return true;
            return false;
        case K::Implies: return !formula( f->children[ 0 ], env ) || formula( f->children[ 1 ], env );
        case K::Iff: return formula( f->children[ 0 ], env ) == formula( f->children[ 1 ], env );
        case K::Forall:
        case K::Exists: return quantifier( f, 0, env );
        }
        return false;
    }

private:
    const Structure& _s;
    const Vocabulary& _voc;

    bool quantifier( const FormulaPtr& f, std::size_t k, Env& env ) const
    {
        if ( k == f->vars.size() )
            return formula( f->body(), env );
        const bool universal = f->kind == Formula::Kind::Forall;
        const auto& v = f->vars[ k ];
        int count = static_cast< int >( _s.domain( *_voc.sort_index( v.sort ) ).size() );
        if ( is_time_sort( v.sort ) )
        {
            // The depth counts the remaining block too.
            int d = 0;
            bool shadowed = false;
            for ( std::size_t j = k + 1; j < f->vars.size(); ++j )
                shadowed = shadowed || f->vars[ j ].name == v.name;
            if ( !shadowed )
                d = std::max( 0, succ_depth( f->body(), v.name ) );
            count -= d;
        }
        const auto saved = env.find( v.name ) == env.end() ? std::optional< int >() : std::optional< int >( env[ v.name ] );
        bool result = universal;
        for ( int i = 0; i < count; ++i )
        {
            env[ v.name ] = i;
            if ( quantifier( f, k + 1, env ) != universal )
            {
                result = !universal;
                break;
            }
        }
        if ( saved )
            env[ v.name ] = *saved;
        else
            env.erase( v.name );
        return result;
    }
};

} // namespace

bool classical_eval( const FormulaPtr& f, const Structure& s )
{
    Env env;
    return Classical( s ).formula( f, env );
}

std::optional< int > bfs_steps( const Engine& e, const Structure& domain, const std::function< bool( const Structure& ) >& goal,
                                int max_depth )
{
    std::deque< std::pair< Structure, int > > queue;
    std::set< std::string > seen;
    for ( auto& s : brute_initial_states( e, domain ) )
        if ( seen.insert( key( s ) ).second )
            queue.emplace_back( std::move( s ), 0 );
    while ( !queue.empty() )
    {
        auto [ s, d ] = std::move( queue.front() );
        queue.pop_front();
        if ( goal( s ) )
            return d;
        if ( d == max_depth )
            continue;
        for ( auto& n : brute_successors( e, s ) )
            if ( seen.insert( key( n ) ).second )
                queue.emplace_back( std::move( n ), d + 1 );
    }
    return std::nullopt;
}

} // namespace ltc::testing
