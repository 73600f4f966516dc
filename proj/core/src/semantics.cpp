#include "ltc/semantics.hpp"

#include "compiled.hpp"
#include "ltc/ground.hpp"
#include "wellfounded.hpp"

namespace ltc
{

namespace
{

std::vector< Variable > bind_assignment( const std::vector< TermPtr >& scope_terms, const FormulaPtr& f,
                                         const Assignment& assignment )
{
    std::set< Variable > free = f ? free_variables( f ) : std::set< Variable >{};
    for ( const auto& t : scope_terms )
        for ( const auto& v : free_variables( t ) )
            free.insert( v );
    std::vector< Variable > out;
    for ( const auto& v : free )
    {
        if ( !assignment.contains( v.name ) )
            throw Error( ErrorCode::Scope, "free variable " + v.name + " has no value" );
        out.push_back( v );
    }
    return out;
}

std::vector< int > environment( const std::vector< Variable >& vars, const Structure& s, const Assignment& assignment,
                                int slots )
{
    std::vector< int > env( static_cast< std::size_t >( std::max< int >( slots, 1 ) ), 0 );
    const auto& voc = s.vocabulary();
    for ( std::size_t i = 0; i < vars.size(); ++i )
    {
        const auto sort = voc.sort_index( vars[ i ].sort );
        const auto& name = assignment.at( vars[ i ].name );
        const auto e = sort ? s.element_index( *sort, name ) : std::nullopt;
        if ( !e )
            throw Error( ErrorCode::UnknownElement, "element " + name + " is not in the domain of " + vars[ i ].sort );
        env[ i ] = *e;
    }
    return env;
}

// Value of one ground atom in s.
TruthValue atom_value( const GroundAtom& a, const Structure& s )
{
    if ( a.value < 0 )
        return s.truth( a.symbol, a.tuple );
    const int v = s.value( a.symbol, a.tuple );
    return v < 0 ? TruthValue::Unknown : from_bool( v == a.value );
}

void copy_symbol( const Structure& src, std::size_t from, Structure& dst, std::size_t to, int level )
{
    const auto& d = dst.vocabulary().symbols()[ to ];
    const auto n = dst.table_size( to );
    std::vector< int > args;
    for ( std::size_t i = 0; i < n; ++i )
    {
        args = dst.tuple_at( to, i );
        if ( level >= 0 )
            args.push_back( level );
        const auto j = src.tuple_index( from, args );
        if ( d.is_function() )
            dst.set_value( to, i, src.value( from, j ) );
        else
            dst.set_truth( to, i, src.truth( from, j ) );
    }
}

void copy_domains( const Structure& src, Structure& dst )
{
    const auto& sv = src.vocabulary();
    const auto& dv = dst.vocabulary();
    for ( std::size_t i = 0; i < dv.sorts().size(); ++i )
        if ( const auto j = sv.sort_index( dv.sorts()[ i ].name ); j && src.has_domain( *j ) )
            dst.set_domain( i, src.domain( *j ) );
}

std::size_t symbol_in( const Vocabulary& voc, const std::string& name )
{
    const auto idx = voc.symbol_index( name );
    if ( !idx )
        throw Error( ErrorCode::InvalidArgument, "symbol " + name + " is not in vocabulary " + voc.name() );
    return *idx;
}

void require_vocabulary( const Structure& s, const VocabularyPtr& voc, const char* what )
{
    if ( !( s.vocabulary() == *voc ) )
        throw Error( ErrorCode::InvalidArgument, std::string( what ) + " " + s.name() + " is not over vocabulary " +
                                                     voc->name() );
}

// Copies static symbols between two structures over derived vocabularies.
void copy_statics( const Structure& src, Structure& dst, const DerivedVocabularies& v )
{
    const auto& sv = src.vocabulary();
    const auto& dv = dst.vocabulary();
    for ( const auto& d : v.static_voc->symbols() )
    {
        const auto from = symbol_in( sv, d.name );
        const auto to = symbol_in( dv, d.name );
        if ( src.has_table( from ) && dst.has_table( to ) )
            copy_symbol( src, from, dst, to, -1 );
    }
}

int check_level( const Structure& I, int k )
{
    const auto n = I.time_horizon();
    if ( !n )
        throw Error( ErrorCode::UnboundedSort, "structure " + I.name() + " has no Time domain" );
    if ( k < 0 || k > *n )
        throw Error( ErrorCode::InvalidArgument,
                     "time point " + std::to_string( k ) + " outside 0.." + std::to_string( *n ) );
    return *n;
}

} // namespace

TruthValue kleene_eval( const FormulaPtr& f, const Structure& s, const Assignment& assignment )
{
    const auto vars = bind_assignment( {}, f, assignment );
    detail::Compiler c( s.vocabulary(), s );
    const auto cf = c.formula( f, vars );
    auto env = environment( vars, s, assignment, c.slots() );
    return detail::eval_formula( cf, s, env );
}

std::optional< std::string > eval_term( const TermPtr& t, const Structure& s, const Assignment& assignment )
{
    const auto vars = bind_assignment( { t }, nullptr, assignment );
    detail::Compiler c( s.vocabulary(), s );
    const auto ct = c.term( t, vars );
    auto env = environment( vars, s, assignment, c.slots() );
    const int v = detail::eval_term( ct, s, env );
    if ( v < 0 )
        return std::nullopt;
    return s.domain( *s.vocabulary().sort_index( t->sort ) )[ static_cast< std::size_t >( v ) ];
}

namespace
{

struct DefinitionValues
{
    GroundTheory ground;
    std::vector< TruthValue > computed;
};

DefinitionValues compute_definition( const Definition& d, const Structure& s )
{
    Theory t{ "definition", s.vocabulary_ptr(), {}, { d } };
    DefinitionValues out{ ground( t, s ), {} };
    const auto& g = out.ground;
    out.computed.resize( g.atoms.size() );
    for ( std::size_t i = 0; i < g.atoms.size(); ++i )
        out.computed[ i ] = g.atoms[ i ].definition >= 0 ? TruthValue::Unknown : atom_value( g.atoms[ i ], s );
    detail::WellFounded wf( g );
    std::vector< TruthValue > unused( g.atoms.size(), TruthValue::Unknown );
    wf.compute( out.computed, unused );
    return out;
}

} // namespace

Structure well_founded_values( const Definition& d, const Structure& s )
{
    const auto r = compute_definition( d, s );
    Structure out = s;
    for ( std::size_t i = 0; i < r.ground.atoms.size(); ++i )
    {
        const auto& a = r.ground.atoms[ i ];
        if ( a.definition < 0 )
            continue;
        const auto v = r.computed[ i ];
        if ( a.value < 0 )
            out.set_truth( a.symbol, a.tuple, v );
        else if ( v == TruthValue::True )
            out.set_value( a.symbol, a.tuple, a.value );
    }
    // function entries without a unique true graph point stay unknown
    for ( const auto& grp : r.ground.groups )
    {
        if ( grp.definition < 0 )
            continue;
        int trues = 0;
        for ( int a : grp.atoms )
            trues += r.computed[ static_cast< std::size_t >( a ) ] == TruthValue::True;
        if ( trues != 1 )
            out.set_value( grp.symbol, grp.tuple, Structure::unknown_value );
    }
    return out;
}

TruthValue eval_definition( const Definition& d, const Structure& s )
{
    if ( d.empty() )
        return TruthValue::True;
    const auto r = compute_definition( d, s );
    const auto& g = r.ground;
    bool two_valued = true;
    bool contradiction = false;
    bool mismatch = false;
    for ( std::size_t i = 0; i < g.atoms.size(); ++i )
    {
        const auto given = atom_value( g.atoms[ i ], s );
        if ( !is_known( given ) )
        {
            two_valued = false;
            continue;
        }
        if ( g.atoms[ i ].definition < 0 )
            continue;
        const auto c = r.computed[ i ];
        if ( c != given )
            mismatch = true;
        if ( is_known( c ) && c != given )
            contradiction = true;
    }
    if ( two_valued )
        return from_bool( !mismatch );
    return contradiction ? TruthValue::False : TruthValue::Unknown;
}

TruthValue eval_theory( const Theory& t, const Structure& s )
{
    require_vocabulary( s, t.vocabulary, "structure" );
    auto v = TruthValue::True;
    for ( const auto& f : t.sentences )
        if ( ( v = meet( v, kleene_eval( f, s ) ) ) == TruthValue::False )
            return v;
    for ( const auto& d : t.definitions )
        if ( ( v = meet( v, eval_definition( d, s ) ) ) == TruthValue::False )
            return v;
    return v;
}

bool satisfies( const Structure& s, const Theory& t )
{
    return eval_theory( t, s ) == TruthValue::True;
}

Structure project_state( const Structure& I, int k, const DerivedVocabularies& v )
{
    check_level( I, k );
    Structure out( v.single_state, I.name() + "@" + std::to_string( k ) );
    copy_domains( I, out );
    copy_statics( I, out, v );
    const auto& iv = I.vocabulary();
    for ( const auto& [ dyn, proj ] : v.projections )
        copy_symbol( I, symbol_in( iv, dyn ), out, symbol_in( *v.single_state, proj.projected ), k );
    return out;
}

Structure project_bistate( const Structure& I, int k, const DerivedVocabularies& v )
{
    const int n = check_level( I, k );
    if ( k >= n )
        throw Error( ErrorCode::InvalidArgument, "no time point after " + std::to_string( k ) );
    Structure out( v.bistate, I.name() + "@" + std::to_string( k ) );
    copy_domains( I, out );
    copy_statics( I, out, v );
    const auto& iv = I.vocabulary();
    for ( const auto& [ dyn, proj ] : v.projections )
    {
        const auto from = symbol_in( iv, dyn );
        copy_symbol( I, from, out, symbol_in( *v.bistate, proj.projected ), k );
        copy_symbol( I, from, out, symbol_in( *v.bistate, proj.next ), k + 1 );
    }
    return out;
}

bool same_statics( const Structure& a, const Structure& b, const DerivedVocabularies& v )
{
    const auto& av = a.vocabulary();
    const auto& bv = b.vocabulary();
    for ( const auto& s : v.static_voc->sorts() )
    {
        const auto i = av.sort_index( s.name ), j = bv.sort_index( s.name );
        if ( !i || !j || a.has_domain( *i ) != b.has_domain( *j ) )
            return false;
        if ( a.has_domain( *i ) && a.domain( *i ) != b.domain( *j ) )
            return false;
    }
    for ( const auto& d : v.static_voc->symbols() )
    {
        const auto i = symbol_in( av, d.name ), j = symbol_in( bv, d.name );
        if ( a.has_table( i ) != b.has_table( j ) )
            return false;
        if ( !a.has_table( i ) )
            continue;
        const auto n = a.table_size( i );
        for ( std::size_t k = 0; k < n; ++k )
        {
            if ( d.is_function() ? a.value( i, k ) != b.value( j, k ) : a.truth( i, k ) != b.truth( j, k ) )
                return false;
        }
    }
    return true;
}

Structure pair_states( const Structure& current, const Structure& next, const DerivedVocabularies& v )
{
    require_vocabulary( current, v.single_state, "state" );
    require_vocabulary( next, v.single_state, "state" );
    if ( !same_statics( current, next, v ) )
        throw Error( ErrorCode::StaticMismatch,
                     "states " + current.name() + " and " + next.name() + " disagree on domains or static symbols" );
    Structure out( v.bistate, current.name() );
    copy_domains( current, out );
    copy_statics( current, out, v );
    const auto& sv = *v.single_state;
    for ( const auto& [ dyn, proj ] : v.projections )
    {
        const auto from = symbol_in( sv, proj.projected );
        copy_symbol( current, from, out, symbol_in( *v.bistate, proj.projected ), -1 );
        copy_symbol( next, from, out, symbol_in( *v.bistate, proj.next ), -1 );
    }
    return out;
}

namespace
{

Structure half_state( const Structure& bistate, const DerivedVocabularies& v, bool next )
{
    require_vocabulary( bistate, v.bistate, "bistate structure" );
    Structure out( v.single_state, bistate.name() );
    copy_domains( bistate, out );
    copy_statics( bistate, out, v );
    for ( const auto& [ dyn, proj ] : v.projections )
        copy_symbol( bistate, symbol_in( *v.bistate, next ? proj.next : proj.projected ), out,
                     symbol_in( *v.single_state, proj.projected ), -1 );
    return out;
}

} // namespace

Structure current_state( const Structure& bistate, const DerivedVocabularies& v )
{
    return half_state( bistate, v, false );
}

Structure next_state( const Structure& bistate, const DerivedVocabularies& v )
{
    return half_state( bistate, v, true );
}

Structure rebase( const Structure& s, const VocabularyPtr& voc )
{
    Structure out( voc, s.name() );
    copy_domains( s, out );
    const auto& sv = s.vocabulary();
    for ( std::size_t i = 0; i < voc->symbols().size(); ++i )
    {
        const auto& d = voc->symbols()[ i ];
        if ( is_ltc_symbol_name( d.name ) )
            continue;
        const auto j = sv.symbol_index( d.name );
        if ( !j || sv.symbols()[ *j ].arg_sorts != d.arg_sorts || sv.symbols()[ *j ].out_sort != d.out_sort )
            continue;
        if ( s.has_table( *j ) && out.has_table( i ) )
            copy_symbol( s, *j, out, i, -1 );
    }
    return out;
}

Structure chain_as_structure( const Chain& chain, const DerivedVocabularies& v, int lookahead )
{
    if ( chain.empty() )
        throw Error( ErrorCode::InvalidArgument, "empty chain" );
    const auto& first = chain.states.front();
    for ( const auto& s : chain.states )
    {
        require_vocabulary( s, v.single_state, "state" );
        if ( !same_statics( first, s, v ) )
            throw Error( ErrorCode::StaticMismatch, "chain states disagree on domains or static symbols" );
    }
    Structure out( v.base, first.name() );
    copy_domains( first, out );
    const int k = static_cast< int >( chain.size() ) - 1;
    out.set_time_horizon( k + std::max( lookahead, 0 ) );
    copy_statics( first, out, v );
    const auto& bv = *v.base;
    for ( const auto& [ dyn, proj ] : v.projections )
    {
        const auto to = symbol_in( bv, dyn );
        const auto from = symbol_in( *v.single_state, proj.projected );
        if ( !out.has_table( to ) )
            continue;
        const bool fn = bv.symbols()[ to ].is_function();
        std::vector< int > args;
        for ( std::size_t i = 0; i < out.table_size( to ); ++i )
        {
            const auto tuple = out.tuple_at( to, i );
            const int level = tuple.back();
            if ( level > k )
                continue;
            args.assign( tuple.begin(), tuple.end() - 1 );
            const auto& st = chain.states[ static_cast< std::size_t >( level ) ];
            const auto j = st.tuple_index( from, args );
            if ( fn )
                out.set_value( to, i, st.value( from, j ) );
            else
                out.set_truth( to, i, st.truth( from, j ) );
        }
    }
    return out;
}

Chain chain_of( const Structure& I, const DerivedVocabularies& v )
{
    const int n = check_level( I, 0 );
    Chain c;
    for ( int k = 0; k <= n; ++k )
        c.states.push_back( project_state( I, k, v ) );
    return c;
}

} // namespace ltc
