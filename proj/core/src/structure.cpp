#include "ltc/structure.hpp"

#include <algorithm>

namespace ltc
{

Structure::Structure( VocabularyPtr vocabulary, std::string name )
    : _voc( std::move( vocabulary ) ), _name( std::move( name ) )
{
    const auto ns = _voc->sorts().size();
    const auto nf = _voc->symbols().size();
    _domains.resize( ns );
    _has_domain.assign( ns, false );
    _element_index.resize( ns );
    _pred.resize( nf );
    _func.resize( nf );
    _time_sort = _voc->sort_index( time_sort_name );
}

void Structure::set_domain( std::size_t sort, std::vector< std::string > elements )
{
    _element_index[ sort ].clear();
    for ( std::size_t i = 0; i < elements.size(); ++i )
        if ( !_element_index[ sort ].emplace( elements[ i ], static_cast< int >( i ) ).second )
            throw Error( ErrorCode::InvalidArgument,
                         "element " + elements[ i ] + " listed twice in sort " + _voc->sorts()[ sort ].name );
    _domains[ sort ] = std::move( elements );
    _has_domain[ sort ] = true;
    const auto& sort_name = _voc->sorts()[ sort ].name;
    for ( std::size_t s = 0; s < _voc->symbols().size(); ++s )
    {
        const auto& decl = _voc->symbols()[ s ];
        bool uses = decl.out_sort == sort_name;
        for ( const auto& a : decl.arg_sorts )
            uses = uses || a == sort_name;
        if ( uses )
        {
            _pred[ s ].clear();
            _func[ s ].clear();
        }
    }
}

void Structure::set_domain( std::string_view sort, std::vector< std::string > elements )
{
    auto idx = _voc->sort_index( sort );
    if ( !idx )
        throw Error( ErrorCode::Scope, "unknown sort " + std::string( sort ) );
    set_domain( *idx, std::move( elements ) );
}

void Structure::set_time_horizon( int n )
{
    if ( !_time_sort )
        throw Error( ErrorCode::NoTimeSort, "vocabulary " + _voc->name() + " has no Time sort" );
    std::vector< std::string > elems;
    for ( int i = 0; i <= n; ++i )
        elems.push_back( std::to_string( i ) );
    set_domain( *_time_sort, std::move( elems ) );
}

std::optional< int > Structure::element_index( std::size_t sort, std::string_view element ) const
{
    const auto& m = _element_index[ sort ];
    auto it = m.find( std::string( element ) );
    if ( it == m.end() )
        return std::nullopt;
    return it->second;
}

std::optional< int > Structure::time_horizon() const
{
    if ( !_time_sort || !_has_domain[ *_time_sort ] )
        return std::nullopt;
    return static_cast< int >( _domains[ *_time_sort ].size() ) - 1;
}

bool Structure::has_table( std::size_t symbol ) const
{
    const auto& decl = _voc->symbols()[ symbol ];
    for ( const auto& a : decl.arg_sorts )
        if ( !_has_domain[ *_voc->sort_index( a ) ] )
            return false;
    if ( decl.out_sort && !_has_domain[ *_voc->sort_index( *decl.out_sort ) ] )
        return false;
    return true;
}

std::size_t Structure::table_size( std::size_t symbol ) const
{
    std::size_t n = 1;
    for ( const auto& a : _voc->symbols()[ symbol ].arg_sorts )
    {
        const auto s = *_voc->sort_index( a );
        n *= _has_domain[ s ] ? _domains[ s ].size() : 0;
    }
    return n;
}

std::size_t Structure::tuple_index( std::size_t symbol, std::span< const int > args ) const
{
    const auto& decl = _voc->symbols()[ symbol ];
    std::size_t idx = 0;
    for ( std::size_t i = 0; i < decl.arg_sorts.size(); ++i )
        idx = idx * _domains[ *_voc->sort_index( decl.arg_sorts[ i ] ) ].size() + static_cast< std::size_t >( args[ i ] );
    return idx;
}

std::vector< int > Structure::tuple_at( std::size_t symbol, std::size_t index ) const
{
    const auto& decl = _voc->symbols()[ symbol ];
    std::vector< int > out( decl.arg_sorts.size() );
    for ( std::size_t i = decl.arg_sorts.size(); i-- > 0; )
    {
        const auto n = _domains[ *_voc->sort_index( decl.arg_sorts[ i ] ) ].size();
        out[ i ] = static_cast< int >( index % n );
        index /= n;
    }
    return out;
}

void Structure::allocate( std::size_t symbol )
{
    if ( !has_table( symbol ) )
        throw Error( ErrorCode::UnboundedSort,
                     "symbol " + _voc->symbols()[ symbol ].name + " needs domains for all its sorts" );
    const auto n = table_size( symbol );
    if ( _voc->symbols()[ symbol ].is_function() )
    {
        if ( _func[ symbol ].size() != n )
            _func[ symbol ].assign( n, unknown_value );
    }
    else if ( _pred[ symbol ].size() != n )
        _pred[ symbol ].assign( n, TruthValue::Unknown );
}

TruthValue Structure::truth( std::size_t symbol, std::size_t index ) const
{
    const auto& t = _pred[ symbol ];
    return index < t.size() ? t[ index ] : TruthValue::Unknown;
}

TruthValue Structure::truth( std::size_t symbol, std::span< const int > args ) const
{
    if ( _pred[ symbol ].empty() )
        return TruthValue::Unknown;
    return truth( symbol, tuple_index( symbol, args ) );
}

void Structure::set_truth( std::size_t symbol, std::size_t index, TruthValue v )
{
    allocate( symbol );
    _pred[ symbol ][ index ] = v;
}

void Structure::set_truth( std::size_t symbol, std::span< const int > args, TruthValue v )
{
    allocate( symbol );
    _pred[ symbol ][ tuple_index( symbol, args ) ] = v;
}

int Structure::value( std::size_t symbol, std::size_t index ) const
{
    const auto& t = _func[ symbol ];
    return index < t.size() ? t[ index ] : unknown_value;
}

int Structure::value( std::size_t symbol, std::span< const int > args ) const
{
    if ( _func[ symbol ].empty() )
        return unknown_value;
    return value( symbol, tuple_index( symbol, args ) );
}

void Structure::set_value( std::size_t symbol, std::size_t index, int element )
{
    allocate( symbol );
    _func[ symbol ][ index ] = element;
}

void Structure::set_value( std::size_t symbol, std::span< const int > args, int element )
{
    allocate( symbol );
    _func[ symbol ][ tuple_index( symbol, args ) ] = element;
}

void Structure::fill( std::size_t symbol, TruthValue v )
{
    allocate( symbol );
    std::fill( _pred[ symbol ].begin(), _pred[ symbol ].end(), v );
}

void Structure::clear( std::size_t symbol )
{
    std::fill( _pred[ symbol ].begin(), _pred[ symbol ].end(), TruthValue::Unknown );
    std::fill( _func[ symbol ].begin(), _func[ symbol ].end(), unknown_value );
}

void Structure::symbol_args( std::string_view symbol, const std::vector< std::string >& args, std::size_t& sym,
                             std::vector< int >& idx ) const
{
    auto s = _voc->symbol_index( symbol );
    if ( !s )
        throw Error( ErrorCode::Scope, "unknown symbol " + std::string( symbol ) );
    sym = *s;
    const auto& decl = _voc->symbols()[ sym ];
    if ( args.size() != decl.arity() )
        throw Error( ErrorCode::Type, "symbol " + decl.name + " expects " + std::to_string( decl.arity() ) + " arguments" );
    idx.clear();
    for ( std::size_t i = 0; i < args.size(); ++i )
    {
        const auto sort = *_voc->sort_index( decl.arg_sorts[ i ] );
        auto e = element_index( sort, args[ i ] );
        if ( !e )
            throw Error( ErrorCode::UnknownElement, "element " + args[ i ] + " is not in sort " + decl.arg_sorts[ i ] );
        idx.push_back( *e );
    }
}

TruthValue Structure::truth( std::string_view symbol, const std::vector< std::string >& args ) const
{
    std::size_t sym;
    std::vector< int > idx;
    symbol_args( symbol, args, sym, idx );
    return truth( sym, std::span< const int >( idx ) );
}

void Structure::set_truth( std::string_view symbol, const std::vector< std::string >& args, TruthValue v )
{
    std::size_t sym;
    std::vector< int > idx;
    symbol_args( symbol, args, sym, idx );
    set_truth( sym, std::span< const int >( idx ), v );
}

std::optional< std::string > Structure::value( std::string_view symbol, const std::vector< std::string >& args ) const
{
    std::size_t sym;
    std::vector< int > idx;
    symbol_args( symbol, args, sym, idx );
    const int v = value( sym, std::span< const int >( idx ) );
    if ( v < 0 )
        return std::nullopt;
    return _domains[ *_voc->sort_index( *_voc->symbols()[ sym ].out_sort ) ][ static_cast< std::size_t >( v ) ];
}

void Structure::set_value( std::string_view symbol, const std::vector< std::string >& args, std::string_view element )
{
    std::size_t sym;
    std::vector< int > idx;
    symbol_args( symbol, args, sym, idx );
    const auto& decl = _voc->symbols()[ sym ];
    auto e = element_index( *_voc->sort_index( *decl.out_sort ), element );
    if ( !e )
        throw Error( ErrorCode::UnknownElement, "element " + std::string( element ) + " is not in sort " + *decl.out_sort );
    set_value( sym, std::span< const int >( idx ), *e );
}

bool Structure::symbol_two_valued( std::size_t symbol ) const
{
    const auto& decl = _voc->symbols()[ symbol ];
    if ( is_ltc_symbol_name( decl.name ) )
        return true;
    if ( !has_table( symbol ) )
        return false;
    const auto n = table_size( symbol );
    if ( decl.is_function() )
    {
        if ( n == 0 )
            return true;
        if ( _func[ symbol ].size() != n )
            return false;
        return std::none_of( _func[ symbol ].begin(), _func[ symbol ].end(), []( int v ) { return v < 0; } );
    }
    if ( n == 0 )
        return true;
    if ( _pred[ symbol ].size() != n )
        return false;
    return std::none_of( _pred[ symbol ].begin(), _pred[ symbol ].end(),
                         []( TruthValue v ) { return v == TruthValue::Unknown; } );
}

bool Structure::symbol_informed( std::size_t symbol ) const
{
    if ( _voc->symbols()[ symbol ].is_function() )
        return std::any_of( _func[ symbol ].begin(), _func[ symbol ].end(), []( int v ) { return v >= 0; } );
    return std::any_of( _pred[ symbol ].begin(), _pred[ symbol ].end(),
                        []( TruthValue v ) { return v != TruthValue::Unknown; } );
}

bool Structure::is_two_valued() const
{
    for ( std::size_t s = 0; s < _has_domain.size(); ++s )
        if ( !_has_domain[ s ] )
            return false;
    for ( std::size_t f = 0; f < _voc->symbols().size(); ++f )
        if ( !symbol_two_valued( f ) )
            return false;
    return true;
}

bool Structure::operator==( const Structure& other ) const
{
    if ( !_voc || !other._voc )
        return _voc == other._voc;
    if ( _voc->name() != other._voc->name() || _has_domain != other._has_domain || _domains != other._domains )
        return false;
    const auto nf = _voc->symbols().size();
    if ( other._voc->symbols().size() != nf )
        return false;
    for ( std::size_t f = 0; f < nf; ++f )
    {
        if ( !has_table( f ) )
            continue;
        const auto n = table_size( f );
        for ( std::size_t i = 0; i < n; ++i )
        {
            if ( truth( f, i ) != other.truth( f, i ) || value( f, i ) != other.value( f, i ) )
                return false;
        }
    }
    return true;
}

bool precision_leq( const Structure& a, const Structure& b )
{
    const auto& va = a.vocabulary();
    if ( va.symbols().size() != b.vocabulary().symbols().size() )
        return false;
    for ( std::size_t s = 0; s < va.sorts().size(); ++s )
        if ( a.has_domain( s ) != b.has_domain( s ) || ( a.has_domain( s ) && a.domain( s ) != b.domain( s ) ) )
            return false;
    for ( std::size_t f = 0; f < va.symbols().size(); ++f )
    {
        if ( !a.has_table( f ) )
            continue;
        const auto n = a.table_size( f );
        for ( std::size_t i = 0; i < n; ++i )
        {
            if ( va.symbols()[ f ].is_function() )
            {
                const int x = a.value( f, i );
                if ( x >= 0 && b.value( f, i ) != x )
                    return false;
            }
            else if ( !ltc::precision_leq( a.truth( f, i ), b.truth( f, i ) ) )
                return false;
        }
    }
    return true;
}

nlohmann::json to_json( const Structure& s )
{
    using nlohmann::json;
    const auto& voc = s.vocabulary();
    json sorts = json::object();
    for ( std::size_t i = 0; i < voc.sorts().size(); ++i )
        if ( s.has_domain( i ) )
            sorts[ voc.sorts()[ i ].name ] = s.domain( i );
    json preds = json::object();
    json funcs = json::object();
    json unknown = json::object();
    for ( std::size_t f = 0; f < voc.symbols().size(); ++f )
    {
        const auto& decl = voc.symbols()[ f ];
        if ( is_ltc_symbol_name( decl.name ) || !s.has_table( f ) )
            continue;
        auto names = [ & ]( const std::vector< int >& tuple ) {
            json t = json::array();
            for ( std::size_t i = 0; i < tuple.size(); ++i )
                t.push_back( s.domain( *voc.sort_index( decl.arg_sorts[ i ] ) )[ static_cast< std::size_t >( tuple[ i ] ) ] );
            return t;
        };
        const auto n = s.table_size( f );
        json rows = json::array();
        json unk = json::array();
        for ( std::size_t i = 0; i < n; ++i )
        {
            if ( decl.is_function() )
            {
                const int v = s.value( f, i );
                if ( v < 0 )
                    unk.push_back( names( s.tuple_at( f, i ) ) );
                else
                    rows.push_back( json::array(
                        { names( s.tuple_at( f, i ) ),
                          s.domain( *voc.sort_index( *decl.out_sort ) )[ static_cast< std::size_t >( v ) ] } ) );
            }
            else
            {
                const auto v = s.truth( f, i );
                if ( v == TruthValue::True )
                    rows.push_back( names( s.tuple_at( f, i ) ) );
                else if ( v == TruthValue::Unknown )
                    unk.push_back( names( s.tuple_at( f, i ) ) );
            }
        }
        ( decl.is_function() ? funcs : preds )[ decl.name ] = std::move( rows );
        if ( !unk.empty() )
            unknown[ decl.name ] = std::move( unk );
    }
    json out = { { "sorts", sorts }, { "predicates", preds }, { "functions", funcs } };
    if ( !unknown.empty() )
        out[ "unknown" ] = std::move( unknown );
    return out;
}

Structure structure_from_json( const nlohmann::json& j, VocabularyPtr vocabulary )
{
    Structure s( vocabulary );
    for ( const auto& [ sort, elems ] : j.at( "sorts" ).items() )
        s.set_domain( sort, elems.get< std::vector< std::string > >() );
    for ( const auto& [ name, rows ] : j.at( "predicates" ).items() )
    {
        const auto f = vocabulary->symbol_index( name );
        if ( !f )
            throw Error( ErrorCode::Scope, "unknown symbol " + name );
        s.fill( *f, TruthValue::False );
        for ( const auto& row : rows )
            s.set_truth( name, row.get< std::vector< std::string > >(), TruthValue::True );
    }
    for ( const auto& [ name, rows ] : j.at( "functions" ).items() )
        for ( const auto& row : rows )
            s.set_value( name, row.at( 0 ).get< std::vector< std::string > >(), row.at( 1 ).get< std::string >() );
    if ( j.contains( "unknown" ) )
        for ( const auto& [ name, rows ] : j.at( "unknown" ).items() )
        {
            const auto* decl = vocabulary->find_symbol( name );
            if ( decl && decl->is_predicate() )
                for ( const auto& row : rows )
                    s.set_truth( name, row.get< std::vector< std::string > >(), TruthValue::Unknown );
        }
    return s;
}

} // namespace ltc
