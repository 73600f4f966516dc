#include "ltc/vocabulary.hpp"

#include <algorithm>

namespace ltc
{

std::string_view to_string( SymbolCategory category ) noexcept
{
    switch ( category )
    {
    case SymbolCategory::Ltc: return "ltc";
    case SymbolCategory::Static: return "static";
    case SymbolCategory::Dynamic: return "dynamic";
    }
    return "static";
}

bool is_time_sort( std::string_view sort ) noexcept
{
    return sort == time_sort_name;
}

bool is_ltc_symbol_name( std::string_view name ) noexcept
{
    return name == init_name || name == succ_name;
}

void Vocabulary::add_sort( Sort sort )
{
    if ( _sort_index.contains( sort.name ) )
        throw Error( ErrorCode::NameCollision, "sort " + sort.name + " declared twice in vocabulary " + _name );
    _sort_index.emplace( sort.name, _sorts.size() );
    _sorts.push_back( std::move( sort ) );
}

void Vocabulary::add_symbol( SymbolDecl symbol )
{
    if ( _symbol_index.contains( symbol.name ) )
        throw Error( ErrorCode::NameCollision, "symbol " + symbol.name + " declared twice in vocabulary " + _name );
    _symbol_index.emplace( symbol.name, _symbols.size() );
    _symbols.push_back( std::move( symbol ) );
}

void Vocabulary::add_fluent( std::string predicate )
{
    if ( std::find( _fluents.begin(), _fluents.end(), predicate ) == _fluents.end() )
        _fluents.push_back( std::move( predicate ) );
}

void Vocabulary::add_ltc_symbols()
{
    if ( !has_time_sort() )
        throw Error( ErrorCode::NoTimeSort, "vocabulary " + _name + " has no Time sort" );
    const std::string time{ time_sort_name };
    if ( !find_symbol( init_name ) )
        add_symbol( SymbolDecl{ std::string( init_name ), {}, time, SymbolCategory::Ltc, false, {} } );
    if ( !find_symbol( succ_name ) )
        add_symbol( SymbolDecl{ std::string( succ_name ), { time }, time, SymbolCategory::Ltc, false, {} } );
}

std::optional< std::size_t > Vocabulary::sort_index( std::string_view name ) const
{
    auto it = _sort_index.find( std::string( name ) );
    if ( it == _sort_index.end() )
        return std::nullopt;
    return it->second;
}

std::optional< std::size_t > Vocabulary::symbol_index( std::string_view name ) const
{
    auto it = _symbol_index.find( std::string( name ) );
    if ( it == _symbol_index.end() )
        return std::nullopt;
    return it->second;
}

const Sort* Vocabulary::find_sort( std::string_view name ) const
{
    auto i = sort_index( name );
    return i ? &_sorts[ *i ] : nullptr;
}

const SymbolDecl* Vocabulary::find_symbol( std::string_view name ) const
{
    auto i = symbol_index( name );
    return i ? &_symbols[ *i ] : nullptr;
}

SymbolDecl* Vocabulary::find_symbol_mutable( std::string_view name )
{
    auto i = symbol_index( name );
    return i ? &_symbols[ *i ] : nullptr;
}

bool Vocabulary::operator==( const Vocabulary& other ) const
{
    return _name == other._name && _sorts == other._sorts && _symbols == other._symbols
           && _fluents == other._fluents;
}

VocabularyValidation validate_vocabulary( const Vocabulary& vocabulary )
{
    VocabularyValidation result;
    auto validated = std::make_shared< Vocabulary >( vocabulary.name() );

    int time_sorts = 0;
    for ( const auto& sort : vocabulary.sorts() )
    {
        Sort copy = sort;
        if ( is_time_sort( sort.name ) )
        {
            copy.kind = SortKind::Time;
            ++time_sorts;
        }
        else if ( copy.kind == SortKind::Time )
        {
            result.errors.push_back( { ErrorCode::NoTimeSort, "only the sort named Time may have kind Time, not " + sort.name } );
            copy.kind = SortKind::Enumerated;
        }
        validated->add_sort( std::move( copy ) );
    }
    if ( time_sorts == 0 )
        result.errors.push_back( { ErrorCode::NoTimeSort, "vocabulary " + vocabulary.name() + " declares no Time sort" } );

    for ( const auto& symbol : vocabulary.symbols() )
    {
        SymbolDecl copy = symbol;
        for ( const auto& s : copy.arg_sorts )
            if ( !vocabulary.find_sort( s ) )
                result.errors.push_back( { ErrorCode::Scope, "symbol " + symbol.name + " uses undeclared sort " + s } );
        if ( copy.out_sort && !vocabulary.find_sort( *copy.out_sort ) )
            result.errors.push_back( { ErrorCode::Scope, "symbol " + symbol.name + " uses undeclared sort " + *copy.out_sort } );

        if ( is_ltc_symbol_name( symbol.name ) )
        {
            const bool is_init = symbol.name == init_name;
            const bool shape_ok = is_init ? ( copy.arg_sorts.empty() && copy.out_sort
                                              && is_time_sort( *copy.out_sort ) )
                                          : ( copy.arg_sorts.size() == 1 && is_time_sort( copy.arg_sorts[ 0 ] )
                                              && copy.out_sort && is_time_sort( *copy.out_sort ) );
            if ( !shape_ok )
                result.errors.push_back( { ErrorCode::TimeValuedOutput, "reserved symbol " + symbol.name + " has the wrong signature" } );
            copy.category = SymbolCategory::Ltc;
            validated->add_symbol( std::move( copy ) );
            continue;
        }

        const auto time_args = std::count_if( copy.arg_sorts.begin(), copy.arg_sorts.end(),
                                              []( const std::string& s ) { return is_time_sort( s ); } );
        if ( time_args > 1 )
            result.errors.push_back( { ErrorCode::MultipleTimeArgs, "symbol " + symbol.name + " has more than one Time argument" } );
        if ( copy.out_sort && is_time_sort( *copy.out_sort ) )
            result.errors.push_back( { ErrorCode::TimeValuedOutput, "function " + symbol.name + " has output sort Time" } );

        if ( time_args == 1 )
        {
            copy.category = SymbolCategory::Dynamic;
            auto it = std::find_if( copy.arg_sorts.begin(), copy.arg_sorts.end(),
                                    []( const std::string& s ) { return is_time_sort( s ); } );
            const auto pos = static_cast< std::size_t >( it - copy.arg_sorts.begin() );
            if ( pos + 1 != copy.arg_sorts.size() )
            {
                copy.arg_sorts.erase( it );
                copy.arg_sorts.emplace_back( time_sort_name );
                if ( !copy.written_time_position )
                    copy.written_time_position = pos;
            }
        }
        else
        {
            copy.category = SymbolCategory::Static;
        }
        validated->add_symbol( std::move( copy ) );
    }

    for ( const auto& fluent : vocabulary.fluents() )
    {
        validated->add_fluent( fluent );
        const auto* symbol = validated->find_symbol( fluent );
        if ( !symbol || symbol->category != SymbolCategory::Dynamic || symbol->is_function() )
            result.errors.push_back( { ErrorCode::Type, "fluent " + fluent + " must be a dynamic predicate" } );
    }

    if ( result.errors.empty() )
    {
        if ( time_sorts == 1 )
            validated->add_ltc_symbols();
        result.vocabulary = std::move( validated );
    }
    return result;
}

} // namespace ltc
