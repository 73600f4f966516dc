#pragma once

#include "ltc/truth_value.hpp"
#include "ltc/vocabulary.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ltc
{

// Finite three-valued interpretation of a vocabulary. A predicate table maps
// each tuple to a TruthValue; a function table maps each tuple to an element
// index or -1 (unknown). Tables exist once all argument sorts have domains.
class Structure
{
public:
    static constexpr int unknown_value = -1;

    Structure() = default;
    explicit Structure( VocabularyPtr vocabulary, std::string name = {} );

    const Vocabulary& vocabulary() const noexcept { return *_voc; }
    const VocabularyPtr& vocabulary_ptr() const noexcept { return _voc; }
    const std::string& name() const noexcept { return _name; }
    void set_name( std::string name ) { _name = std::move( name ); }

    // --- domains
    void set_domain( std::size_t sort, std::vector< std::string > elements );
    void set_domain( std::string_view sort, std::vector< std::string > elements );
    void set_time_horizon( int n ); // Time = {0..n}
    bool has_domain( std::size_t sort ) const { return _has_domain[ sort ]; }
    const std::vector< std::string >& domain( std::size_t sort ) const { return _domains[ sort ]; }
    std::optional< int > element_index( std::size_t sort, std::string_view element ) const;
    std::optional< int > time_horizon() const; // last Time element, when Time has a domain
    std::optional< std::size_t > time_sort() const { return _time_sort; }

    // --- tables
    bool has_table( std::size_t symbol ) const;
    std::size_t table_size( std::size_t symbol ) const;
    std::size_t tuple_index( std::size_t symbol, std::span< const int > args ) const;
    std::vector< int > tuple_at( std::size_t symbol, std::size_t index ) const;

    TruthValue truth( std::size_t symbol, std::size_t index ) const;
    TruthValue truth( std::size_t symbol, std::span< const int > args ) const;
    void set_truth( std::size_t symbol, std::size_t index, TruthValue v );
    void set_truth( std::size_t symbol, std::span< const int > args, TruthValue v );

    int value( std::size_t symbol, std::size_t index ) const;
    int value( std::size_t symbol, std::span< const int > args ) const;
    void set_value( std::size_t symbol, std::size_t index, int element );
    void set_value( std::size_t symbol, std::span< const int > args, int element );

    // Sets every entry of a table (predicate) to v.
    void fill( std::size_t symbol, TruthValue v );
    // Marks all entries of a symbol unknown.
    void clear( std::size_t symbol );

    // Convenience by name and element names; throw ltc::Error(UnknownElement).
    TruthValue truth( std::string_view symbol, const std::vector< std::string >& args ) const;
    void set_truth( std::string_view symbol, const std::vector< std::string >& args, TruthValue v );
    std::optional< std::string > value( std::string_view symbol, const std::vector< std::string >& args ) const;
    void set_value( std::string_view symbol, const std::vector< std::string >& args, std::string_view element );

    // True iff all domains and tables exist and nothing is unknown.
    bool is_two_valued() const;
    bool symbol_two_valued( std::size_t symbol ) const;
    // Whether a symbol carries any information.
    bool symbol_informed( std::size_t symbol ) const;

    bool operator==( const Structure& other ) const;

    // Raw table access for evaluators.
    const std::vector< TruthValue >& predicate_table( std::size_t symbol ) const { return _pred[ symbol ]; }
    const std::vector< int >& function_table( std::size_t symbol ) const { return _func[ symbol ]; }

private:
    VocabularyPtr _voc;
    std::string _name;
    std::vector< std::vector< std::string > > _domains;
    std::vector< bool > _has_domain;
    std::vector< std::unordered_map< std::string, int > > _element_index;
    std::vector< std::vector< TruthValue > > _pred;
    std::vector< std::vector< int > > _func;
    std::optional< std::size_t > _time_sort;

    void allocate( std::size_t symbol );
    void symbol_args( std::string_view symbol, const std::vector< std::string >& args, std::size_t& sym,
                      std::vector< int >& idx ) const;
};

// Less-or-equally precise: same domains, and every known entry of a is known
// with the same value in b.
bool precision_leq( const Structure& a, const Structure& b );

// {sorts: {name: [elems]}, predicates: {name: [[tuple]...]}, functions:
// {name: [[args, value]...]}}. Only true tuples and known function entries
// are listed; a partial structure adds "unknown": {name: [[tuple]...]}.
nlohmann::json to_json( const Structure& s );
Structure structure_from_json( const nlohmann::json& j, VocabularyPtr vocabulary );

} // namespace ltc
