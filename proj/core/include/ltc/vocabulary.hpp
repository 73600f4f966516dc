#pragma once

#include "ltc/error.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltc
{

inline constexpr std::string_view time_sort_name = "Time";
inline constexpr std::string_view init_name = "Init";
inline constexpr std::string_view succ_name = "Succ";

enum class SortKind
{
    Time,
    Enumerated,
    IntRange,
};

struct Sort
{
    std::string name;
    SortKind kind = SortKind::Enumerated;

    bool operator==( const Sort& ) const = default;
};

enum class SymbolCategory
{
    Ltc,
    Static,
    Dynamic,
};

std::string_view to_string( SymbolCategory category ) noexcept;

struct SymbolDecl
{
    std::string name;
    std::vector< std::string > arg_sorts; // Time, if present, is stored last
    std::optional< std::string > out_sort; // empty for predicates
    SymbolCategory category = SymbolCategory::Static;
    bool exogenous = false;
    // Position of the Time argument as written by the user, when it differs
    // from the normal form.
    std::optional< std::size_t > written_time_position;

    bool is_function() const noexcept { return out_sort.has_value(); }
    bool is_predicate() const noexcept { return !out_sort.has_value(); }
    std::size_t arity() const noexcept { return arg_sorts.size(); }

    bool operator==( const SymbolDecl& ) const = default;
};

// A many-sorted vocabulary. Values are built once and then shared read-only
// through std::shared_ptr< const Vocabulary >.
class Vocabulary
{
    std::string _name;
    std::vector< Sort > _sorts;
    std::vector< SymbolDecl > _symbols;
    std::vector< std::string > _fluents;
    std::unordered_map< std::string, std::size_t > _sort_index;
    std::unordered_map< std::string, std::size_t > _symbol_index;

public:
    Vocabulary() = default;
    explicit Vocabulary( std::string name ) : _name( std::move( name ) ) {}

    const std::string& name() const noexcept { return _name; }
    void set_name( std::string name ) { _name = std::move( name ); }

    // Throw ltc::Error(NameCollision) on duplicates.
    void add_sort( Sort sort );
    void add_symbol( SymbolDecl symbol );
    void add_fluent( std::string predicate );

    // Declares Init and Succ; requires a Time sort.
    void add_ltc_symbols();

    const std::vector< Sort >& sorts() const noexcept { return _sorts; }
    const std::vector< SymbolDecl >& symbols() const noexcept { return _symbols; }
    const std::vector< std::string >& fluents() const noexcept { return _fluents; }

    std::optional< std::size_t > sort_index( std::string_view name ) const;
    std::optional< std::size_t > symbol_index( std::string_view name ) const;
    const Sort* find_sort( std::string_view name ) const;
    const SymbolDecl* find_symbol( std::string_view name ) const;
    SymbolDecl* find_symbol_mutable( std::string_view name );

    bool has_time_sort() const { return find_sort( time_sort_name ) != nullptr; }

    bool operator==( const Vocabulary& other ) const;
};

using VocabularyPtr = std::shared_ptr< const Vocabulary >;

bool is_time_sort( std::string_view sort ) noexcept;
bool is_ltc_symbol_name( std::string_view name ) noexcept;

struct VocabularyValidation
{
    VocabularyPtr vocabulary; // null when errors is non-empty
    std::vector< Issue > errors;

    bool ok() const noexcept { return errors.empty(); }
};

// Checks the linear-time vocabulary conditions and recomputes every symbol's
// category: Init/Succ are Ltc, symbols with a Time argument are Dynamic,
// everything else Static. Time arguments are moved to the last position.
VocabularyValidation validate_vocabulary( const Vocabulary& vocabulary );

} // namespace ltc
