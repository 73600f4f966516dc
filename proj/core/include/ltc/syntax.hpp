#pragma once

#include "ltc/vocabulary.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ltc
{

struct Variable
{
    std::string name;
    std::string sort;

    bool operator==( const Variable& ) const = default;
    auto operator<=>( const Variable& ) const = default;
};

class Term;
using TermPtr = std::shared_ptr< const Term >;

// Terms are immutable trees with shared subterms.
class Term
{
public:
    enum class Kind
    {
        Variable,
        Apply,   // function symbol (constants are nullary)
        Element, // domain element literal, typed by context
        Init,
        Succ,
    };

    Kind kind;
    std::string name; // variable name, function symbol, or element literal
    std::string sort; // sort of the value this term denotes
    std::vector< TermPtr > args;

    static TermPtr variable( std::string name, std::string sort );
    static TermPtr variable( const Variable& v ) { return variable( v.name, v.sort ); }
    static TermPtr apply( std::string symbol, std::vector< TermPtr > args, std::string sort );
    static TermPtr element( std::string value, std::string sort );
    static TermPtr init();
    static TermPtr succ( TermPtr arg );

    bool is_time() const;
    bool is_variable( std::string_view var ) const { return kind == Kind::Variable && name == var; }
};

bool operator==( const Term& a, const Term& b );
bool equal( const TermPtr& a, const TermPtr& b );

class Formula;
using FormulaPtr = std::shared_ptr< const Formula >;

class Formula
{
public:
    enum class Kind
    {
        True,
        False,
        Atom,
        Eq,
        Not,
        And,
        Or,
        Implies,
        Iff,
        Forall,
        Exists,
    };

    Kind kind;
    std::string symbol;                 // Atom: predicate name
    std::vector< TermPtr > terms;       // Atom arguments; Eq: lhs, rhs
    std::vector< FormulaPtr > children; // connectives; quantifier body is children[0]
    std::vector< Variable > vars;       // quantifier block

    static FormulaPtr truth( bool value );
    static FormulaPtr atom( std::string predicate, std::vector< TermPtr > args );
    static FormulaPtr eq( TermPtr lhs, TermPtr rhs );
    static FormulaPtr negation( FormulaPtr f );
    static FormulaPtr conjunction( std::vector< FormulaPtr > fs );
    static FormulaPtr disjunction( std::vector< FormulaPtr > fs );
    static FormulaPtr implies( FormulaPtr lhs, FormulaPtr rhs );
    static FormulaPtr iff( FormulaPtr lhs, FormulaPtr rhs );
    static FormulaPtr forall( std::vector< Variable > vars, FormulaPtr body );
    static FormulaPtr exists( std::vector< Variable > vars, FormulaPtr body );

    bool is_quantifier() const { return kind == Kind::Forall || kind == Kind::Exists; }
    const FormulaPtr& body() const { return children.front(); }
};

bool operator==( const Formula& a, const Formula& b );
bool equal( const FormulaPtr& a, const FormulaPtr& b );

// A rule  ! vars: head <- body.  The head is an Atom, or an Eq whose left side
// is a function application (read as the graph of that function).
struct Rule
{
    std::vector< Variable > vars;
    FormulaPtr head;
    FormulaPtr body;

    const std::string& defined_symbol() const;
    const std::vector< TermPtr >& head_args() const; // function heads: arguments of the application
    bool defines_function() const { return head->kind == Formula::Kind::Eq; }
};

bool operator==( const Rule& a, const Rule& b );

struct Definition
{
    std::vector< Rule > rules;

    std::set< std::string > defined_symbols() const;
    bool empty() const { return rules.empty(); }
};

bool operator==( const Definition& a, const Definition& b );

struct Theory
{
    std::string name;
    VocabularyPtr vocabulary;
    std::vector< FormulaPtr > sentences;
    std::vector< Definition > definitions;

    std::set< std::string > defined_symbols() const;
    bool is_empty() const;
};

// Structural equality of name, sentences and definitions. The vocabulary is
// compared by name only.
bool operator==( const Theory& a, const Theory& b );

// Equality up to consistent renaming of bound variables.
bool alpha_equal( const FormulaPtr& a, const FormulaPtr& b );
bool alpha_equal( const Rule& a, const Rule& b );
bool alpha_equal( const Theory& a, const Theory& b );

std::set< Variable > free_variables( const FormulaPtr& f );
std::set< Variable > free_variables( const TermPtr& t );

// Replaces every occurrence of `from` by `to`.
TermPtr substitute( const TermPtr& t, const Term& from, const TermPtr& to );
FormulaPtr substitute( const FormulaPtr& f, const Term& from, const TermPtr& to );
Rule substitute( const Rule& r, const Term& from, const TermPtr& to );

// Visits every term node (pre-order, including subterms of arguments).
void for_each_term( const FormulaPtr& f, const std::function< void( const TermPtr& ) >& fn );
void for_each_term( const TermPtr& t, const std::function< void( const TermPtr& ) >& fn );
// Visits every symbol occurrence: atoms and function applications.
void for_each_symbol_use( const FormulaPtr& f,
                          const std::function< void( const std::string& symbol, const std::vector< TermPtr >& args ) >& fn );

// The rule-as-formula  ! vars: body => head  (used when a rule must be read
// classically, e.g. for classification).
FormulaPtr rule_as_formula( const Rule& r );

} // namespace ltc
