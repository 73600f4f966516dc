#include "ltc/syntax.hpp"

#include <algorithm>
#include <map>

namespace ltc
{

TermPtr Term::variable( std::string name, std::string sort )
{
    return std::make_shared< Term >( Term{ Kind::Variable, std::move( name ), std::move( sort ), {} } );
}

TermPtr Term::apply( std::string symbol, std::vector< TermPtr > args, std::string sort )
{
    return std::make_shared< Term >( Term{ Kind::Apply, std::move( symbol ), std::move( sort ), std::move( args ) } );
}

TermPtr Term::element( std::string value, std::string sort )
{
    return std::make_shared< Term >( Term{ Kind::Element, std::move( value ), std::move( sort ), {} } );
}

TermPtr Term::init()
{
    return std::make_shared< Term >( Term{ Kind::Init, std::string( init_name ), std::string( time_sort_name ), {} } );
}

TermPtr Term::succ( TermPtr arg )
{
    return std::make_shared< Term >(
        Term{ Kind::Succ, std::string( succ_name ), std::string( time_sort_name ), { std::move( arg ) } } );
}

bool Term::is_time() const
{
    return is_time_sort( sort );
}

bool operator==( const Term& a, const Term& b )
{
    if ( a.kind != b.kind || a.name != b.name || a.sort != b.sort || a.args.size() != b.args.size() )
        return false;
    for ( std::size_t i = 0; i < a.args.size(); ++i )
        if ( !equal( a.args[ i ], b.args[ i ] ) )
            return false;
    return true;
}

bool equal( const TermPtr& a, const TermPtr& b )
{
    if ( a == b )
        return true;
    if ( !a || !b )
        return false;
    return *a == *b;
}

FormulaPtr Formula::truth( bool value )
{
    return std::make_shared< Formula >( Formula{ value ? Kind::True : Kind::False, {}, {}, {}, {} } );
}

FormulaPtr Formula::atom( std::string predicate, std::vector< TermPtr > args )
{
    return std::make_shared< Formula >( Formula{ Kind::Atom, std::move( predicate ), std::move( args ), {}, {} } );
}

FormulaPtr Formula::eq( TermPtr lhs, TermPtr rhs )
{
    return std::make_shared< Formula >( Formula{ Kind::Eq, {}, { std::move( lhs ), std::move( rhs ) }, {}, {} } );
}

FormulaPtr Formula::negation( FormulaPtr f )
{
    return std::make_shared< Formula >( Formula{ Kind::Not, {}, {}, { std::move( f ) }, {} } );
}

FormulaPtr Formula::conjunction( std::vector< FormulaPtr > fs )
{
    if ( fs.empty() )
        return truth( true );
    if ( fs.size() == 1 )
        return fs.front();
    return std::make_shared< Formula >( Formula{ Kind::And, {}, {}, std::move( fs ), {} } );
}

FormulaPtr Formula::disjunction( std::vector< FormulaPtr > fs )
{
    if ( fs.empty() )
        return truth( false );
    if ( fs.size() == 1 )
        return fs.front();
    return std::make_shared< Formula >( Formula{ Kind::Or, {}, {}, std::move( fs ), {} } );
}

FormulaPtr Formula::implies( FormulaPtr lhs, FormulaPtr rhs )
{
    return std::make_shared< Formula >( Formula{ Kind::Implies, {}, {}, { std::move( lhs ), std::move( rhs ) }, {} } );
}

FormulaPtr Formula::iff( FormulaPtr lhs, FormulaPtr rhs )
{
    return std::make_shared< Formula >( Formula{ Kind::Iff, {}, {}, { std::move( lhs ), std::move( rhs ) }, {} } );
}

FormulaPtr Formula::forall( std::vector< Variable > vars, FormulaPtr body )
{
    if ( vars.empty() )
        return body;
    return std::make_shared< Formula >( Formula{ Kind::Forall, {}, {}, { std::move( body ) }, std::move( vars ) } );
}

FormulaPtr Formula::exists( std::vector< Variable > vars, FormulaPtr body )
{
    if ( vars.empty() )
        return body;
    return std::make_shared< Formula >( Formula{ Kind::Exists, {}, {}, { std::move( body ) }, std::move( vars ) } );
}

bool operator==( const Formula& a, const Formula& b )
{
    if ( a.kind != b.kind || a.symbol != b.symbol || a.vars != b.vars || a.terms.size() != b.terms.size()
         || a.children.size() != b.children.size() )
        return false;
    for ( std::size_t i = 0; i < a.terms.size(); ++i )
        if ( !equal( a.terms[ i ], b.terms[ i ] ) )
            return false;
    for ( std::size_t i = 0; i < a.children.size(); ++i )
        if ( !equal( a.children[ i ], b.children[ i ] ) )
            return false;
    return true;
}

bool equal( const FormulaPtr& a, const FormulaPtr& b )
{
    if ( a == b )
        return true;
    if ( !a || !b )
        return false;
    return *a == *b;
}

const std::string& Rule::defined_symbol() const
{
    if ( head->kind == Formula::Kind::Eq )
        return head->terms[ 0 ]->name;
    return head->symbol;
}

const std::vector< TermPtr >& Rule::head_args() const
{
    if ( head->kind == Formula::Kind::Eq )
        return head->terms[ 0 ]->args;
    return head->terms;
}

bool operator==( const Rule& a, const Rule& b )
{
    return a.vars == b.vars && equal( a.head, b.head ) && equal( a.body, b.body );
}

std::set< std::string > Definition::defined_symbols() const
{
    std::set< std::string > out;
    for ( const auto& r : rules )
        out.insert( r.defined_symbol() );
    return out;
}

bool operator==( const Definition& a, const Definition& b )
{
    return a.rules == b.rules;
}

std::set< std::string > Theory::defined_symbols() const
{
    std::set< std::string > out;
    for ( const auto& d : definitions )
    {
        auto s = d.defined_symbols();
        out.insert( s.begin(), s.end() );
    }
    return out;
}

bool Theory::is_empty() const
{
    return sentences.empty()
           && std::all_of( definitions.begin(), definitions.end(), []( const Definition& d ) { return d.empty(); } );
}

bool operator==( const Theory& a, const Theory& b )
{
    if ( a.name != b.name || a.sentences.size() != b.sentences.size() || !( a.definitions == b.definitions ) )
        return false;
    const std::string va = a.vocabulary ? a.vocabulary->name() : std::string{};
    const std::string vb = b.vocabulary ? b.vocabulary->name() : std::string{};
    if ( va != vb )
        return false;
    for ( std::size_t i = 0; i < a.sentences.size(); ++i )
        if ( !equal( a.sentences[ i ], b.sentences[ i ] ) )
            return false;
    return true;
}

// --- alpha equivalence -------------------------------------------------------

namespace
{

// Pairs of simultaneously bound names, innermost last.
struct AlphaEnv
{
    std::vector< std::pair< std::string, std::string > > stack;

    // innermost binder of either name decides; free names must match
    bool same( const std::string& a, const std::string& b ) const
    {
        for ( auto it = stack.rbegin(); it != stack.rend(); ++it )
        {
            const bool ha = it->first == a;
            const bool hb = it->second == b;
            if ( ha || hb )
                return ha && hb;
        }
        return a == b;
    }
};

bool alpha_term( const TermPtr& a, const TermPtr& b, const AlphaEnv& env )
{
    if ( a->kind != b->kind || a->sort != b->sort || a->args.size() != b->args.size() )
        return false;
    if ( a->kind == Term::Kind::Variable )
        return env.same( a->name, b->name );
    if ( a->name != b->name )
        return false;
    for ( std::size_t i = 0; i < a->args.size(); ++i )
        if ( !alpha_term( a->args[ i ], b->args[ i ], env ) )
            return false;
    return true;
}

bool alpha_formula( const FormulaPtr& a, const FormulaPtr& b, AlphaEnv& env )
{
    if ( a->kind != b->kind || a->symbol != b->symbol || a->terms.size() != b->terms.size()
         || a->children.size() != b->children.size() || a->vars.size() != b->vars.size() )
        return false;
    for ( std::size_t i = 0; i < a->vars.size(); ++i )
        if ( a->vars[ i ].sort != b->vars[ i ].sort )
            return false;
    for ( std::size_t i = 0; i < a->terms.size(); ++i )
        if ( !alpha_term( a->terms[ i ], b->terms[ i ], env ) )
            return false;
    const auto mark = env.stack.size();
    for ( std::size_t i = 0; i < a->vars.size(); ++i )
        env.stack.emplace_back( a->vars[ i ].name, b->vars[ i ].name );
    bool ok = true;
    for ( std::size_t i = 0; ok && i < a->children.size(); ++i )
        ok = alpha_formula( a->children[ i ], b->children[ i ], env );
    env.stack.resize( mark );
    return ok;
}

} // namespace

bool alpha_equal( const FormulaPtr& a, const FormulaPtr& b )
{
    AlphaEnv env;
    return alpha_formula( a, b, env );
}

bool alpha_equal( const Rule& a, const Rule& b )
{
    if ( a.vars.size() != b.vars.size() )
        return false;
    AlphaEnv env;
    for ( std::size_t i = 0; i < a.vars.size(); ++i )
    {
        if ( a.vars[ i ].sort != b.vars[ i ].sort )
            return false;
        env.stack.emplace_back( a.vars[ i ].name, b.vars[ i ].name );
    }
    return alpha_formula( a.head, b.head, env ) && alpha_formula( a.body, b.body, env );
}

bool alpha_equal( const Theory& a, const Theory& b )
{
    if ( a.sentences.size() != b.sentences.size() || a.definitions.size() != b.definitions.size() )
        return false;
    for ( std::size_t i = 0; i < a.sentences.size(); ++i )
        if ( !alpha_equal( a.sentences[ i ], b.sentences[ i ] ) )
            return false;
    for ( std::size_t d = 0; d < a.definitions.size(); ++d )
    {
        const auto& ra = a.definitions[ d ].rules;
        const auto& rb = b.definitions[ d ].rules;
        if ( ra.size() != rb.size() )
            return false;
        for ( std::size_t i = 0; i < ra.size(); ++i )
            if ( !alpha_equal( ra[ i ], rb[ i ] ) )
                return false;
    }
    return true;
}

// --- traversal ---------------------------------------------------------------

void for_each_term( const TermPtr& t, const std::function< void( const TermPtr& ) >& fn )
{
    fn( t );
    for ( const auto& a : t->args )
        for_each_term( a, fn );
}

void for_each_term( const FormulaPtr& f, const std::function< void( const TermPtr& ) >& fn )
{
    for ( const auto& t : f->terms )
        for_each_term( t, fn );
    for ( const auto& c : f->children )
        for_each_term( c, fn );
}

void for_each_symbol_use( const FormulaPtr& f,
                          const std::function< void( const std::string&, const std::vector< TermPtr >& ) >& fn )
{
    if ( f->kind == Formula::Kind::Atom )
        fn( f->symbol, f->terms );
    for ( const auto& t : f->terms )
        for_each_term( t, [ & ]( const TermPtr& u ) {
            if ( u->kind == Term::Kind::Apply )
                fn( u->name, u->args );
        } );
    for ( const auto& c : f->children )
        for_each_symbol_use( c, fn );
}

namespace
{

void collect_free( const TermPtr& t, const std::set< std::string >& bound, std::set< Variable >& out )
{
    if ( t->kind == Term::Kind::Variable && !bound.contains( t->name ) )
        out.insert( Variable{ t->name, t->sort } );
    for ( const auto& a : t->args )
        collect_free( a, bound, out );
}

void collect_free( const FormulaPtr& f, std::set< std::string > bound, std::set< Variable >& out )
{
    for ( const auto& v : f->vars )
        bound.insert( v.name );
    for ( const auto& t : f->terms )
        collect_free( t, bound, out );
    for ( const auto& c : f->children )
        collect_free( c, bound, out );
}

} // namespace

std::set< Variable > free_variables( const TermPtr& t )
{
    std::set< Variable > out;
    collect_free( t, {}, out );
    return out;
}

std::set< Variable > free_variables( const FormulaPtr& f )
{
    std::set< Variable > out;
    collect_free( f, {}, out );
    return out;
}

TermPtr substitute( const TermPtr& t, const Term& from, const TermPtr& to )
{
    if ( *t == from )
        return to;
    if ( t->args.empty() )
        return t;
    std::vector< TermPtr > args;
    args.reserve( t->args.size() );
    bool changed = false;
    for ( const auto& a : t->args )
    {
        args.push_back( substitute( a, from, to ) );
        changed = changed || args.back() != a;
    }
    if ( !changed )
        return t;
    return std::make_shared< Term >( Term{ t->kind, t->name, t->sort, std::move( args ) } );
}

FormulaPtr substitute( const FormulaPtr& f, const Term& from, const TermPtr& to )
{
    // a quantifier rebinding the variable being replaced shadows it
    if ( from.kind == Term::Kind::Variable && f->is_quantifier()
         && std::any_of( f->vars.begin(), f->vars.end(), [ & ]( const Variable& v ) { return v.name == from.name; } ) )
        return f;
    bool changed = false;
    std::vector< TermPtr > terms;
    terms.reserve( f->terms.size() );
    for ( const auto& t : f->terms )
    {
        terms.push_back( substitute( t, from, to ) );
        changed = changed || terms.back() != t;
    }
    std::vector< FormulaPtr > children;
    children.reserve( f->children.size() );
    for ( const auto& c : f->children )
    {
        children.push_back( substitute( c, from, to ) );
        changed = changed || children.back() != c;
    }
    if ( !changed )
        return f;
    return std::make_shared< Formula >( Formula{ f->kind, f->symbol, std::move( terms ), std::move( children ), f->vars } );
}

Rule substitute( const Rule& r, const Term& from, const TermPtr& to )
{
    return Rule{ r.vars, substitute( r.head, from, to ), substitute( r.body, from, to ) };
}

FormulaPtr rule_as_formula( const Rule& r )
{
    return Formula::forall( r.vars, Formula::implies( r.body, r.head ) );
}

} // namespace ltc
