#include "ltc/textio.hpp"
#include "ltc/transform.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace ltc
{

const VocabularyPtr* SourceProgram::find_vocabulary( std::string_view name ) const
{
    for ( const auto& v : vocabularies )
        if ( v->name() == name )
            return &v;
    return nullptr;
}

const Theory* SourceProgram::find_theory( std::string_view name ) const
{
    for ( const auto& t : theories )
        if ( t.name == name )
            return &t;
    return nullptr;
}

const StructureBlock* SourceProgram::find_structure( std::string_view name ) const
{
    for ( const auto& s : structures )
        if ( s.structure.name() == name )
            return &s;
    return nullptr;
}

VocabularyPtr SourceProgram::theory_vocabulary( std::string_view name ) const
{
    for ( std::size_t i = 0; i < vocabularies.size(); ++i )
        if ( vocabularies[ i ]->name() == name )
            return expanded_vocabularies[ i ];
    return nullptr;
}

namespace
{

// --- lexer -------------------------------------------------------------------

enum class Tok
{
    End,
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Bang,
    Question,
    And,
    Or,
    Not,
    Implies,
    Iff,
    Eq,
    Neq,
    LArrow,
    RArrow,
    Lt,
    Gt,
};

std::string_view describe( Tok t )
{
    switch ( t )
    {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::And: return "'&'";
    case Tok::Or: return "'|'";
    case Tok::Not: return "'~'";
    case Tok::Implies: return "'=>'";
    case Tok::Iff: return "'<=>'";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'~='";
    case Tok::LArrow: return "'<-'";
    case Tok::RArrow: return "'->'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    }
    return "token";
}

struct Token
{
    Tok kind;
    std::string text;
    SourceSpan span;
};

struct ParseFailure
{
    Issue issue;
};

[[noreturn]] void fail( ErrorCode code, std::string message, SourceSpan span )
{
    throw ParseFailure{ Issue{ code, std::move( message ), span } };
}

std::vector< Token > lex( std::string_view src )
{
    std::vector< Token > out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [ & ]( std::size_t n ) {
        for ( std::size_t k = 0; k < n && i < src.size(); ++k, ++i )
        {
            if ( src[ i ] == '\n' )
            {
                ++line;
                col = 1;
            }
            else if ( ( static_cast< unsigned char >( src[ i ] ) & 0xC0 ) != 0x80 )
                ++col;
        }
    };
    auto starts = [ & ]( std::string_view s ) { return src.substr( i, s.size() ) == s; };
    static const std::vector< std::pair< std::string_view, Tok > > symbols = {
        { "<=>", Tok::Iff },   { "=>", Tok::Implies }, { "<-", Tok::LArrow },  { "->", Tok::RArrow },
        { "~=", Tok::Neq },    { "..", Tok::DotDot },  { "{", Tok::LBrace },   { "}", Tok::RBrace },
        { "(", Tok::LParen },  { ")", Tok::RParen },   { "[", Tok::LBracket }, { "]", Tok::RBracket },
        { ",", Tok::Comma },   { ";", Tok::Semi },     { ":", Tok::Colon },    { ".", Tok::Dot },
        { "!", Tok::Bang },    { "?", Tok::Question }, { "&", Tok::And },      { "|", Tok::Or },
        { "~", Tok::Not },     { "=", Tok::Eq },       { "<", Tok::Lt },       { ">", Tok::Gt },
        { "∀", Tok::Bang }, { "∃", Tok::Question }, { "∧", Tok::And }, { "∨", Tok::Or },
        { "¬", Tok::Not },  { "⇒", Tok::Implies },  { "⇔", Tok::Iff }, { "≠", Tok::Neq },
        { "←", Tok::LArrow }, { "→", Tok::RArrow },
    };
    while ( i < src.size() )
    {
        const char c = src[ i ];
        if ( c == ' ' || c == '\t' || c == '\r' || c == '\n' )
        {
            advance( 1 );
            continue;
        }
        if ( starts( "//" ) )
        {
            while ( i < src.size() && src[ i ] != '\n' )
                advance( 1 );
            continue;
        }
        const SourceSpan span{ line, col };
        if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
        {
            const auto b = i;
            while ( i < src.size()
                    && ( std::isalnum( static_cast< unsigned char >( src[ i ] ) ) || src[ i ] == '_' || src[ i ] == '\'' ) )
                advance( 1 );
            out.push_back( { Tok::Ident, std::string( src.substr( b, i - b ) ), span } );
            continue;
        }
        if ( std::isdigit( static_cast< unsigned char >( c ) ) )
        {
            const auto b = i;
            while ( i < src.size() && std::isdigit( static_cast< unsigned char >( src[ i ] ) ) )
                advance( 1 );
            out.push_back( { Tok::Int, std::string( src.substr( b, i - b ) ), span } );
            continue;
        }
        bool matched = false;
        for ( const auto& [ text, kind ] : symbols )
            if ( starts( text ) )
            {
                out.push_back( { kind, std::string( text ), span } );
                advance( text.size() );
                matched = true;
                break;
            }
        if ( !matched )
        {
            std::string shown = ( static_cast< unsigned char >( c ) < 0x20 || static_cast< unsigned char >( c ) >= 0x7f )
                                    ? "byte " + std::to_string( static_cast< unsigned char >( c ) )
                                    : std::string( "'" ) + c + "'";
            fail( ErrorCode::Lexical, "unexpected character " + shown, span );
        }
    }
    out.push_back( { Tok::End, "", SourceSpan{ line, col } } );
    return out;
}

bool is_reserved( std::string_view s )
{
    static const std::set< std::string_view > words = { "vocabulary", "theory", "structure", "state", "type",
                                                        "fluent", "exogenous", "true", "false", "Init",
                                                        "Succ", "Time", "int" };
    return words.contains( s );
}

// --- raw syntax --------------------------------------------------------------

enum class RTermKind
{
    Unresolved,
    Variable,
    Apply,
    Element,
    Init,
    Succ,
};

struct RTerm
{
    std::string name;
    bool is_int = false;
    bool call = false; // written with parentheses
    std::vector< RTerm > args;
    SourceSpan span;
    RTermKind kind = RTermKind::Unresolved;
    int slot = -1;
    const SymbolDecl* decl = nullptr;
};

struct RVar
{
    std::string name;
    std::optional< std::string > sort;
    SourceSpan span;
    int slot = -1;
};

struct RFormula
{
    Formula::Kind kind = Formula::Kind::True;
    std::vector< RTerm > terms; // Atom: one application; Eq: two sides
    std::vector< RFormula > children;
    std::vector< RVar > vars;
    SourceSpan span;
    bool neq = false; // Eq written as ~=
    const SymbolDecl* decl = nullptr;
};

struct RRule
{
    std::vector< RVar > vars;
    RFormula head;
    std::optional< RFormula > body;
    SourceSpan span;
};

// Positions of each written argument in the normal form argument list.
std::vector< std::string > written_sorts( const SymbolDecl& d )
{
    auto sorts = d.arg_sorts;
    if ( d.written_time_position && !sorts.empty() )
    {
        auto time = sorts.back();
        sorts.pop_back();
        sorts.insert( sorts.begin() + static_cast< std::ptrdiff_t >( *d.written_time_position ), time );
    }
    return sorts;
}

template < typename T >
std::vector< T > to_normal_order( std::vector< T > written, const SymbolDecl& d )
{
    if ( d.written_time_position && !written.empty() )
    {
        const auto p = static_cast< std::ptrdiff_t >( *d.written_time_position );
        T time = std::move( written[ static_cast< std::size_t >( p ) ] );
        written.erase( written.begin() + p );
        written.push_back( std::move( time ) );
    }
    return written;
}

// --- sort inference ----------------------------------------------------------

struct Slots
{
    std::vector< int > parent;
    std::vector< std::optional< std::string > > sort;

    int fresh( std::optional< std::string > s = std::nullopt )
    {
        parent.push_back( static_cast< int >( parent.size() ) );
        sort.push_back( std::move( s ) );
        return parent.back();
    }
    int find( int a )
    {
        while ( parent[ static_cast< std::size_t >( a ) ] != a )
        {
            auto& p = parent[ static_cast< std::size_t >( a ) ];
            p = parent[ static_cast< std::size_t >( p ) ];
            a = p;
        }
        return a;
    }
    // Returns the conflicting pair on failure.
    std::optional< std::pair< std::string, std::string > > unify( int a, int b )
    {
        a = find( a );
        b = find( b );
        if ( a == b )
            return std::nullopt;
        auto& sa = sort[ static_cast< std::size_t >( a ) ];
        auto& sb = sort[ static_cast< std::size_t >( b ) ];
        if ( sa && sb && *sa != *sb )
            return std::make_pair( *sa, *sb );
        if ( !sa )
            sa = sb;
        parent[ static_cast< std::size_t >( b ) ] = a;
        return std::nullopt;
    }
    const std::optional< std::string >& sort_of( int a ) { return sort[ static_cast< std::size_t >( find( a ) ) ]; }
};

class Resolver
{
    const Vocabulary& _voc;
    Slots _slots;
    std::vector< std::pair< std::string, int > > _scope;

public:
    explicit Resolver( const Vocabulary& voc ) : _voc( voc ) {}

    void push_fixed( const Variable& v ) { _scope.emplace_back( v.name, _slots.fresh( v.sort ) ); }

    FormulaPtr formula( RFormula& f )
    {
        infer( f );
        return build( f );
    }

    TermPtr term( RTerm& t )
    {
        infer( t );
        return build( t );
    }

    Rule rule( RRule& r )
    {
        const auto mark = _scope.size();
        bind( r.vars );
        infer_head( r.head );
        if ( r.body )
            infer( *r.body );
        Rule out;
        for ( auto& v : r.vars )
            out.vars.push_back( variable( v ) );
        out.head = build( r.head );
        out.body = r.body ? build( *r.body ) : Formula::truth( true );
        _scope.resize( mark );
        return out;
    }

private:
    void unify( int a, int b, SourceSpan span )
    {
        if ( auto clash = _slots.unify( a, b ) )
            fail( ErrorCode::Type, "sort mismatch: " + clash->first + " vs " + clash->second, span );
    }

    void bind( std::vector< RVar >& vars )
    {
        for ( auto& v : vars )
        {
            if ( v.sort && !_voc.find_sort( *v.sort ) )
                fail( ErrorCode::Scope, "unknown sort " + *v.sort, v.span );
            v.slot = _slots.fresh( v.sort );
            _scope.emplace_back( v.name, v.slot );
        }
    }

    std::optional< int > lookup( const std::string& name ) const
    {
        for ( auto it = _scope.rbegin(); it != _scope.rend(); ++it )
            if ( it->first == name )
                return it->second;
        return std::nullopt;
    }

    void infer_args( std::vector< RTerm >& args, const SymbolDecl& d, SourceSpan span )
    {
        const auto sorts = written_sorts( d );
        if ( args.size() != sorts.size() )
            fail( ErrorCode::Type,
                  d.name + " expects " + std::to_string( sorts.size() ) + " arguments, got " + std::to_string( args.size() ),
                  span );
        for ( std::size_t i = 0; i < args.size(); ++i )
            unify( infer( args[ i ] ), _slots.fresh( sorts[ i ] ), args[ i ].span );
    }

    int infer( RTerm& t )
    {
        if ( t.is_int )
        {
            t.kind = RTermKind::Element;
            return t.slot = _slots.fresh();
        }
        if ( t.name == init_name && !t.call )
        {
            t.kind = RTermKind::Init;
            return t.slot = _slots.fresh( std::string( time_sort_name ) );
        }
        if ( t.name == succ_name )
        {
            if ( t.args.size() != 1 )
                fail( ErrorCode::Type, "Succ expects one argument", t.span );
            t.kind = RTermKind::Succ;
            t.slot = _slots.fresh( std::string( time_sort_name ) );
            unify( infer( t.args[ 0 ] ), t.slot, t.args[ 0 ].span );
            return t.slot;
        }
        if ( !t.call )
            if ( auto v = lookup( t.name ) )
            {
                t.kind = RTermKind::Variable;
                return t.slot = *v;
            }
        if ( const auto* d = _voc.find_symbol( t.name ) )
        {
            if ( d->is_predicate() )
                fail( ErrorCode::Type, "predicate " + t.name + " used as a term", t.span );
            t.kind = RTermKind::Apply;
            t.decl = d;
            infer_args( t.args, *d, t.span );
            return t.slot = _slots.fresh( *d->out_sort );
        }
        if ( t.call )
            fail( ErrorCode::Scope, "unknown function " + t.name, t.span );
        t.kind = RTermKind::Element;
        return t.slot = _slots.fresh();
    }

    void infer_atom( RFormula& f )
    {
        auto& app = f.terms[ 0 ];
        if ( !app.call && lookup( app.name ) )
            fail( ErrorCode::Type, "variable " + app.name + " used as a formula", app.span );
        const auto* d = _voc.find_symbol( app.name );
        if ( !d )
            fail( ErrorCode::Scope, "unknown predicate " + app.name, app.span );
        if ( d->is_function() )
            fail( ErrorCode::Type, "function " + app.name + " used as a formula", app.span );
        f.decl = d;
        infer_args( app.args, *d, app.span );
    }

    void infer_head( RFormula& head )
    {
        if ( head.kind == Formula::Kind::Atom )
            return infer_atom( head );
        if ( head.kind == Formula::Kind::Eq && !head.neq )
        {
            auto& lhs = head.terms[ 0 ];
            const auto* d = _voc.find_symbol( lhs.name );
            if ( !d || d->is_predicate() || lookup( lhs.name ) )
                fail( ErrorCode::Syntax, "rule head must be an atom or f(...) = term", head.span );
            unify( infer( lhs ), infer( head.terms[ 1 ] ), head.span );
            return;
        }
        fail( ErrorCode::Syntax, "rule head must be an atom or f(...) = term", head.span );
    }

    void infer( RFormula& f )
    {
        using K = Formula::Kind;
        switch ( f.kind )
        {
        case K::True:
        case K::False: return;
        case K::Atom: return infer_atom( f );
        case K::Eq: unify( infer( f.terms[ 0 ] ), infer( f.terms[ 1 ] ), f.span ); return;
        case K::Forall:
        case K::Exists:
        {
            const auto mark = _scope.size();
            bind( f.vars );
            infer( f.children[ 0 ] );
            _scope.resize( mark );
            return;
        }
        default:
            for ( auto& c : f.children )
                infer( c );
        }
    }

    std::string sort_of( int slot, const std::string& what, SourceSpan span )
    {
        const auto& s = _slots.sort_of( slot );
        if ( !s )
            fail( ErrorCode::Type, "cannot infer the sort of " + what, span );
        return *s;
    }

    Variable variable( const RVar& v ) { return Variable{ v.name, sort_of( v.slot, "variable " + v.name, v.span ) }; }

    std::vector< TermPtr > build_args( const std::vector< RTerm >& args, const SymbolDecl& d )
    {
        std::vector< TermPtr > out;
        for ( const auto& a : args )
            out.push_back( build( a ) );
        return to_normal_order( std::move( out ), d );
    }

    TermPtr build( const RTerm& t )
    {
        switch ( t.kind )
        {
        case RTermKind::Init: return Term::init();
        case RTermKind::Succ: return Term::succ( build( t.args[ 0 ] ) );
        case RTermKind::Variable: return Term::variable( t.name, sort_of( t.slot, "variable " + t.name, t.span ) );
        case RTermKind::Apply: return Term::apply( t.name, build_args( t.args, *t.decl ), *t.decl->out_sort );
        case RTermKind::Element: return Term::element( t.name, sort_of( t.slot, "element " + t.name, t.span ) );
        case RTermKind::Unresolved: break;
        }
        fail( ErrorCode::Syntax, "unresolved term " + t.name, t.span );
    }

    FormulaPtr build( const RFormula& f )
    {
        using K = Formula::Kind;
        switch ( f.kind )
        {
        case K::True: return Formula::truth( true );
        case K::False: return Formula::truth( false );
        case K::Atom: return Formula::atom( f.terms[ 0 ].name, build_args( f.terms[ 0 ].args, *f.decl ) );
        case K::Eq:
        {
            auto eq = Formula::eq( build( f.terms[ 0 ] ), build( f.terms[ 1 ] ) );
            return f.neq ? Formula::negation( eq ) : eq;
        }
        case K::Not: return Formula::negation( build( f.children[ 0 ] ) );
        case K::Forall:
        case K::Exists:
        {
            std::vector< Variable > vars;
            for ( const auto& v : f.vars )
                vars.push_back( variable( v ) );
            auto body = build( f.children[ 0 ] );
            return std::make_shared< Formula >( Formula{ f.kind, {}, {}, { std::move( body ) }, std::move( vars ) } );
        }
        default:
        {
            std::vector< FormulaPtr > kids;
            for ( const auto& c : f.children )
                kids.push_back( build( c ) );
            return std::make_shared< Formula >( Formula{ f.kind, {}, {}, std::move( kids ), {} } );
        }
        }
    }
};

// --- parser --------------------------------------------------------------------

struct RawEntry
{
    std::string name;
    std::string mode; // "", "ct", "cf"
    SourceSpan span;
    // value forms
    std::optional< bool > boolean;
    std::optional< Token > single; // c = e
    struct Item
    {
        std::vector< Token > tuple;
        std::optional< Token > result;
        bool parenthesized = false;
        std::optional< std::pair< Token, Token > > range;
        SourceSpan span;
    };
    std::vector< Item > items;
};

class Parser
{
    std::vector< Token > _toks;
    std::size_t _pos = 0;
    int _depth = 0;

public:
    explicit Parser( std::vector< Token > toks ) : _toks( std::move( toks ) ) {}

    const Token& peek( std::size_t k = 0 ) const { return _toks[ std::min( _pos + k, _toks.size() - 1 ) ]; }
    bool at( Tok k ) const { return peek().kind == k; }
    bool at_word( std::string_view w ) const { return at( Tok::Ident ) && peek().text == w; }
    bool at_end() const { return at( Tok::End ); }
    Token next() { return _toks[ std::min( _pos++, _toks.size() - 1 ) ]; }

    bool accept( Tok k )
    {
        if ( !at( k ) )
            return false;
        ++_pos;
        return true;
    }

    Token expect( Tok k, std::string_view context = {} )
    {
        if ( !at( k ) )
        {
            std::string msg = "expected " + std::string( describe( k ) );
            if ( !context.empty() )
                msg += " " + std::string( context );
            msg += ", found " + ( at( Tok::End ) ? std::string( "end of input" ) : "'" + peek().text + "'" );
            fail( ErrorCode::Syntax, msg, peek().span );
        }
        return next();
    }

    Token expect_ident( std::string_view what )
    {
        if ( !at( Tok::Ident ) )
            fail( ErrorCode::Syntax,
                  "expected " + std::string( what ) + ", found "
                      + ( at( Tok::End ) ? std::string( "end of input" ) : "'" + peek().text + "'" ),
                  peek().span );
        return next();
    }

    void expect_word( std::string_view w )
    {
        if ( !at_word( w ) )
            fail( ErrorCode::Syntax, "expected '" + std::string( w ) + "'", peek().span );
        next();
    }

    // Skips to the next top-level block keyword.
    void recover()
    {
        int depth = 0;
        while ( !at_end() )
        {
            if ( depth == 0 && ( at_word( "vocabulary" ) || at_word( "theory" ) || at_word( "structure" ) || at_word( "state" ) ) )
                return;
            if ( at( Tok::LBrace ) )
                ++depth;
            if ( at( Tok::RBrace ) && depth > 0 )
                --depth;
            next();
        }
    }

    // --- formulas

    std::vector< RVar > quant_vars()
    {
        std::vector< RVar > vars;
        do
        {
            auto name = expect_ident( "a variable" );
            if ( is_reserved( name.text ) )
                fail( ErrorCode::Syntax, "reserved word " + name.text + " used as a variable", name.span );
            RVar v{ name.text, std::nullopt, name.span };
            if ( accept( Tok::LBracket ) )
            {
                v.sort = expect_ident( "a sort" ).text;
                expect( Tok::RBracket );
            }
            vars.push_back( std::move( v ) );
            accept( Tok::Comma );
        } while ( at( Tok::Ident ) );
        expect( Tok::Colon, "after quantified variables" );
        return vars;
    }

    RFormula formula() { return iff(); }

    RFormula iff()
    {
        auto lhs = implies();
        while ( at( Tok::Iff ) )
        {
            const auto span = next().span;
            auto rhs = implies();
            RFormula f;
            f.kind = Formula::Kind::Iff;
            f.span = span;
            f.children = { std::move( lhs ), std::move( rhs ) };
            lhs = std::move( f );
        }
        return lhs;
    }

    RFormula implies()
    {
        auto lhs = disjunction();
        if ( !at( Tok::Implies ) )
            return lhs;
        const auto span = next().span;
        auto rhs = implies();
        RFormula f;
        f.kind = Formula::Kind::Implies;
        f.span = span;
        f.children = { std::move( lhs ), std::move( rhs ) };
        return f;
    }

    RFormula nary( Formula::Kind kind, Tok op, RFormula ( Parser::*sub )() )
    {
        auto first = ( this->*sub )();
        if ( !at( op ) )
            return first;
        RFormula f;
        f.kind = kind;
        f.span = first.span;
        f.children.push_back( std::move( first ) );
        while ( accept( op ) )
            f.children.push_back( ( this->*sub )() );
        return f;
    }

    RFormula disjunction() { return nary( Formula::Kind::Or, Tok::Or, &Parser::conjunction ); }
    RFormula conjunction() { return nary( Formula::Kind::And, Tok::And, &Parser::unary ); }

    RFormula unary()
    {
        const auto span = peek().span;
        struct Depth
        {
            int& d;
            explicit Depth( int& x ) : d( ++x ) {}
            ~Depth() { --d; }
        } depth( _depth );
        if ( _depth > 400 )
            fail( ErrorCode::Syntax, "formula nested too deeply", span );
        if ( accept( Tok::Not ) )
        {
            RFormula f;
            f.kind = Formula::Kind::Not;
            f.span = span;
            f.children.push_back( unary() );
            return f;
        }
        if ( at( Tok::Bang ) || at( Tok::Question ) )
        {
            const bool all = next().kind == Tok::Bang;
            RFormula f;
            f.kind = all ? Formula::Kind::Forall : Formula::Kind::Exists;
            f.span = span;
            f.vars = quant_vars();
            f.children.push_back( formula() );
            return f;
        }
        if ( accept( Tok::LParen ) )
        {
            auto f = formula();
            expect( Tok::RParen );
            return f;
        }
        if ( at_word( "true" ) || at_word( "false" ) )
        {
            RFormula f;
            f.kind = next().text == "true" ? Formula::Kind::True : Formula::Kind::False;
            f.span = span;
            return f;
        }
        auto lhs = term();
        if ( at( Tok::Eq ) || at( Tok::Neq ) )
        {
            RFormula f;
            f.kind = Formula::Kind::Eq;
            f.neq = next().kind == Tok::Neq;
            f.span = span;
            f.terms.push_back( std::move( lhs ) );
            f.terms.push_back( term() );
            return f;
        }
        if ( lhs.is_int )
            fail( ErrorCode::Syntax, "expected a formula, found integer " + lhs.name, lhs.span );
        RFormula f;
        f.kind = Formula::Kind::Atom;
        f.span = span;
        f.terms.push_back( std::move( lhs ) );
        return f;
    }

    RTerm term()
    {
        struct Depth
        {
            int& d;
            explicit Depth( int& x ) : d( ++x ) {}
            ~Depth() { --d; }
        } depth( _depth );
        if ( _depth > 400 )
            fail( ErrorCode::Syntax, "term nested too deeply", peek().span );
        if ( at( Tok::Int ) )
        {
            auto t = next();
            RTerm r;
            r.name = t.text;
            r.is_int = true;
            r.span = t.span;
            return r;
        }
        auto name = expect_ident( "a term" );
        if ( name.text == "true" || name.text == "false" )
            fail( ErrorCode::Syntax, "unexpected '" + name.text + "' in term position", name.span );
        RTerm r;
        r.name = name.text;
        r.span = name.span;
        if ( accept( Tok::LParen ) )
        {
            r.call = true;
            if ( !at( Tok::RParen ) )
            {
                r.args.push_back( term() );
                while ( accept( Tok::Comma ) )
                    r.args.push_back( term() );
            }
            expect( Tok::RParen );
        }
        return r;
    }

    RRule rule()
    {
        RRule r;
        r.span = peek().span;
        if ( accept( Tok::Bang ) )
            r.vars = quant_vars();
        r.head = unary_head();
        if ( accept( Tok::LArrow ) )
            r.body = formula();
        expect( Tok::Dot, "at the end of a rule" );
        return r;
    }

    RFormula unary_head()
    {
        const auto span = peek().span;
        auto lhs = term();
        RFormula f;
        f.span = span;
        if ( accept( Tok::Eq ) )
        {
            f.kind = Formula::Kind::Eq;
            f.terms.push_back( std::move( lhs ) );
            f.terms.push_back( term() );
            return f;
        }
        f.kind = Formula::Kind::Atom;
        f.terms.push_back( std::move( lhs ) );
        return f;
    }

    // --- structure entries

    Token element()
    {
        if ( at( Tok::Int ) || at( Tok::Ident ) )
            return next();
        fail( ErrorCode::Syntax, "expected an element", peek().span );
    }

    RawEntry entry()
    {
        RawEntry e;
        auto name = expect_ident( "a sort or symbol name" );
        e.name = name.text;
        e.span = name.span;
        if ( accept( Tok::Lt ) )
        {
            auto mode = expect_ident( "ct or cf" );
            if ( mode.text != "ct" && mode.text != "cf" )
                fail( ErrorCode::Syntax, "expected ct or cf", mode.span );
            e.mode = mode.text;
            expect( Tok::Gt );
        }
        expect( Tok::Eq, "in interpretation" );
        if ( at_word( "true" ) || at_word( "false" ) )
        {
            e.boolean = next().text == "true";
            return e;
        }
        if ( !at( Tok::LBrace ) )
        {
            e.single = element();
            return e;
        }
        next();
        while ( !at( Tok::RBrace ) )
        {
            RawEntry::Item item;
            item.span = peek().span;
            if ( accept( Tok::LParen ) )
            {
                item.parenthesized = true;
                if ( !at( Tok::RParen ) )
                {
                    item.tuple.push_back( element() );
                    while ( accept( Tok::Comma ) )
                        item.tuple.push_back( element() );
                }
                expect( Tok::RParen );
            }
            else
            {
                auto first = element();
                if ( accept( Tok::DotDot ) )
                {
                    auto last = element();
                    item.range = std::make_pair( first, last );
                }
                else
                    item.tuple.push_back( first );
            }
            if ( accept( Tok::RArrow ) )
                item.result = element();
            e.items.push_back( std::move( item ) );
            if ( !accept( Tok::Semi ) && !accept( Tok::Comma ) )
                break;
        }
        expect( Tok::RBrace, "closing the interpretation" );
        return e;
    }
};

// --- block semantics -----------------------------------------------------------

class ProgramBuilder
{
    SourceProgram& _prog;
    std::vector< Issue >& _diags;

public:
    ProgramBuilder( SourceProgram& prog, std::vector< Issue >& diags ) : _prog( prog ), _diags( diags ) {}

    void run( Parser& p )
    {
        while ( !p.at_end() )
        {
            try
            {
                if ( p.at_word( "vocabulary" ) )
                    vocabulary( p );
                else if ( p.at_word( "theory" ) )
                    theory( p );
                else if ( p.at_word( "structure" ) || p.at_word( "state" ) )
                    structure( p );
                else
                    fail( ErrorCode::Syntax, "expected 'vocabulary', 'theory', 'structure' or 'state', found '" + p.peek().text + "'",
                          p.peek().span );
            }
            catch ( const ParseFailure& f )
            {
                _diags.push_back( f.issue );
                if ( !p.at_end() )
                    p.next();
                p.recover();
            }
        }
    }

private:
    void check_block_name( const Token& name, SourceProgram::BlockKind kind )
    {
        if ( is_reserved( name.text ) )
            fail( ErrorCode::Syntax, "reserved word " + name.text + " used as a block name", name.span );
        const bool dup = ( kind == SourceProgram::BlockKind::Vocabulary && _prog.find_vocabulary( name.text ) )
                         || ( kind == SourceProgram::BlockKind::Theory && _prog.find_theory( name.text ) )
                         || ( kind == SourceProgram::BlockKind::Structure && _prog.find_structure( name.text ) );
        if ( dup )
            fail( ErrorCode::Scope, "duplicate block name " + name.text, name.span );
    }

    std::vector< std::string > sort_list( Parser& p )
    {
        std::vector< std::string > out;
        if ( !p.accept( Tok::LParen ) )
            return out;
        if ( !p.at( Tok::RParen ) )
        {
            out.push_back( p.expect_ident( "a sort" ).text );
            while ( p.accept( Tok::Comma ) )
                out.push_back( p.expect_ident( "a sort" ).text );
        }
        p.expect( Tok::RParen );
        return out;
    }

    void vocabulary( Parser& p )
    {
        p.next();
        const auto name = p.expect_ident( "a vocabulary name" );
        check_block_name( name, SourceProgram::BlockKind::Vocabulary );
        p.expect( Tok::LBrace );
        Vocabulary raw( name.text );
        std::map< std::string, SourceSpan > spans;
        auto add = [ & ]( auto fn, const Token& at ) {
            try
            {
                fn();
            }
            catch ( const Error& e )
            {
                fail( e.code(), e.what(), at.span );
            }
        };
        while ( !p.at( Tok::RBrace ) )
        {
            if ( p.at_word( "type" ) )
            {
                p.next();
                const auto sort = p.expect_ident( "a sort name" );
                if ( is_reserved( sort.text ) && sort.text != time_sort_name )
                    fail( ErrorCode::Syntax, "reserved word " + sort.text + " used as a sort", sort.span );
                Sort s{ sort.text, is_time_sort( sort.text ) ? SortKind::Time : SortKind::Enumerated };
                if ( p.accept( Tok::Colon ) )
                {
                    p.expect_word( "int" );
                    if ( s.kind == SortKind::Time )
                        fail( ErrorCode::Syntax, "Time cannot be declared as int", sort.span );
                    s.kind = SortKind::IntRange;
                }
                add( [ & ] { raw.add_sort( std::move( s ) ); }, sort );
                continue;
            }
            const bool fluent = p.at_word( "fluent" );
            if ( fluent )
                p.next();
            const auto sym = p.expect_ident( "a declaration" );
            if ( is_reserved( sym.text ) )
                fail( ErrorCode::Syntax, "reserved word " + sym.text + " cannot be declared", sym.span );
            SymbolDecl d;
            d.name = sym.text;
            d.arg_sorts = sort_list( p );
            if ( p.accept( Tok::Colon ) )
            {
                if ( fluent )
                    fail( ErrorCode::Syntax, "a fluent is a predicate", sym.span );
                d.out_sort = p.expect_ident( "an output sort" ).text;
            }
            if ( p.at_word( "exogenous" ) )
            {
                p.next();
                d.exogenous = true;
            }
            if ( fluent )
                d.arg_sorts.emplace_back( time_sort_name );
            spans[ d.name ] = sym.span;
            add( [ & ] { raw.add_symbol( std::move( d ) ); }, sym );
            if ( fluent )
                raw.add_fluent( sym.text );
        }
        p.expect( Tok::RBrace );

        VocabularyPtr result;
        if ( raw.has_time_sort() )
        {
            auto v = validate_vocabulary( raw );
            if ( !v.ok() )
            {
                for ( auto issue : v.errors )
                {
                    if ( issue.span.line == 0 )
                        issue.span = name.span;
                    _diags.push_back( std::move( issue ) );
                }
                return;
            }
            result = v.vocabulary;
        }
        else
        {
            auto plain = std::make_shared< Vocabulary >( raw );
            for ( const auto& d : raw.symbols() )
            {
                auto check = [ & ]( const std::string& s ) {
                    if ( !raw.find_sort( s ) )
                        fail( ErrorCode::Scope, "symbol " + d.name + " uses undeclared sort " + s, spans[ d.name ] );
                };
                for ( const auto& s : d.arg_sorts )
                    check( s );
                if ( d.out_sort )
                    check( *d.out_sort );
            }
            if ( !raw.fluents().empty() )
                fail( ErrorCode::NoTimeSort, "fluents need a Time sort", name.span );
            result = plain;
        }
        VocabularyPtr expanded;
        try
        {
            expanded = expand_fluent_vocabulary( result );
        }
        catch ( const Error& e )
        {
            fail( e.code(), e.what(), name.span );
        }
        _prog.blocks.push_back( { SourceProgram::BlockKind::Vocabulary, _prog.vocabularies.size(), name.span } );
        _prog.vocabularies.push_back( result );
        _prog.expanded_vocabularies.push_back( expanded );
    }

    VocabularyPtr header_vocabulary( Parser& p, Token& name, SourceProgram::BlockKind kind )
    {
        p.next();
        name = p.expect_ident( "a block name" );
        check_block_name( name, kind );
        p.expect( Tok::Colon );
        const auto vname = p.expect_ident( "a vocabulary name" );
        auto voc = _prog.theory_vocabulary( vname.text );
        if ( !voc )
            fail( ErrorCode::Scope, "unknown vocabulary " + vname.text, vname.span );
        return voc;
    }

    void theory( Parser& p )
    {
        Token name;
        auto voc = header_vocabulary( p, name, SourceProgram::BlockKind::Theory );
        p.expect( Tok::LBrace );
        Theory t;
        t.name = name.text;
        t.vocabulary = voc;
        std::vector< Issue > local;
        while ( !p.at( Tok::RBrace ) )
        {
            if ( p.accept( Tok::LBrace ) )
            {
                Definition def;
                while ( !p.at( Tok::RBrace ) )
                {
                    auto raw = p.rule();
                    try
                    {
                        Resolver r( *voc );
                        def.rules.push_back( r.rule( raw ) );
                    }
                    catch ( const ParseFailure& f )
                    {
                        local.push_back( f.issue );
                    }
                }
                p.expect( Tok::RBrace );
                t.definitions.push_back( std::move( def ) );
                continue;
            }
            auto raw = p.formula();
            p.expect( Tok::Dot, "at the end of a sentence" );
            try
            {
                Resolver r( *voc );
                t.sentences.push_back( r.formula( raw ) );
            }
            catch ( const ParseFailure& f )
            {
                local.push_back( f.issue );
            }
        }
        p.expect( Tok::RBrace );
        if ( !local.empty() )
        {
            _diags.insert( _diags.end(), local.begin(), local.end() );
            return;
        }
        _prog.blocks.push_back( { SourceProgram::BlockKind::Theory, _prog.theories.size(), name.span } );
        _prog.theories.push_back( std::move( t ) );
    }

    static std::optional< long > as_int( const Token& t )
    {
        if ( t.kind != Tok::Int || t.text.size() > 9 )
            return std::nullopt;
        return std::stol( t.text );
    }

    std::vector< std::string > sort_elements( const RawEntry& e, bool time )
    {
        std::vector< std::string > out;
        if ( e.single )
            out.push_back( e.single->text );
        for ( const auto& item : e.items )
        {
            if ( item.result || item.parenthesized )
                fail( ErrorCode::Syntax, "sort " + e.name + " is interpreted by a set of elements", item.span );
            if ( item.range )
            {
                auto lo = as_int( item.range->first );
                auto hi = as_int( item.range->second );
                if ( !lo || !hi )
                    fail( ErrorCode::Syntax, "ranges need integer bounds below 10^9", item.span );
                if ( *hi - *lo > 1000000 )
                    fail( ErrorCode::Syntax, "range is too large", item.span );
                for ( long k = *lo; k <= *hi; ++k )
                    out.push_back( std::to_string( k ) );
            }
            else
                out.push_back( item.tuple[ 0 ].text );
        }
        if ( time )
            for ( std::size_t k = 0; k < out.size(); ++k )
                if ( out[ k ] != std::to_string( k ) )
                    fail( ErrorCode::Type, "Time must be interpreted as { 0..n }", e.span );
        return out;
    }

    std::vector< int > tuple_indices( const Structure& s, const SymbolDecl& d, const std::vector< Token >& written,
                                      SourceSpan span )
    {
        const auto sorts = written_sorts( d );
        if ( written.size() != sorts.size() )
            fail( ErrorCode::Type, d.name + " expects tuples of length " + std::to_string( sorts.size() ), span );
        std::vector< int > idx;
        for ( std::size_t i = 0; i < written.size(); ++i )
        {
            const auto sort = *s.vocabulary().sort_index( sorts[ i ] );
            if ( !s.has_domain( sort ) )
                fail( ErrorCode::UnboundedSort, "sort " + sorts[ i ] + " has no interpretation in this structure", span );
            auto e = s.element_index( sort, written[ i ].text );
            if ( !e )
                fail( ErrorCode::UnknownElement, "element " + written[ i ].text + " is not in sort " + sorts[ i ],
                      written[ i ].span );
            idx.push_back( *e );
        }
        return to_normal_order( std::move( idx ), d );
    }

    int element_of( const Structure& s, const std::string& sort_name, const Token& t )
    {
        const auto sort = *s.vocabulary().sort_index( sort_name );
        if ( !s.has_domain( sort ) )
            fail( ErrorCode::UnboundedSort, "sort " + sort_name + " has no interpretation in this structure", t.span );
        auto e = s.element_index( sort, t.text );
        if ( !e )
            fail( ErrorCode::UnknownElement, "element " + t.text + " is not in sort " + sort_name, t.span );
        return *e;
    }

    void structure( Parser& p )
    {
        const bool state = p.at_word( "state" );
        Token name;
        auto voc = header_vocabulary( p, name, SourceProgram::BlockKind::Structure );
        std::string written_voc = voc->name();
        if ( state )
            voc = derive_vocabularies( voc ).single_state;
        p.expect( Tok::LBrace );
        std::vector< RawEntry > entries;
        while ( !p.at( Tok::RBrace ) )
            entries.push_back( p.entry() );
        p.expect( Tok::RBrace );

        Structure s( voc, name.text );
        std::set< std::string > seen;
        for ( const auto& e : entries )
        {
            const auto key = e.name + "<" + e.mode + ">";
            if ( !seen.insert( key ).second )
                fail( ErrorCode::Syntax, e.name + " is interpreted twice", e.span );
            if ( auto sort = voc->sort_index( e.name ) )
            {
                if ( !e.mode.empty() || e.boolean )
                    fail( ErrorCode::Syntax, "sort " + e.name + " is interpreted by a set of elements", e.span );
                s.set_domain( *sort, sort_elements( e, voc->sorts()[ *sort ].kind == SortKind::Time ) );
            }
        }
        for ( const auto& e : entries )
        {
            if ( voc->sort_index( e.name ) )
                continue;
            const auto sym = voc->symbol_index( e.name );
            if ( !sym )
                fail( ErrorCode::Scope, "unknown symbol " + e.name, e.span );
            const auto& d = voc->symbols()[ *sym ];
            if ( is_ltc_symbol_name( d.name ) )
                fail( ErrorCode::Syntax, d.name + " is interpreted implicitly", e.span );
            if ( !s.has_table( *sym ) )
                fail( ErrorCode::UnboundedSort, "symbol " + d.name + " needs interpretations of all its sorts", e.span );
            if ( d.is_function() )
                function_entry( s, *sym, d, e );
            else
                predicate_entry( s, *sym, d, e, seen );
        }
        _prog.blocks.push_back( { SourceProgram::BlockKind::Structure, _prog.structures.size(), name.span } );
        _prog.structures.push_back( StructureBlock{ std::move( s ), written_voc, state } );
    }

    void function_entry( Structure& s, std::size_t sym, const SymbolDecl& d, const RawEntry& e )
    {
        if ( !e.mode.empty() || e.boolean )
            fail( ErrorCode::Syntax, "function " + d.name + " takes a graph { (args) -> value }", e.span );
        if ( e.single )
        {
            if ( d.arity() != 0 )
                fail( ErrorCode::Type, "function " + d.name + " is not a constant", e.span );
            s.set_value( sym, std::size_t{ 0 }, element_of( s, *d.out_sort, *e.single ) );
            return;
        }
        for ( const auto& item : e.items )
        {
            if ( !item.result || item.range )
                fail( ErrorCode::Syntax, "function entries have the form (args) -> value", item.span );
            const auto idx = tuple_indices( s, d, item.tuple, item.span );
            const auto i = s.tuple_index( sym, idx );
            const int v = element_of( s, *d.out_sort, *item.result );
            if ( s.value( sym, i ) >= 0 && s.value( sym, i ) != v )
                fail( ErrorCode::Type, "function " + d.name + " has two values for one argument tuple", item.span );
            s.set_value( sym, i, v );
        }
    }

    void predicate_entry( Structure& s, std::size_t sym, const SymbolDecl& d, const RawEntry& e,
                          const std::set< std::string >& seen )
    {
        if ( e.mode.empty() && ( seen.contains( d.name + "<ct>" ) || seen.contains( d.name + "<cf>" ) ) )
            fail( ErrorCode::Syntax, d.name + " is given both two-valued and three-valued", e.span );
        if ( e.single )
            fail( ErrorCode::Syntax, "predicate " + d.name + " takes a set of tuples or true/false", e.span );
        if ( e.mode.empty() )
            s.fill( sym, TruthValue::False );
        const TruthValue v = e.mode == "cf" ? TruthValue::False : TruthValue::True;
        if ( e.boolean )
        {
            if ( d.arity() != 0 )
                fail( ErrorCode::Type, "only nullary predicates take true/false", e.span );
            if ( !e.mode.empty() )
                fail( ErrorCode::Syntax, "write " + d.name + " = true or false", e.span );
            s.set_truth( sym, std::size_t{ 0 }, from_bool( *e.boolean ) );
            return;
        }
        for ( const auto& item : e.items )
        {
            if ( item.result || item.range )
                fail( ErrorCode::Syntax, "predicate entries are tuples", item.span );
            const auto i = s.tuple_index( sym, tuple_indices( s, d, item.tuple, item.span ) );
            if ( !e.mode.empty() && s.truth( sym, i ) != TruthValue::Unknown && s.truth( sym, i ) != v )
                fail( ErrorCode::Type, d.name + " has a tuple that is both certainly true and certainly false", item.span );
            s.set_truth( sym, i, v );
        }
    }
};

} // namespace

ParseResult parse( std::string_view text, const SourceProgram* context )
{
    ParseResult result;
    SourceProgram prog;
    if ( context )
    {
        prog = *context;
        prog.blocks.clear();
    }
    try
    {
        Parser p( lex( text ) );
        ProgramBuilder( prog, result.diagnostics ).run( p );
    }
    catch ( const ParseFailure& f )
    {
        result.diagnostics.push_back( f.issue );
    }
    catch ( const Error& e )
    {
        result.diagnostics.push_back( Issue{ e.code(), e.what(), {} } );
    }
    catch ( const std::exception& e )
    {
        result.diagnostics.push_back( Issue{ ErrorCode::Syntax, e.what(), {} } );
    }
    if ( result.diagnostics.empty() )
        result.program = std::move( prog );
    return result;
}

SourceProgram parse_or_throw( std::string_view text, const SourceProgram* context )
{
    auto r = parse( text, context );
    if ( !r.ok() )
        throw Error( std::move( r.diagnostics ) );
    return std::move( *r.program );
}

namespace
{

template < typename Out, typename Fn >
Out parse_fragment( std::string_view text, const VocabularyPtr& vocabulary, const std::vector< Variable >& scope, Fn fn )
{
    try
    {
        Parser p( lex( text ) );
        Resolver r( *vocabulary );
        for ( const auto& v : scope )
            r.push_fixed( v );
        Out out = fn( p, r );
        if ( !p.at_end() )
            fail( ErrorCode::Syntax, "unexpected '" + p.peek().text + "' after the expression", p.peek().span );
        return out;
    }
    catch ( const ParseFailure& f )
    {
        throw Error( std::vector< Issue >{ f.issue } );
    }
}

} // namespace

FormulaPtr parse_formula( std::string_view text, const VocabularyPtr& vocabulary, const std::vector< Variable >& scope )
{
    return parse_fragment< FormulaPtr >( text, vocabulary, scope, []( Parser& p, Resolver& r ) {
        auto raw = p.formula();
        p.accept( Tok::Dot );
        return r.formula( raw );
    } );
}

TermPtr parse_term( std::string_view text, const VocabularyPtr& vocabulary, const std::vector< Variable >& scope )
{
    return parse_fragment< TermPtr >( text, vocabulary, scope, []( Parser& p, Resolver& r ) {
        auto raw = p.term();
        return r.term( raw );
    } );
}

} // namespace ltc
