#include "compiled.hpp"

#include <algorithm>

namespace ltc::detail
{

namespace
{

int depth_in( const TermPtr& t, const std::string& name, int above )
{
    if ( t->kind == Term::Kind::Variable )
        return t->name == name ? above : -1;
    const int inc = t->kind == Term::Kind::Succ ? 1 : 0;
    int best = -1;
    for ( const auto& a : t->args )
        best = std::max( best, depth_in( a, name, above + inc ) );
    return best;
}

int depth_in( const FormulaPtr& f, const std::string& name )
{
    if ( f->is_quantifier() )
        for ( const auto& v : f->vars )
            if ( v.name == name )
                return -1; // shadowed
    int best = -1;
    for ( const auto& t : f->terms )
        best = std::max( best, depth_in( t, name, 0 ) );
    for ( const auto& c : f->children )
        best = std::max( best, depth_in( c, name ) );
    return best;
}

} // namespace

int succ_depth( const TermPtr& t, const std::string& name )
{
    return std::max( 0, depth_in( t, name, 0 ) );
}

int succ_depth( const FormulaPtr& f, const std::string& name )
{
    return std::max( 0, depth_in( f, name ) );
}

int Compiler::sort_index( const std::string& sort ) const
{
    const auto idx = _voc.sort_index( sort );
    if ( !idx )
        throw Error( ErrorCode::InvalidArgument, "unknown sort " + sort );
    if ( !_domains.has_domain( *idx ) )
        throw Error( ErrorCode::UnboundedSort, "sort " + sort + " has no domain" );
    return static_cast< int >( *idx );
}

int Compiler::bind( const Variable& v )
{
    const int slot = static_cast< int >( _scope.size() );
    _scope.emplace_back( v.name, slot );
    _max_slots = std::max( _max_slots, slot + 1 );
    return slot;
}

QVar Compiler::quantified( const Variable& v, int depth )
{
    const int sort = sort_index( v.sort );
    int range = static_cast< int >( _domains.domain( static_cast< std::size_t >( sort ) ).size() );
    if ( is_time_sort( v.sort ) )
        range -= depth;
    return QVar{ bind( v ), sort, range };
}

CTerm Compiler::compile( const TermPtr& t )
{
    CTerm out;
    switch ( t->kind )
    {
    case Term::Kind::Variable:
    {
        out.kind = CTerm::Kind::Var;
        for ( auto it = _scope.rbegin(); it != _scope.rend(); ++it )
            if ( it->first == t->name )
            {
                out.index = it->second;
                return out;
            }
        throw Error( ErrorCode::Scope, "unbound variable " + t->name );
    }
    case Term::Kind::Element:
    {
        out.kind = CTerm::Kind::Elem;
        const int sort = sort_index( t->sort );
        const auto e = _domains.element_index( static_cast< std::size_t >( sort ), t->name );
        if ( !e )
            throw Error( ErrorCode::UnknownElement, "element " + t->name + " is not in the domain of " + t->sort );
        out.index = *e;
        return out;
    }
    case Term::Kind::Init:
        sort_index( std::string( time_sort_name ) );
        out.kind = CTerm::Kind::Init;
        return out;
    case Term::Kind::Succ:
        out.kind = CTerm::Kind::Succ;
        out.args.push_back( compile( t->args[ 0 ] ) );
        return out;
    case Term::Kind::Apply:
    {
        out.kind = CTerm::Kind::Apply;
        const auto sym = _voc.symbol_index( t->name );
        if ( !sym )
            throw Error( ErrorCode::Scope, "unknown symbol " + t->name );
        if ( !_domains.has_table( *sym ) )
            throw Error( ErrorCode::UnboundedSort, "symbol " + t->name + " needs domains for all its sorts" );
        out.index = static_cast< int >( *sym );
        for ( const auto& a : t->args )
            out.args.push_back( compile( a ) );
        return out;
    }
    }
    return out;
}

CFormula Compiler::compile( const FormulaPtr& f )
{
    using K = Formula::Kind;
    CFormula out;
    switch ( f->kind )
    {
    case K::True: out.kind = CFormula::Kind::True; return out;
    case K::False: out.kind = CFormula::Kind::False; return out;
    case K::Atom:
    {
        out.kind = CFormula::Kind::Atom;
        const auto sym = _voc.symbol_index( f->symbol );
        if ( !sym )
            throw Error( ErrorCode::Scope, "unknown symbol " + f->symbol );
        if ( !_domains.has_table( *sym ) )
            throw Error( ErrorCode::UnboundedSort, "symbol " + f->symbol + " needs domains for all its sorts" );
        out.symbol = static_cast< int >( *sym );
        for ( const auto& t : f->terms )
            out.terms.push_back( compile( t ) );
        return out;
    }
    case K::Eq:
        out.kind = CFormula::Kind::Eq;
        out.terms.push_back( compile( f->terms[ 0 ] ) );
        out.terms.push_back( compile( f->terms[ 1 ] ) );
        return out;
    case K::Not: out.kind = CFormula::Kind::Not; break;
    case K::And: out.kind = CFormula::Kind::And; break;
    case K::Or: out.kind = CFormula::Kind::Or; break;
    case K::Implies: out.kind = CFormula::Kind::Implies; break;
    case K::Iff: out.kind = CFormula::Kind::Iff; break;
    case K::Forall:
    case K::Exists:
    {
        out.kind = f->kind == K::Forall ? CFormula::Kind::Forall : CFormula::Kind::Exists;
        for ( const auto& v : f->vars )
            out.vars.push_back( quantified( v, succ_depth( f->body(), v.name ) ) );
        out.kids.push_back( compile( f->body() ) );
        unbind( f->vars.size() );
        return out;
    }
    }
    for ( const auto& c : f->children )
        out.kids.push_back( compile( c ) );
    return out;
}

CFormula Compiler::formula( const FormulaPtr& f, const std::vector< Variable >& free )
{
    for ( const auto& v : free )
        bind( v );
    auto out = compile( f );
    unbind( free.size() );
    return out;
}

CTerm Compiler::term( const TermPtr& t, const std::vector< Variable >& free )
{
    for ( const auto& v : free )
        bind( v );
    auto out = compile( t );
    unbind( free.size() );
    return out;
}

CRule Compiler::rule( const Rule& r )
{
    CRule out;
    for ( const auto& v : r.vars )
    {
        const int depth = std::max( succ_depth( r.head, v.name ), succ_depth( r.body, v.name ) );
        out.vars.push_back( quantified( v, depth ) );
    }
    out.head = compile( r.head );
    out.body = compile( r.body );
    out.symbol = static_cast< int >( *_voc.symbol_index( r.defined_symbol() ) );
    unbind( r.vars.size() );
    return out;
}

int eval_term( const CTerm& t, const Structure& s, std::vector< int >& env )
{
    switch ( t.kind )
    {
    case CTerm::Kind::Var: return env[ static_cast< std::size_t >( t.index ) ];
    case CTerm::Kind::Elem: return t.index;
    case CTerm::Kind::Init: return 0;
    case CTerm::Kind::Succ:
    {
        const int v = eval_term( t.args[ 0 ], s, env );
        if ( v < 0 )
            return -1;
        const auto n = s.domain( *s.time_sort() ).size();
        return static_cast< std::size_t >( v ) + 1 < n ? v + 1 : -1;
    }
    case CTerm::Kind::Apply:
    {
        int buf[ 16 ];
        std::vector< int > big;
        int* args = buf;
        if ( t.args.size() > 16 )
        {
            big.resize( t.args.size() );
            args = big.data();
        }
        for ( std::size_t i = 0; i < t.args.size(); ++i )
            if ( ( args[ i ] = eval_term( t.args[ i ], s, env ) ) < 0 )
                return -1;
        const auto sym = static_cast< std::size_t >( t.index );
        return s.value( sym, s.tuple_index( sym, std::span< const int >( args, t.args.size() ) ) );
    }
    }
    return -1;
}

TruthValue eval_formula( const CFormula& f, const Structure& s, std::vector< int >& env )
{
    using K = CFormula::Kind;
    switch ( f.kind )
    {
    case K::True: return TruthValue::True;
    case K::False: return TruthValue::False;
    case K::Atom:
    {
        int buf[ 16 ];
        std::vector< int > big;
        int* args = buf;
        if ( f.terms.size() > 16 )
        {
            big.resize( f.terms.size() );
            args = big.data();
        }
        for ( std::size_t i = 0; i < f.terms.size(); ++i )
            if ( ( args[ i ] = eval_term( f.terms[ i ], s, env ) ) < 0 )
                return TruthValue::Unknown;
        const auto sym = static_cast< std::size_t >( f.symbol );
        return s.truth( sym, s.tuple_index( sym, std::span< const int >( args, f.terms.size() ) ) );
    }
    case K::Eq:
    {
        const int a = eval_term( f.terms[ 0 ], s, env );
        const int b = eval_term( f.terms[ 1 ], s, env );
        if ( a < 0 || b < 0 )
            return TruthValue::Unknown;
        return from_bool( a == b );
    }
    case K::Not: return inverse( eval_formula( f.kids[ 0 ], s, env ) );
    case K::And:
    {
        auto v = TruthValue::True;
        for ( const auto& k : f.kids )
        {
            v = meet( v, eval_formula( k, s, env ) );
            if ( v == TruthValue::False )
                break;
        }
        return v;
    }
    case K::Or:
    {
        auto v = TruthValue::False;
        for ( const auto& k : f.kids )
        {
            v = join( v, eval_formula( k, s, env ) );
            if ( v == TruthValue::True )
                break;
        }
        return v;
    }
    case K::Implies:
    {
        const auto a = eval_formula( f.kids[ 0 ], s, env );
        if ( a == TruthValue::False )
            return TruthValue::True;
        return join( inverse( a ), eval_formula( f.kids[ 1 ], s, env ) );
    }
    case K::Iff:
    {
        const auto a = eval_formula( f.kids[ 0 ], s, env );
        const auto b = eval_formula( f.kids[ 1 ], s, env );
        if ( !is_known( a ) || !is_known( b ) )
            return TruthValue::Unknown;
        return from_bool( a == b );
    }
    case K::Forall:
    case K::Exists:
    {
        const bool all = f.kind == K::Forall;
        auto v = all ? TruthValue::True : TruthValue::False;
        for_each_assignment( f.vars, env, [ & ] {
            const auto b = eval_formula( f.kids[ 0 ], s, env );
            v = all ? meet( v, b ) : join( v, b );
            return all ? v != TruthValue::False : v != TruthValue::True;
        } );
        return v;
    }
    }
    return TruthValue::Unknown;
}

} // namespace ltc::detail
