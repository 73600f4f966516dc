#include "ltc/ground.hpp"

#include "compiled.hpp"

#include <charconv>
#include <unordered_map>

namespace ltc
{

namespace
{

constexpr std::size_t max_atoms = 4'000'000;

GroundNode make_node( GroundNode::Kind kind )
{
    GroundNode n;
    n.kind = kind;
    return n;
}

struct Case
{
    int value;
    std::vector< int > conds; // graph atoms that must hold
};

} // namespace

std::uint64_t GroundTheory::key( std::size_t symbol, std::size_t tuple, int value )
{
    if ( symbol >= ( 1u << 15 ) || tuple >= ( std::uint64_t{ 1 } << 32 ) || value + 1 >= ( 1 << 16 ) )
        throw Error( ErrorCode::Budget, "ground theory too large" );
    return ( std::uint64_t{ symbol } << 48 ) | ( std::uint64_t{ tuple } << 16 ) | static_cast< std::uint64_t >( value + 1 );
}

int GroundTheory::find_atom( std::size_t symbol, std::size_t tuple, int value ) const
{
    const auto it = atom_index.find( key( symbol, tuple, value ) );
    return it == atom_index.end() ? -1 : it->second;
}

std::string GroundTheory::describe_atom( int atom, const Structure& domains ) const
{
    const auto& a = atoms[ static_cast< std::size_t >( atom ) ];
    const auto& d = vocabulary->symbols()[ a.symbol ];
    std::string s = d.name;
    if ( d.arity() )
    {
        const auto tuple = domains.tuple_at( a.symbol, a.tuple );
        s += "(";
        for ( std::size_t i = 0; i < tuple.size(); ++i )
            s += ( i ? "," : "" ) +
                 domains.domain( *vocabulary->sort_index( d.arg_sorts[ i ] ) )[ static_cast< std::size_t >( tuple[ i ] ) ];
        s += ")";
    }
    if ( a.value >= 0 )
        s += "=" + domains.domain( *vocabulary->sort_index( *d.out_sort ) )[ static_cast< std::size_t >( a.value ) ];
    return s;
}

std::string GroundTheory::describe_node( int node, const Structure& domains ) const
{
    const auto& n = nodes[ static_cast< std::size_t >( node ) ];
    switch ( n.kind )
    {
    case GroundNode::Kind::False: return "false";
    case GroundNode::Kind::True: return "true";
    case GroundNode::Kind::Unknown: return "unknown";
    case GroundNode::Kind::Lit: return ( n.positive ? "" : "~" ) + describe_atom( n.atom, domains );
    case GroundNode::Kind::And:
    case GroundNode::Kind::Or:
    {
        std::string s = "(";
        for ( std::size_t i = 0; i < n.kids.size(); ++i )
            s += ( i ? ( n.kind == GroundNode::Kind::And ? " & " : " | " ) : "" ) + describe_node( n.kids[ i ], domains );
        return s + ")";
    }
    }
    return "?";
}

long element_as_integer( const std::string& element )
{
    long v = 0;
    const auto* end = element.data() + element.size();
    const auto r = std::from_chars( element.data(), end, v );
    if ( r.ec != std::errc() || r.ptr != end )
        throw Error( ErrorCode::InvalidArgument, "element " + element + " is not an integer" );
    return v;
}

class Grounder
{
public:
    Grounder( const Theory& theory, const Structure& context, const std::set< std::string >& parameters )
        : _theory( theory ), _ctx( context ), _voc( *_theory.vocabulary ), _compiler( _voc, _ctx )
    {
        if ( !( _ctx.vocabulary() == _voc ) )
            throw Error( ErrorCode::InvalidArgument, "structure " + _ctx.name() + " is not over vocabulary " + _voc.name() );
        _g.vocabulary = theory.vocabulary;
        _g.nodes.push_back( make_node( GroundNode::Kind::False ) );
        _g.nodes.push_back( make_node( GroundNode::Kind::True ) );
        _g.nodes.push_back( make_node( GroundNode::Kind::Unknown ) );
        const auto nsym = _voc.symbols().size();
        _symbolic.assign( nsym, 0 );
        _def_of.assign( nsym, -1 );
        for ( const auto& p : parameters )
        {
            const auto idx = _voc.symbol_index( p );
            if ( !idx )
                throw Error( ErrorCode::InvalidArgument, "unknown symbol " + p );
            _symbolic[ *idx ] = 1;
        }
        ground_definitions();
        for ( const auto& s : theory.sentences )
            add_constraint( s );
    }

    GroundTheory& theory() { return _g; }

    int sentence( const FormulaPtr& f )
    {
        auto c = _compiler.formula( f );
        fit_env();
        return formula( c, true );
    }

    void add_constraint( const FormulaPtr& f ) { add_constraint_node( sentence( f ) ); }

    void add_cost_constraint( const TermPtr& cost, long bound, bool equal )
    {
        auto ct = _compiler.term( cost );
        fit_env();
        const auto sort = _voc.sort_index( cost->sort );
        if ( !sort || !_ctx.has_domain( *sort ) )
            throw Error( ErrorCode::UnboundedSort, "cost term has no bounded sort" );
        const auto& dom = _ctx.domain( *sort );
        std::vector< int > parts;
        for ( auto& c : cases( ct ) )
        {
            if ( c.value < 0 )
                continue;
            const long v = element_as_integer( dom[ static_cast< std::size_t >( c.value ) ] );
            if ( equal ? v != bound : v >= bound )
                continue;
            parts.push_back( conjunction_of( c.conds, ground_true ) );
        }
        add_constraint_node( mk_or( std::move( parts ) ) );
    }

private:
    Theory _theory;
    Structure _ctx;
    const Vocabulary& _voc;
    detail::Compiler _compiler;
    GroundTheory _g;
    std::vector< char > _symbolic;
    std::vector< int > _def_of;
    std::vector< int > _env;
    std::unordered_map< int, int > _lit_nodes;

    void fit_env()
    {
        if ( _env.size() < static_cast< std::size_t >( _compiler.slots() ) )
            _env.resize( static_cast< std::size_t >( _compiler.slots() ), 0 );
    }

    // --- nodes

    int push( GroundNode n )
    {
        _g.nodes.push_back( std::move( n ) );
        return static_cast< int >( _g.nodes.size() - 1 );
    }

    int mk_lit( int atom, bool positive )
    {
        const int key = atom * 2 + ( positive ? 1 : 0 );
        const auto it = _lit_nodes.find( key );
        if ( it != _lit_nodes.end() )
            return it->second;
        auto n = make_node( GroundNode::Kind::Lit );
        n.positive = positive;
        n.atom = atom;
        const int id = push( std::move( n ) );
        _lit_nodes.emplace( key, id );
        return id;
    }

    int mk_junction( GroundNode::Kind kind, std::vector< int > kids )
    {
        const bool conj = kind == GroundNode::Kind::And;
        const int absorbing = conj ? ground_false : ground_true;
        const int neutral = conj ? ground_true : ground_false;
        std::vector< int > flat;
        bool unknown = false;
        for ( int k : kids )
        {
            if ( k == absorbing )
                return absorbing;
            if ( k == neutral )
                continue;
            if ( k == ground_unknown )
            {
                unknown = true;
                continue;
            }
            if ( _g.nodes[ static_cast< std::size_t >( k ) ].kind == kind )
            {
                const auto& sub = _g.nodes[ static_cast< std::size_t >( k ) ].kids;
                flat.insert( flat.end(), sub.begin(), sub.end() );
            }
            else
                flat.push_back( k );
        }
        if ( unknown )
            flat.push_back( ground_unknown );
        if ( flat.empty() )
            return neutral;
        if ( flat.size() == 1 )
            return flat[ 0 ];
        auto n = make_node( kind );
        n.kids = std::move( flat );
        return push( std::move( n ) );
    }

    int mk_and( std::vector< int > kids ) { return mk_junction( GroundNode::Kind::And, std::move( kids ) ); }
    int mk_or( std::vector< int > kids ) { return mk_junction( GroundNode::Kind::Or, std::move( kids ) ); }

    int conjunction_of( const std::vector< int >& conds, int leaf )
    {
        if ( conds.empty() )
            return leaf;
        std::vector< int > kids;
        for ( int a : conds )
            kids.push_back( mk_lit( a, true ) );
        kids.push_back( leaf );
        return mk_and( std::move( kids ) );
    }

    int disjunction_of_negated( const std::vector< int >& conds, int leaf )
    {
        if ( conds.empty() )
            return leaf;
        std::vector< int > kids;
        for ( int a : conds )
            kids.push_back( mk_lit( a, false ) );
        kids.push_back( leaf );
        return mk_or( std::move( kids ) );
    }

    void add_constraint_node( int root )
    {
        if ( root == ground_true )
            return;
        const auto& n = _g.nodes[ static_cast< std::size_t >( root ) ];
        if ( n.kind == GroundNode::Kind::And )
        {
            for ( int k : n.kids )
                _g.constraints.push_back( k );
            return;
        }
        _g.constraints.push_back( root );
    }

    // --- atoms

    int atom( std::size_t sym, std::size_t tuple, int value )
    {
        const auto k = GroundTheory::key( sym, tuple, value );
        if ( const auto it = _g.atom_index.find( k ); it != _g.atom_index.end() )
            return it->second;
        const auto& d = _voc.symbols()[ sym ];
        const int def = _def_of[ sym ];
        if ( d.is_predicate() )
            return new_atom( sym, tuple, -1, -1, def );
        const auto out = _ctx.domain( *_voc.sort_index( *d.out_sort ) ).size();
        GroundGroup grp{ sym, tuple, {}, def };
        const int gid = static_cast< int >( _g.groups.size() );
        for ( std::size_t v = 0; v < out; ++v )
            grp.atoms.push_back( new_atom( sym, tuple, static_cast< int >( v ), gid, def ) );
        _g.groups.push_back( std::move( grp ) );
        return _g.atom_index.at( k );
    }

    int new_atom( std::size_t sym, std::size_t tuple, int value, int group, int def )
    {
        if ( _g.atoms.size() >= max_atoms )
            throw Error( ErrorCode::Budget, "ground theory too large" );
        _g.atoms.push_back( { sym, tuple, value, group, def } );
        const int id = static_cast< int >( _g.atoms.size() - 1 );
        _g.atom_index.emplace( GroundTheory::key( sym, tuple, value ), id );
        return id;
    }

    int predicate_literal( std::size_t sym, std::size_t tuple, bool positive )
    {
        if ( !_symbolic[ sym ] )
        {
            const auto v = _ctx.truth( sym, tuple );
            if ( is_known( v ) )
                return ( v == TruthValue::True ) == positive ? ground_true : ground_false;
        }
        return mk_lit( atom( sym, tuple, -1 ), positive );
    }

    // --- terms

    template < typename Fn >
    void combos( const std::vector< const detail::CTerm* >& terms, Fn&& fn )
    {
        std::vector< std::vector< Case > > per;
        per.reserve( terms.size() );
        for ( const auto* t : terms )
            per.push_back( cases( *t ) );
        std::vector< int > vals( terms.size() );
        std::vector< int > conds;
        std::vector< std::size_t > pick( terms.size(), 0 );
        for ( const auto& p : per )
            if ( p.empty() )
                return;
        while ( true )
        {
            conds.clear();
            for ( std::size_t i = 0; i < terms.size(); ++i )
            {
                const auto& c = per[ i ][ pick[ i ] ];
                vals[ i ] = c.value;
                conds.insert( conds.end(), c.conds.begin(), c.conds.end() );
            }
            fn( vals, conds );
            std::size_t i = terms.size();
            while ( i > 0 )
            {
                if ( ++pick[ i - 1 ] < per[ i - 1 ].size() )
                    break;
                pick[ i - 1 ] = 0;
                --i;
            }
            if ( i == 0 )
                return;
        }
    }

    static std::vector< const detail::CTerm* > pointers( const std::vector< detail::CTerm >& ts )
    {
        std::vector< const detail::CTerm* > out;
        for ( const auto& t : ts )
            out.push_back( &t );
        return out;
    }

    static bool any_undefined( const std::vector< int >& vals )
    {
        for ( int v : vals )
            if ( v < 0 )
                return true;
        return false;
    }

    std::vector< Case > cases( const detail::CTerm& t )
    {
        using K = detail::CTerm::Kind;
        switch ( t.kind )
        {
        case K::Var: return { Case{ _env[ static_cast< std::size_t >( t.index ) ], {} } };
        case K::Elem: return { Case{ t.index, {} } };
        case K::Init: return { Case{ 0, {} } };
        case K::Succ:
        {
            auto inner = cases( t.args[ 0 ] );
            const auto n = static_cast< int >( _ctx.domain( *_ctx.time_sort() ).size() );
            for ( auto& c : inner )
                if ( c.value >= 0 )
                    c.value = c.value + 1 < n ? c.value + 1 : -1;
            return inner;
        }
        case K::Apply:
        {
            std::vector< Case > out;
            const auto sym = static_cast< std::size_t >( t.index );
            combos( pointers( t.args ), [ & ]( const std::vector< int >& vals, const std::vector< int >& conds ) {
                if ( any_undefined( vals ) )
                {
                    out.push_back( Case{ -1, conds } );
                    return;
                }
                const auto idx = _ctx.tuple_index( sym, vals );
                const int known = _symbolic[ sym ] ? -1 : _ctx.value( sym, idx );
                if ( known >= 0 )
                {
                    out.push_back( Case{ known, conds } );
                    return;
                }
                atom( sym, idx, 0 );
                const auto& grp = _g.groups[ static_cast< std::size_t >(
                    _g.atoms[ static_cast< std::size_t >( atom( sym, idx, 0 ) ) ].group ) ];
                for ( std::size_t v = 0; v < grp.atoms.size(); ++v )
                {
                    Case c{ static_cast< int >( v ), conds };
                    c.conds.push_back( grp.atoms[ v ] );
                    out.push_back( std::move( c ) );
                }
            } );
            return out;
        }
        }
        return {};
    }

    // --- formulas

    int formula( const detail::CFormula& f, bool pos )
    {
        using K = detail::CFormula::Kind;
        switch ( f.kind )
        {
        case K::True: return pos ? ground_true : ground_false;
        case K::False: return pos ? ground_false : ground_true;
        case K::Atom:
        case K::Eq:
        {
            std::vector< int > parts;
            const auto sym = static_cast< std::size_t >( f.symbol );
            combos( pointers( f.terms ), [ & ]( const std::vector< int >& vals, const std::vector< int >& conds ) {
                int leaf;
                if ( any_undefined( vals ) )
                    leaf = ground_unknown;
                else if ( f.kind == K::Eq )
                    leaf = ( vals[ 0 ] == vals[ 1 ] ) == pos ? ground_true : ground_false;
                else
                    leaf = predicate_literal( sym, _ctx.tuple_index( sym, vals ), pos );
                parts.push_back( pos ? conjunction_of( conds, leaf ) : disjunction_of_negated( conds, leaf ) );
            } );
            return pos ? mk_or( std::move( parts ) ) : mk_and( std::move( parts ) );
        }
        case K::Not: return formula( f.kids[ 0 ], !pos );
        case K::And:
        case K::Or:
        {
            std::vector< int > parts;
            for ( const auto& k : f.kids )
                parts.push_back( formula( k, pos ) );
            return ( f.kind == K::And ) == pos ? mk_and( std::move( parts ) ) : mk_or( std::move( parts ) );
        }
        case K::Implies:
        {
            if ( pos )
                return mk_or( { formula( f.kids[ 0 ], false ), formula( f.kids[ 1 ], true ) } );
            return mk_and( { formula( f.kids[ 0 ], true ), formula( f.kids[ 1 ], false ) } );
        }
        case K::Iff:
        {
            const int a = formula( f.kids[ 0 ], true ), na = formula( f.kids[ 0 ], false );
            const int b = formula( f.kids[ 1 ], true ), nb = formula( f.kids[ 1 ], false );
            if ( pos )
                return mk_and( { mk_or( { na, b } ), mk_or( { a, nb } ) } );
            return mk_or( { mk_and( { a, nb } ), mk_and( { na, b } ) } );
        }
        case K::Forall:
        case K::Exists:
        {
            const bool conj = ( f.kind == K::Forall ) == pos;
            const int absorbing = conj ? ground_false : ground_true;
            std::vector< int > parts;
            bool absorbed = false;
            detail::for_each_assignment( f.vars, _env, [ & ] {
                const int n = formula( f.kids[ 0 ], pos );
                if ( n == absorbing )
                {
                    absorbed = true;
                    return false;
                }
                parts.push_back( n );
                return true;
            } );
            if ( absorbed )
                return absorbing;
            return conj ? mk_and( std::move( parts ) ) : mk_or( std::move( parts ) );
        }
        }
        return ground_unknown;
    }

    // --- definitions

    void ground_definitions()
    {
        const auto& defs = _theory.definitions;
        _g.definitions.resize( defs.size() );
        for ( std::size_t di = 0; di < defs.size(); ++di )
            for ( const auto& name : defs[ di ].defined_symbols() )
            {
                const auto sym = *_voc.symbol_index( name );
                if ( _def_of[ sym ] >= 0 )
                    throw Error( ErrorCode::InvalidArgument, "symbol " + name + " is defined in two definitions" );
                _def_of[ sym ] = static_cast< int >( di );
                _symbolic[ sym ] = 1;
            }
        // every atom of a defined symbol exists, in declaration order
        for ( std::size_t sym = 0; sym < _voc.symbols().size(); ++sym )
        {
            if ( _def_of[ sym ] < 0 )
                continue;
            if ( !_ctx.has_table( sym ) )
                throw Error( ErrorCode::UnboundedSort,
                             "symbol " + _voc.symbols()[ sym ].name + " needs domains for all its sorts" );
            const bool fn = _voc.symbols()[ sym ].is_function();
            auto& gd = _g.definitions[ static_cast< std::size_t >( _def_of[ sym ] ) ];
            for ( std::size_t t = 0; t < _ctx.table_size( sym ); ++t )
            {
                if ( fn )
                {
                    atom( sym, t, 0 );
                    const auto& grp = _g.groups.back();
                    gd.atoms.insert( gd.atoms.end(), grp.atoms.begin(), grp.atoms.end() );
                }
                else
                    gd.atoms.push_back( atom( sym, t, -1 ) );
            }
        }
        for ( std::size_t di = 0; di < defs.size(); ++di )
        {
            std::unordered_map< int, std::vector< int > > bodies;
            for ( const auto& r : defs[ di ].rules )
                ground_rule( r, bodies );
            auto& gd = _g.definitions[ di ];
            gd.body.resize( gd.atoms.size() );
            for ( std::size_t k = 0; k < gd.atoms.size(); ++k )
            {
                auto it = bodies.find( gd.atoms[ k ] );
                gd.body[ k ] = it == bodies.end() ? ground_false : mk_or( std::move( it->second ) );
            }
        }
    }

    void ground_rule( const Rule& r, std::unordered_map< int, std::vector< int > >& bodies )
    {
        const auto cr = _compiler.rule( r );
        fit_env();
        const auto sym = static_cast< std::size_t >( cr.symbol );
        std::vector< const detail::CTerm* > head;
        if ( cr.head.kind == detail::CFormula::Kind::Atom )
            head = pointers( cr.head.terms );
        else
        {
            const auto& app = cr.head.terms[ 0 ];
            head = pointers( app.args );
            head.push_back( &cr.head.terms[ 1 ] );
        }
        const bool fn = cr.head.kind != detail::CFormula::Kind::Atom;
        detail::for_each_assignment( cr.vars, _env, [ & ] {
            const int body = formula( cr.body, true );
            if ( body == ground_false )
                return true;
            combos( head, [ & ]( const std::vector< int >& vals, const std::vector< int >& conds ) {
                if ( any_undefined( vals ) )
                    return;
                int a;
                if ( fn )
                {
                    std::vector< int > args( vals.begin(), vals.end() - 1 );
                    a = atom( sym, _ctx.tuple_index( sym, args ), vals.back() );
                }
                else
                    a = atom( sym, _ctx.tuple_index( sym, vals ), -1 );
                bodies[ a ].push_back( conjunction_of( conds, body ) );
            } );
            return true;
        } );
    }
};

Grounding::Grounding( const Theory& theory, const Structure& context, const std::set< std::string >& parameters )
    : _impl( std::make_unique< Grounder >( theory, context, parameters ) )
{
}

Grounding::~Grounding() = default;
Grounding::Grounding( Grounding&& ) noexcept = default;
Grounding& Grounding::operator=( Grounding&& ) noexcept = default;

const GroundTheory& Grounding::theory() const
{
    return _impl->theory();
}

int Grounding::ground_sentence( const FormulaPtr& sentence )
{
    return _impl->sentence( sentence );
}

void Grounding::add_constraint( const FormulaPtr& sentence )
{
    _impl->add_constraint( sentence );
}

void Grounding::add_cost_constraint( const TermPtr& cost, long bound, bool equal )
{
    _impl->add_cost_constraint( cost, bound, equal );
}

GroundTheory ground( const Theory& theory, const Structure& context, const std::set< std::string >& parameters )
{
    Grounding g( theory, context, parameters );
    return g.theory();
}

} // namespace ltc
