#include "random_ltc.hpp"

#include "ltc/error.hpp"

#include <cmath>
#include <sstream>

namespace ltc::testing
{

namespace
{

enum class SymKind
{
    StaticPred, // A(S)
    StaticConst,
    DynProp, // Q(Time)
    DynPred, // P(S,Time)
    DynFunc, // f(Time) : S
};

struct Sym
{
    std::string name;
    SymKind kind;
    bool exogenous = false;
    bool defined = false;
};

enum class Level
{
    Static,
    Init,
    Single,
    Bi,
};

using Rng = std::mt19937_64;

int pick( Rng& rng, int n )
{
    return std::uniform_int_distribution< int >( 0, n - 1 )( rng );
}

bool chance( Rng& rng, double p )
{
    return std::bernoulli_distribution( p )( rng );
}

class Gen
{
public:
    Gen( Rng& rng, std::vector< Sym > syms, int domain ) : _rng( rng ), _syms( std::move( syms ) ), _domain( domain ) {}

    std::string time_term( Level l )
    {
        switch ( l )
        {
        case Level::Static: return {};
        case Level::Init: return "Init";
        case Level::Single: return "t";
        case Level::Bi: return chance( _rng, 0.5 ) ? "t" : "Succ(t)";
        }
        return {};
    }

    std::string element() { return std::string( 1, static_cast< char >( 'a' + pick( _rng, _domain ) ) ); }

    std::string s_term( Level l, const std::vector< std::string >& vars, int depth = 1 )
    {
        std::vector< std::string > options;
        for ( const auto& v : vars )
            options.push_back( v );
        options.push_back( element() );
        for ( const auto& s : _syms )
        {
            if ( s.kind == SymKind::StaticConst )
                options.push_back( s.name );
            if ( s.kind == SymKind::DynFunc && l != Level::Static && depth > 0 )
                options.push_back( s.name + "(" + time_term( l ) + ")" );
        }
        return options[ static_cast< std::size_t >( pick( _rng, static_cast< int >( options.size() ) ) ) ];
    }

    std::string atom( Level l, const std::vector< std::string >& vars )
    {
        std::vector< std::string > options;
        for ( const auto& s : _syms )
        {
            switch ( s.kind )
            {
            case SymKind::StaticPred: options.push_back( s.name + "(" + s_term( l, vars ) + ")" ); break;
            case SymKind::DynProp:
                if ( l != Level::Static )
                    options.push_back( s.name + "(" + time_term( l ) + ")" );
                break;
            case SymKind::DynPred:
                if ( l != Level::Static )
                    options.push_back( s.name + "(" + s_term( l, vars ) + "," + time_term( l ) + ")" );
                break;
            default: break;
            }
        }
        options.push_back( s_term( l, vars ) + ( chance( _rng, 0.3 ) ? " ~= " : " = " ) + s_term( l, vars ) );
        if ( chance( _rng, 0.05 ) )
            options.push_back( chance( _rng, 0.5 ) ? "true" : "false" );
        return options[ static_cast< std::size_t >( pick( _rng, static_cast< int >( options.size() ) ) ) ];
    }

    std::string formula( Level l, int depth, std::vector< std::string > vars )
    {
        if ( depth <= 0 || chance( _rng, 0.25 ) )
            return atom( l, vars );
        switch ( pick( _rng, 7 ) )
        {
        case 0: return "~" + paren( formula( l, depth - 1, vars ) );
        case 1: return paren( formula( l, depth - 1, vars ) ) + " & " + paren( formula( l, depth - 1, vars ) );
        case 2: return paren( formula( l, depth - 1, vars ) ) + " | " + paren( formula( l, depth - 1, vars ) );
        case 3: return paren( formula( l, depth - 1, vars ) ) + " => " + paren( formula( l, depth - 1, vars ) );
        case 4: return paren( formula( l, depth - 1, vars ) ) + " <=> " + paren( formula( l, depth - 1, vars ) );
        default:
        {
            const auto v = "x" + std::to_string( vars.size() );
            vars.push_back( v );
            return std::string( pick( _rng, 2 ) ? "! " : "? " ) + v + "[S]: " + paren( formula( l, depth - 1, vars ) );
        }
        }
    }

    std::string sentence( SentenceShape shape )
    {
        switch ( shape )
        {
        case SentenceShape::Static: return formula( Level::Static, 2, {} ) + ".";
        case SentenceShape::Initial: return formula( Level::Init, 2, {} ) + ".";
        case SentenceShape::SingleState: return "! t[Time]: " + paren( formula( Level::Single, 2, {} ) ) + ".";
        case SentenceShape::Bistate: return "! t[Time]: " + paren( formula( Level::Bi, 2, {} ) ) + ".";
        case SentenceShape::Any:
            if ( pick( _rng, 2 ) )
                return "? t[Time]: " + paren( formula( Level::Single, 2, {} ) ) + ".";
            return "! t[Time]: ! u[Time]: " + paren( formula( Level::Single, 1, {} ) ) + " => " +
                   paren( formula( Level::Single, 1, {} ) ) + ".";
        }
        return {};
    }

    // Rules for one defined symbol.
    std::vector< std::string > rules( const Sym& s )
    {
        std::vector< std::string > out;
        const int n = 1 + pick( _rng, 3 );
        for ( int i = 0; i < n; ++i )
        {
            const int kind = pick( _rng, 5 ); // 0,1 init; 2,3 succ; 4 same level
            const Level body = kind < 2 ? Level::Init : kind < 4 ? Level::Bi : Level::Single;
            const std::string time = kind < 2 ? "Init" : kind < 4 ? "Succ(t)" : "t";
            std::string q = kind < 2 ? "" : "t[Time]";
            std::vector< std::string > vars;
            std::string head;
            switch ( s.kind )
            {
            case SymKind::DynProp: head = s.name + "(" + time + ")"; break;
            case SymKind::DynPred:
                if ( chance( _rng, 0.8 ) )
                {
                    q += ( q.empty() ? "" : " " ) + std::string( "x[S]" );
                    vars.push_back( "x" );
                    head = s.name + "(x," + time + ")";
                }
                else
                    head = s.name + "(" + element() + "," + time + ")";
                break;
            case SymKind::DynFunc:
                q += ( q.empty() ? "" : " " ) + std::string( "y[S]" );
                vars.push_back( "y" );
                head = s.name + "(" + time + ") = y";
                break;
            default: break;
            }
            // Quantified names x<k> start past the rule variables.
            std::string b = formula( body, 2, vars );
            out.push_back( ( q.empty() ? "" : "! " + q + ": " ) + head + " <- " + b + "." );
        }
        return out;
    }

private:
    Rng& _rng;
    std::vector< Sym > _syms;
    int _domain;

    static std::string paren( const std::string& s ) { return "(" + s + ")"; }
};

double structure_count( const std::vector< Sym >& syms, int domain, int horizon )
{
    double bits = 0;
    double n = 1;
    for ( const auto& s : syms )
    {
        switch ( s.kind )
        {
        case SymKind::StaticPred: bits += domain; break;
        case SymKind::StaticConst: n *= domain; break;
        case SymKind::DynProp: bits += horizon + 1; break;
        case SymKind::DynPred: bits += domain * ( horizon + 1 ); break;
        case SymKind::DynFunc: n *= std::pow( domain, horizon + 1 ); break;
        }
    }
    return n * std::pow( 2.0, bits );
}

const char* kind_prefix( SymKind k )
{
    switch ( k )
    {
    case SymKind::StaticPred: return "A";
    case SymKind::StaticConst: return "c";
    case SymKind::DynProp: return "Q";
    case SymKind::DynPred: return "P";
    case SymKind::DynFunc: return "f";
    }
    return "?";
}

struct Skeleton
{
    std::vector< Sym > syms;
    int domain = 1;
    int horizon = 1;
};

Skeleton random_skeleton( Rng& rng, const GenOptions& o )
{
    Skeleton k;
    const int nsyms = 1 + pick( rng, o.max_symbols );
    std::vector< int > counts( 5, 0 );
    bool dynamic = false;
    for ( int i = 0; i < nsyms; ++i )
    {
        int kind = pick( rng, o.functions ? 5 : 4 );
        if ( !o.functions && kind == 1 )
            kind = 3;
        // At least one dynamic symbol.
        if ( i == nsyms - 1 && !dynamic && kind < 2 )
            kind = 2 + pick( rng, o.functions ? 3 : 2 );
        const auto sk = static_cast< SymKind >( kind );
        dynamic = dynamic || kind >= 2;
        Sym s{ std::string( kind_prefix( sk ) ) + std::to_string( counts[ static_cast< std::size_t >( kind ) ]++ ), sk };
        k.syms.push_back( s );
    }
    k.domain = 1 + pick( rng, o.max_domain );
    k.horizon = 1 + pick( rng, o.max_horizon );
    while ( structure_count( k.syms, k.domain, k.horizon ) > o.max_structures )
    {
        if ( k.horizon > 1 )
            --k.horizon;
        else if ( k.domain > 1 )
            --k.domain;
        else
            break;
    }
    return k;
}

std::string vocabulary_text( const std::vector< Sym >& syms )
{
    std::ostringstream out;
    out << "vocabulary R {\n    type Time\n    type S\n";
    for ( const auto& s : syms )
    {
        out << "    " << s.name;
        switch ( s.kind )
        {
        case SymKind::StaticPred: out << "(S)"; break;
        case SymKind::StaticConst: out << " : S"; break;
        case SymKind::DynProp: out << "(Time)"; break;
        case SymKind::DynPred: out << "(S,Time)"; break;
        case SymKind::DynFunc: out << "(Time) : S"; break;
        }
        if ( s.exogenous )
            out << " exogenous";
        out << "\n";
    }
    out << "}\n";
    return out.str();
}

std::string domain_text( int domain, int horizon )
{
    std::ostringstream out;
    out << "structure D : R {\n    S = {";
    for ( int i = 0; i < domain; ++i )
        out << ( i ? "; " : " " ) << static_cast< char >( 'a' + i );
    out << " }\n    Time = { 0.." << horizon << " }\n}\n";
    return out.str();
}

} // namespace

RandomInstance random_instance( Rng& rng, const GenOptions& o )
{
    for ( int attempt = 0;; ++attempt )
    {
        auto k = random_skeleton( rng, o );
        for ( auto& s : k.syms )
        {
            const bool dyn = s.kind == SymKind::DynProp || s.kind == SymKind::DynPred || s.kind == SymKind::DynFunc;
            if ( dyn && chance( rng, o.definition_probability ) )
                s.defined = true;
            else if ( dyn && chance( rng, 0.4 ) )
                s.exogenous = true;
        }
        Gen g( rng, k.syms, k.domain );
        std::ostringstream text;
        text << vocabulary_text( k.syms ) << "\ntheory T : R {\n";
        std::vector< std::string > rules;
        for ( const auto& s : k.syms )
            if ( s.defined )
                for ( auto& r : g.rules( s ) )
                    rules.push_back( std::move( r ) );
        if ( !rules.empty() )
        {
            text << "    {\n";
            for ( const auto& r : rules )
                text << "        " << r << "\n";
            text << "    }\n";
        }
        const int nsent = pick( rng, o.max_sentences + 1 );
        for ( int i = 0; i < nsent; ++i )
        {
            const auto shape = static_cast< SentenceShape >( pick( rng, 4 ) );
            text << "    " << g.sentence( shape ) << "\n";
        }
        text << "}\n\n" << domain_text( k.domain, k.horizon );
        RandomInstance inst;
        inst.text = text.str();
        auto r = parse( inst.text );
        if ( !r.ok() )
        {
            if ( attempt > 50 )
                throw Error( ErrorCode::Syntax, "generator keeps producing unparsable text:\n" + inst.text + "\n" +
                                                    format_issue( r.diagnostics.front() ) );
            continue;
        }
        inst.program = std::move( *r.program );
        inst.theory = inst.program.theories.front();
        inst.domain = inst.program.structures.front().structure;
        inst.horizon = k.horizon;
        return inst;
    }
}

std::string random_sentence( Rng& rng, const RandomInstance& instance, SentenceShape shape )
{
    std::vector< Sym > syms;
    for ( const auto& d : instance.theory.vocabulary->symbols() )
    {
        if ( is_ltc_symbol_name( d.name ) )
            continue;
        SymKind k;
        if ( d.is_function() )
            k = d.arity() == 0 ? SymKind::StaticConst : SymKind::DynFunc;
        else if ( d.arity() == 1 )
            k = d.arg_sorts[ 0 ] == "Time" ? SymKind::DynProp : SymKind::StaticPred;
        else
            k = SymKind::DynPred;
        syms.push_back( { d.name, k } );
    }
    const auto& sorts = instance.domain.vocabulary();
    const int domain = static_cast< int >( instance.domain.domain( *sorts.sort_index( "S" ) ).size() );
    Gen g( rng, syms, domain );
    return g.sentence( shape );
}

std::string random_program_text( Rng& rng )
{
    GenOptions o;
    o.max_structures = 1e9;
    auto inst = random_instance( rng, o );
    std::string text = inst.text;
    // A partial structure with every kind of table entry.
    Structure s = inst.domain;
    s.set_name( "E" );
    const auto& voc = s.vocabulary();
    for ( std::size_t f = 0; f < voc.symbols().size(); ++f )
    {
        if ( !s.has_table( f ) || is_ltc_symbol_name( voc.symbols()[ f ].name ) )
            continue;
        const auto& d = voc.symbols()[ f ];
        const int mode = pick( rng, 3 ); // leave unknown, two-valued, partial
        if ( mode == 0 )
            continue;
        for ( std::size_t i = 0; i < s.table_size( f ); ++i )
        {
            if ( d.is_function() )
            {
                const auto n = s.domain( *voc.sort_index( *d.out_sort ) ).size();
                if ( mode == 1 || chance( rng, 0.5 ) || d.arity() == 0 )
                    s.set_value( f, i, pick( rng, static_cast< int >( n ) ) );
            }
            else if ( mode == 1 )
                s.set_truth( f, i, chance( rng, 0.5 ) ? TruthValue::True : TruthValue::False );
            else
                s.set_truth( f, i, static_cast< TruthValue >( pick( rng, 3 ) ) );
        }
    }
    text += "\n" + print( s );
    return text;
}

} // namespace ltc::testing
