#include "ltc/textio.hpp"

#include <algorithm>
#include <sstream>

namespace ltc
{

namespace
{

// Returns arguments in the order they were written in the vocabulary.
std::vector< TermPtr > written_order( const std::vector< TermPtr >& args, const SymbolDecl* d )
{
    if ( !d || !d->written_time_position || args.empty() )
        return args;
    auto out = args;
    auto time = out.back();
    out.pop_back();
    out.insert( out.begin() + static_cast< std::ptrdiff_t >( *d->written_time_position ), time );
    return out;
}

class Printer
{
    const Vocabulary* _voc;

public:
    explicit Printer( const Vocabulary* voc ) : _voc( voc ) {}

    const SymbolDecl* decl( const std::string& name ) const { return _voc ? _voc->find_symbol( name ) : nullptr; }

    std::string term( const TermPtr& t ) const
    {
        switch ( t->kind )
        {
        case Term::Kind::Variable:
        case Term::Kind::Element:
        case Term::Kind::Init: return t->name;
        case Term::Kind::Succ: return "Succ(" + term( t->args[ 0 ] ) + ")";
        case Term::Kind::Apply: return application( t->name, t->args );
        }
        return t->name;
    }

    std::string application( const std::string& name, const std::vector< TermPtr >& args ) const
    {
        if ( args.empty() )
            return name;
        std::string s = name + "(";
        const auto written = written_order( args, decl( name ) );
        for ( std::size_t i = 0; i < written.size(); ++i )
            s += ( i ? "," : "" ) + term( written[ i ] );
        return s + ")";
    }

    static int precedence( const Formula& f )
    {
        using K = Formula::Kind;
        switch ( f.kind )
        {
        case K::Iff: return 1;
        case K::Implies: return 2;
        case K::Or: return 3;
        case K::And: return 4;
        case K::Forall:
        case K::Exists: return 0;
        case K::Not:
            return f.children[ 0 ]->kind == K::Eq ? 6 : 5;
        default: return 6;
        }
    }

    // Prints f, parenthesized unless its precedence is at least `min`.
    std::string formula( const FormulaPtr& f, int min ) const
    {
        auto s = bare( f );
        return precedence( *f ) < min ? "(" + s + ")" : s;
    }

    std::string vars( const std::vector< Variable >& vs ) const
    {
        std::string s;
        for ( std::size_t i = 0; i < vs.size(); ++i )
            s += ( i ? " " : "" ) + vs[ i ].name + "[" + vs[ i ].sort + "]";
        return s;
    }

    std::string bare( const FormulaPtr& f ) const
    {
        using K = Formula::Kind;
        switch ( f->kind )
        {
        case K::True: return "true";
        case K::False: return "false";
        case K::Atom: return application( f->symbol, f->terms );
        case K::Eq: return term( f->terms[ 0 ] ) + " = " + term( f->terms[ 1 ] );
        case K::Not:
        {
            const auto& c = f->children[ 0 ];
            if ( c->kind == K::Eq )
                return term( c->terms[ 0 ] ) + " ~= " + term( c->terms[ 1 ] );
            return "~" + formula( c, 5 );
        }
        case K::And:
        case K::Or:
        {
            const char* op = f->kind == K::And ? " & " : " | ";
            const int min = f->kind == K::And ? 5 : 4;
            std::string s;
            for ( std::size_t i = 0; i < f->children.size(); ++i )
                s += ( i ? op : "" ) + formula( f->children[ i ], min );
            return s;
        }
        case K::Implies: return formula( f->children[ 0 ], 3 ) + " => " + formula( f->children[ 1 ], 2 );
        case K::Iff: return formula( f->children[ 0 ], 2 ) + " <=> " + formula( f->children[ 1 ], 2 );
        case K::Forall:
        case K::Exists:
            return std::string( f->kind == K::Forall ? "! " : "? " ) + vars( f->vars ) + ": " + formula( f->body(), 0 );
        }
        return "true";
    }

    std::string rule( const Rule& r ) const
    {
        std::string s;
        if ( !r.vars.empty() )
            s += "! " + vars( r.vars ) + ": ";
        s += bare( r.head );
        if ( r.body->kind != Formula::Kind::True )
            s += " <- " + formula( r.body, 0 );
        return s + ".";
    }
};

std::string sort_list( const std::vector< std::string >& sorts )
{
    std::string s = "(";
    for ( std::size_t i = 0; i < sorts.size(); ++i )
        s += ( i ? "," : "" ) + sorts[ i ];
    return s + ")";
}

bool is_range( const std::vector< std::string >& elems )
{
    if ( elems.empty() )
        return false;
    for ( std::size_t i = 0; i < elems.size(); ++i )
        if ( elems[ i ] != std::to_string( i ) )
            return false;
    return true;
}

std::string tuple_text( const Structure& s, std::size_t sym, std::size_t index )
{
    const auto& voc = s.vocabulary();
    const auto& d = voc.symbols()[ sym ];
    const auto tuple = s.tuple_at( sym, index );
    std::vector< std::string > names;
    for ( std::size_t i = 0; i < tuple.size(); ++i )
        names.push_back( s.domain( *voc.sort_index( d.arg_sorts[ i ] ) )[ static_cast< std::size_t >( tuple[ i ] ) ] );
    if ( d.written_time_position && !names.empty() )
    {
        auto time = names.back();
        names.pop_back();
        names.insert( names.begin() + static_cast< std::ptrdiff_t >( *d.written_time_position ), time );
    }
    std::string out = "(";
    for ( std::size_t i = 0; i < names.size(); ++i )
        out += ( i ? "," : "" ) + names[ i ];
    return out + ")";
}

std::string tuple_set( const Structure& s, std::size_t sym, TruthValue v )
{
    std::string out = "{";
    bool first = true;
    const auto n = s.table_size( sym );
    for ( std::size_t i = 0; i < n; ++i )
        if ( s.truth( sym, i ) == v )
        {
            out += ( first ? " " : "; " ) + tuple_text( s, sym, i );
            first = false;
        }
    return out + ( first ? "}" : " }" );
}

std::string structure_text( const Structure& s, const std::string& keyword, const std::string& voc_name )
{
    const auto& voc = s.vocabulary();
    std::ostringstream out;
    out << keyword << " " << s.name() << " : " << voc_name << " {\n";
    for ( std::size_t i = 0; i < voc.sorts().size(); ++i )
    {
        if ( !s.has_domain( i ) )
            continue;
        const auto& elems = s.domain( i );
        out << "    " << voc.sorts()[ i ].name << " = {";
        if ( is_range( elems ) && elems.size() > 1 )
            out << " 0.." << elems.size() - 1 << " }";
        else
        {
            for ( std::size_t k = 0; k < elems.size(); ++k )
                out << ( k ? "; " : " " ) << elems[ k ];
            out << ( elems.empty() ? "}" : " }" );
        }
        out << "\n";
    }
    for ( std::size_t f = 0; f < voc.symbols().size(); ++f )
    {
        const auto& d = voc.symbols()[ f ];
        if ( is_ltc_symbol_name( d.name ) || !s.has_table( f ) || !s.symbol_informed( f ) )
            continue;
        if ( d.is_function() )
        {
            if ( d.arity() == 0 )
            {
                out << "    " << d.name << " = "
                    << s.domain( *voc.sort_index( *d.out_sort ) )[ static_cast< std::size_t >( s.value( f, std::size_t{ 0 } ) ) ]
                    << "\n";
                continue;
            }
            out << "    " << d.name << " = {";
            bool first = true;
            for ( std::size_t i = 0; i < s.table_size( f ); ++i )
            {
                const int v = s.value( f, i );
                if ( v < 0 )
                    continue;
                out << ( first ? " " : "; " ) << tuple_text( s, f, i ) << " -> "
                    << s.domain( *voc.sort_index( *d.out_sort ) )[ static_cast< std::size_t >( v ) ];
                first = false;
            }
            out << ( first ? "}" : " }" ) << "\n";
            continue;
        }
        if ( s.symbol_two_valued( f ) )
        {
            if ( d.arity() == 0 )
                out << "    " << d.name << " = " << ( s.truth( f, std::size_t{ 0 } ) == TruthValue::True ? "true" : "false" )
                    << "\n";
            else
                out << "    " << d.name << " = " << tuple_set( s, f, TruthValue::True ) << "\n";
            continue;
        }
        out << "    " << d.name << "<ct> = " << tuple_set( s, f, TruthValue::True ) << "\n";
        out << "    " << d.name << "<cf> = " << tuple_set( s, f, TruthValue::False ) << "\n";
    }
    out << "}\n";
    return out.str();
}

std::string state_base_name( const std::string& name )
{
    const std::string suffix = "_ss";
    if ( name.size() > suffix.size() && name.compare( name.size() - suffix.size(), suffix.size(), suffix ) == 0 )
        return name.substr( 0, name.size() - suffix.size() );
    return name;
}

} // namespace

std::string print( const TermPtr& t )
{
    return Printer( nullptr ).term( t );
}

std::string print( const FormulaPtr& f )
{
    return Printer( nullptr ).formula( f, 0 );
}

std::string print( const Rule& r )
{
    return Printer( nullptr ).rule( r );
}

std::string print( const Vocabulary& v )
{
    std::ostringstream out;
    out << "vocabulary " << v.name() << " {\n";
    for ( const auto& s : v.sorts() )
        out << "    type " << s.name << ( s.kind == SortKind::IntRange ? " : int" : "" ) << "\n";
    for ( const auto& d : v.symbols() )
    {
        if ( is_ltc_symbol_name( d.name ) )
            continue;
        const bool fluent = std::find( v.fluents().begin(), v.fluents().end(), d.name ) != v.fluents().end();
        auto sorts = d.arg_sorts;
        if ( fluent )
            sorts.pop_back();
        else if ( d.written_time_position && !sorts.empty() )
        {
            auto time = sorts.back();
            sorts.pop_back();
            sorts.insert( sorts.begin() + static_cast< std::ptrdiff_t >( *d.written_time_position ), time );
        }
        out << "    " << ( fluent ? "fluent " : "" ) << d.name;
        if ( !sorts.empty() )
            out << sort_list( sorts );
        if ( d.out_sort )
            out << " : " << *d.out_sort;
        if ( d.exogenous )
            out << " exogenous";
        out << "\n";
    }
    out << "}\n";
    return out.str();
}

std::string print( const Theory& t )
{
    const std::string voc = t.vocabulary ? t.vocabulary->name() : std::string( "?" );
    if ( t.is_empty() )
        return "theory " + t.name + " : " + voc + " { }\n";
    Printer p( t.vocabulary.get() );
    std::ostringstream out;
    out << "theory " << t.name << " : " << voc << " {\n";
    for ( const auto& d : t.definitions )
    {
        out << "    {\n";
        for ( const auto& r : d.rules )
            out << "        " << p.rule( r ) << "\n";
        out << "    }\n";
    }
    for ( const auto& s : t.sentences )
        out << "    " << p.formula( s, 0 ) << ".\n";
    out << "}\n";
    return out.str();
}

std::string print( const Structure& s, bool as_state )
{
    const auto& name = s.vocabulary().name();
    return as_state ? structure_text( s, "state", state_base_name( name ) ) : structure_text( s, "structure", name );
}

std::string print( const SourceProgram& p )
{
    std::string out;
    for ( const auto& b : p.blocks )
    {
        if ( !out.empty() )
            out += "\n";
        switch ( b.kind )
        {
        case SourceProgram::BlockKind::Vocabulary: out += print( *p.vocabularies[ b.index ] ); break;
        case SourceProgram::BlockKind::Theory: out += print( p.theories[ b.index ] ); break;
        case SourceProgram::BlockKind::Structure:
        {
            const auto& sb = p.structures[ b.index ];
            out += structure_text( sb.structure, sb.state ? "state" : "structure", sb.vocabulary_name );
            break;
        }
        }
    }
    return out;
}

} // namespace ltc
