#include "ltc/inference.hpp"

#include <map>
#include <set>
#include <sstream>

namespace ltc
{

namespace
{

std::string ident( std::string_view s )
{
    std::string out;
    for ( char c : s )
    {
        if ( c == '\'' )
            out += "_p";
        else if ( std::isalnum( static_cast< unsigned char >( c ) ) || c == '_' )
            out += c;
        else
            out += "_" + std::to_string( static_cast< unsigned char >( c ) ) + "_";
    }
    return out;
}

class TptpWriter
{
public:
    explicit TptpWriter( const Vocabulary& voc ) : _voc( voc ) {}

    std::string var( const std::string& name ) const { return "X_" + ident( name ); }
    std::string guard( const std::string& sort, const std::string& x ) const { return "sort_" + ident( sort ) + "(" + x + ")"; }

    std::string term( const TermPtr& t )
    {
        switch ( t->kind )
        {
        case Term::Kind::Variable: return var( t->name );
        case Term::Kind::Element:
            _elements[ t->sort ].insert( t->name );
            return element( t->name );
        case Term::Kind::Apply: return "f_" + ident( t->name ) + args( t->args );
        case Term::Kind::Init:
        case Term::Kind::Succ:
            throw Error( ErrorCode::InvalidArgument, "time terms cannot be exported; eliminate time first" );
        }
        return {};
    }

    std::string formula( const FormulaPtr& f )
    {
        using K = Formula::Kind;
        switch ( f->kind )
        {
        case K::True: return "$true";
        case K::False: return "$false";
        case K::Atom: return "p_" + ident( f->symbol ) + args( f->terms );
        case K::Eq: return "(" + term( f->terms[ 0 ] ) + " = " + term( f->terms[ 1 ] ) + ")";
        case K::Not: return "~ " + formula( f->children[ 0 ] );
        case K::And: return join( f->children, " & ", "$true" );
        case K::Or: return join( f->children, " | ", "$false" );
        case K::Implies: return "(" + formula( f->children[ 0 ] ) + " => " + formula( f->children[ 1 ] ) + ")";
        case K::Iff: return "(" + formula( f->children[ 0 ] ) + " <=> " + formula( f->children[ 1 ] ) + ")";
        case K::Forall:
        case K::Exists: return quantified( f->kind == K::Forall, f->vars, formula( f->body() ) );
        }
        return {};
    }

    std::string quantified( bool universal, const std::vector< Variable >& vars, const std::string& body ) const
    {
        if ( vars.empty() )
            return body;
        std::string names, guards;
        for ( std::size_t i = 0; i < vars.size(); ++i )
        {
            names += ( i ? "," : "" ) + var( vars[ i ].name );
            guards += ( i ? " & " : "" ) + guard( vars[ i ].sort, var( vars[ i ].name ) );
        }
        return std::string( universal ? "! [" : "? [" ) + names + "] : (" + ( vars.size() > 1 ? "(" + guards + ")" : guards ) +
               ( universal ? " => " : " & " ) + body + ")";
    }

    // Clark completion of the rules for one symbol.
    std::string completion( const std::string& symbol, const std::vector< const Rule* >& rules )
    {
        const auto* d = _voc.find_symbol( symbol );
        std::vector< Variable > head;
        for ( std::size_t i = 0; i < d->arg_sorts.size(); ++i )
            head.push_back( { "H" + std::to_string( i ), d->arg_sorts[ i ] } );
        std::string lhs;
        if ( d->is_function() )
        {
            head.push_back( { "Hv", *d->out_sort } );
            std::vector< TermPtr > as;
            for ( std::size_t i = 0; i + 1 < head.size(); ++i )
                as.push_back( Term::variable( head[ i ] ) );
            lhs = "(f_" + ident( symbol ) + args_text( as ) + " = " + var( "Hv" ) + ")";
        }
        else
        {
            std::vector< TermPtr > as;
            for ( const auto& h : head )
                as.push_back( Term::variable( h ) );
            lhs = "p_" + ident( symbol ) + args_text( as );
        }
        std::vector< std::string > disjuncts;
        for ( const auto* r : rules )
        {
            std::vector< TermPtr > hs = r->head_args();
            if ( r->defines_function() )
                hs.push_back( r->head->terms[ 1 ] );
            std::string conj;
            for ( std::size_t i = 0; i < hs.size(); ++i )
                conj += "(" + var( head[ i ].name ) + " = " + term( hs[ i ] ) + ") & ";
            conj += formula( r->body );
            disjuncts.push_back( quantified( false, r->vars, "(" + conj + ")" ) );
        }
        std::string rhs = disjuncts.empty() ? "$false" : disjuncts[ 0 ];
        for ( std::size_t i = 1; i < disjuncts.size(); ++i )
            rhs += " | " + disjuncts[ i ];
        return quantified( true, head, "(" + lhs + " <=> (" + rhs + "))" );
    }

    std::vector< std::string > typing()
    {
        std::vector< std::string > out;
        for ( const auto& d : _voc.symbols() )
        {
            if ( !d.is_function() )
                continue;
            std::vector< Variable > vs;
            std::vector< TermPtr > as;
            for ( std::size_t i = 0; i < d.arg_sorts.size(); ++i )
            {
                vs.push_back( { "A" + std::to_string( i ), d.arg_sorts[ i ] } );
                as.push_back( Term::variable( vs.back() ) );
            }
            out.push_back( quantified( true, vs, guard( *d.out_sort, "f_" + ident( d.name ) + args_text( as ) ) ) );
        }
        for ( const auto& [ sort, elems ] : _elements )
            for ( const auto& e : elems )
                out.push_back( guard( sort, element( e ) ) );
        std::set< std::string > all;
        for ( const auto& [ sort, elems ] : _elements )
            all.insert( elems.begin(), elems.end() );
        for ( auto a = all.begin(); a != all.end(); ++a )
            for ( auto b = std::next( a ); b != all.end(); ++b )
                out.push_back( element( *a ) + " != " + element( *b ) );
        return out;
    }

private:
    const Vocabulary& _voc;
    std::map< std::string, std::set< std::string > > _elements;

    static std::string element( const std::string& e ) { return "e_" + ident( e ); }

    std::string args( const std::vector< TermPtr >& ts ) { return args_text( ts ); }

    std::string args_text( const std::vector< TermPtr >& ts )
    {
        if ( ts.empty() )
            return {};
        std::string out = "(";
        for ( std::size_t i = 0; i < ts.size(); ++i )
            out += ( i ? "," : "" ) + term( ts[ i ] );
        return out + ")";
    }

    std::string join( const std::vector< FormulaPtr >& fs, const char* op, const char* empty )
    {
        if ( fs.empty() )
            return empty;
        std::string out = "(";
        for ( std::size_t i = 0; i < fs.size(); ++i )
            out += ( i ? op : "" ) + formula( fs[ i ] );
        return out + ")";
    }
};

std::string document( const std::string& title, const Theory& axioms, const std::vector< FormulaPtr >& hypotheses,
                      const FormulaPtr& conjecture )
{
    TptpWriter w( *axioms.vocabulary );
    std::vector< std::pair< std::string, std::string > > lines;
    int n = 0;
    for ( const auto& s : axioms.sentences )
        lines.push_back( { "axiom", w.formula( s ) } );
    for ( const auto& d : axioms.definitions )
    {
        std::map< std::string, std::vector< const Rule* > > by_symbol;
        for ( const auto& r : d.rules )
            by_symbol[ r.defined_symbol() ].push_back( &r );
        for ( const auto& [ sym, rules ] : by_symbol )
            lines.push_back( { "axiom", w.completion( sym, rules ) } );
    }
    for ( const auto& h : hypotheses )
        lines.push_back( { "hypothesis", w.formula( h ) } );
    const auto goal = w.formula( conjecture );
    std::ostringstream out;
    out << "% " << title << "\n";
    if ( !axioms.definitions.empty() )
        out << "% definitions are encoded by completion, which is weaker than their well-founded reading\n";
    out << "% domain closure is not encoded\n";
    for ( const auto& t : w.typing() )
        out << "fof(type_" << n++ << ", axiom, " << t << ").\n";
    for ( const auto& [ role, text ] : lines )
        out << "fof(" << ( role == "axiom" ? "ax_" : "hyp_" ) << n++ << ", " << role << ", " << text << ").\n";
    out << "fof(goal, conjecture, " << goal << ").\n";
    return out.str();
}

} // namespace

TptpExport Engine::export_induction_obligations( const FormulaPtr& phi ) const
{
    const auto cls = classify( phi );
    if ( !cls.is_universal() )
        throw Error( ErrorCode::NotUniversal, "invariant is not single-state/bistate: " + std::string( to_string( cls.kind ) ) );
    const auto& v = vocabularies();
    const auto te = time_eliminate( phi, v );
    TptpExport out;
    const bool has_defs = !derived().initial.definitions.empty() || !derived().transition.definitions.empty();
    if ( has_defs )
        out.warnings.push_back(
            { ErrorCode::InvalidArgument,
              "definitions are exported as completions; an obligation proven from them may not hold under the "
              "well-founded semantics of inductive definitions" } );
    if ( cls.kind == SentenceKind::UniversalBistate )
    {
        out.documents.push_back( { "step", document( "transition obligation: Tt entails the invariant",
                                                     derived().transition, {}, te ) } );
        return out;
    }
    out.documents.push_back( { "base", document( "base case: T0 entails the invariant", derived().initial, {}, te ) } );
    out.documents.push_back( { "step", document( "step case: Tt and the invariant entail it in the next state",
                                                 derived().transition, { te },
                                                 time_eliminate( shift_to_next( phi, *cls.time_var ), v ) ) } );
    return out;
}

} // namespace ltc
