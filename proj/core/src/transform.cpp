#include "ltc/transform.hpp"

#include <algorithm>

namespace ltc
{

const std::string* DerivedVocabularies::dynamic_of_projected( const std::string& name ) const
{
    for ( const auto& [ sym, p ] : projections )
        if ( p.projected == name )
            return &sym;
    return nullptr;
}

const std::string* DerivedVocabularies::dynamic_of_next( const std::string& name ) const
{
    for ( const auto& [ sym, p ] : projections )
        if ( p.next == name )
            return &sym;
    return nullptr;
}

namespace
{

std::shared_ptr< Vocabulary > copy_sorts_without_time( const Vocabulary& v, std::string name )
{
    auto out = std::make_shared< Vocabulary >( std::move( name ) );
    for ( const auto& s : v.sorts() )
        if ( s.kind != SortKind::Time && !is_time_sort( s.name ) )
            out->add_sort( s );
    return out;
}

SymbolDecl state_symbol( const SymbolDecl& d, std::string name )
{
    SymbolDecl out = d;
    out.name = std::move( name );
    out.arg_sorts.pop_back();
    out.category = SymbolCategory::Static;
    out.written_time_position.reset();
    return out;
}

} // namespace

DerivedVocabularies derive_vocabularies( const VocabularyPtr& vocabulary )
{
    DerivedVocabularies out;
    out.base = vocabulary;
    auto vs = copy_sorts_without_time( *vocabulary, vocabulary->name() + "_s" );
    auto vss = copy_sorts_without_time( *vocabulary, vocabulary->name() + "_ss" );
    auto vbs = copy_sorts_without_time( *vocabulary, vocabulary->name() + "_bs" );

    std::vector< SymbolDecl > next_symbols;
    for ( const auto& d : vocabulary->symbols() )
    {
        if ( d.category == SymbolCategory::Ltc || is_ltc_symbol_name( d.name ) )
            continue;
        if ( d.category == SymbolCategory::Static )
        {
            vs->add_symbol( d );
            vss->add_symbol( d );
            vbs->add_symbol( d );
            continue;
        }
        const std::string next = d.name + std::string( next_suffix );
        if ( vocabulary->find_symbol( next ) )
            throw Error( ErrorCode::NameCollision,
                         "next-state symbol " + next + " of " + d.name + " collides with a declared symbol" );
        out.projections[ d.name ] = { d.name, next };
        vss->add_symbol( state_symbol( d, d.name ) );
        vbs->add_symbol( state_symbol( d, d.name ) );
        next_symbols.push_back( state_symbol( d, next ) );
    }
    for ( auto& d : next_symbols )
        vbs->add_symbol( std::move( d ) );
    out.static_voc = std::move( vs );
    out.single_state = std::move( vss );
    out.bistate = std::move( vbs );
    return out;
}

FluentSymbols fluent_symbols( const std::string& predicate )
{
    return { "C_" + predicate, "Cn_" + predicate, "I_" + predicate };
}

VocabularyPtr expand_fluent_vocabulary( const VocabularyPtr& vocabulary )
{
    if ( vocabulary->fluents().empty() )
        return vocabulary;
    auto out = std::make_shared< Vocabulary >( *vocabulary );
    for ( const auto& fluent : vocabulary->fluents() )
    {
        const auto* decl = vocabulary->find_symbol( fluent );
        if ( !decl || decl->category != SymbolCategory::Dynamic || decl->is_function() )
            throw Error( ErrorCode::Type, "fluent " + fluent + " must be a dynamic predicate" );
        const auto names = fluent_symbols( fluent );
        SymbolDecl caused = *decl;
        caused.exogenous = false;
        caused.written_time_position.reset();
        caused.name = names.caused;
        out->add_symbol( caused );
        caused.name = names.caused_not;
        out->add_symbol( caused );
        SymbolDecl init = caused;
        init.name = names.initially;
        init.arg_sorts.pop_back();
        init.category = SymbolCategory::Static;
        out->add_symbol( std::move( init ) );
    }
    return out;
}

Theory expand_fluent_macro( const Theory& theory )
{
    Theory out = theory;
    const auto& voc = *theory.vocabulary;
    for ( const auto& fluent : voc.fluents() )
    {
        const auto* decl = voc.find_symbol( fluent );
        const auto names = fluent_symbols( fluent );
        std::vector< Variable > xs;
        std::vector< TermPtr > args;
        for ( std::size_t i = 0; i + 1 < decl->arg_sorts.size(); ++i )
        {
            xs.push_back( { "x" + std::to_string( i + 1 ), decl->arg_sorts[ i ] } );
            args.push_back( Term::variable( xs.back() ) );
        }
        const Variable t{ "t", std::string( time_sort_name ) };
        auto at = [ & ]( const std::string& p, const TermPtr& time ) {
            auto a = args;
            a.push_back( time );
            return Formula::atom( p, std::move( a ) );
        };
        auto with_t = xs;
        with_t.push_back( t );
        const auto tv = Term::variable( t );
        std::vector< Rule > rules{
            { xs, at( fluent, Term::init() ), Formula::atom( names.initially, args ) },
            { with_t, at( fluent, Term::succ( tv ) ), at( names.caused, tv ) },
            { with_t, at( fluent, Term::succ( tv ) ),
              Formula::conjunction( { at( fluent, tv ), Formula::negation( at( names.caused_not, tv ) ) } ) },
        };
        auto target = std::find_if( out.definitions.begin(), out.definitions.end(),
                                    [ & ]( const Definition& d ) { return d.defined_symbols().contains( fluent ); } );
        if ( target == out.definitions.end() )
            target = out.definitions.empty() ? out.definitions.insert( out.definitions.end(), Definition{} )
                                             : out.definitions.begin();
        target->rules.insert( target->rules.end(), rules.begin(), rules.end() );
    }
    return out;
}

// --- time elimination --------------------------------------------------------

namespace
{

struct Eliminator
{
    const DerivedVocabularies& derived;
    std::string t; // the Time variable, or empty when Init is eliminated
    bool shift;    // treat t as Succ(t)

    // 0 for the current state, 1 for the next one
    int level( const TermPtr& time ) const
    {
        if ( time->kind == Term::Kind::Init && t.empty() )
            return shift ? 1 : 0;
        if ( time->is_variable( t ) )
            return shift ? 1 : 0;
        if ( time->kind == Term::Kind::Succ && ( time->args[ 0 ]->is_variable( t ) ) && !shift )
            return 1;
        throw Error( ErrorCode::NotUniversal, "Time term is not " + t + " or Succ(" + t + ")" );
    }

    std::string rename( const std::string& symbol, const TermPtr& time ) const
    {
        const auto& p = derived.projections.at( symbol );
        return level( time ) == 0 ? p.projected : p.next;
    }

    std::vector< TermPtr > args( const std::vector< TermPtr >& in ) const
    {
        std::vector< TermPtr > out;
        out.reserve( in.size() );
        for ( const auto& a : in )
            out.push_back( term( a ) );
        return out;
    }

    TermPtr term( const TermPtr& x ) const
    {
        if ( x->kind == Term::Kind::Apply && derived.is_dynamic( x->name ) )
        {
            std::vector< TermPtr > in( x->args.begin(), x->args.end() - 1 );
            return Term::apply( rename( x->name, x->args.back() ), args( in ), x->sort );
        }
        if ( x->args.empty() )
            return x;
        return Term::apply( x->name, args( x->args ), x->sort );
    }

    FormulaPtr formula( const FormulaPtr& f ) const
    {
        using K = Formula::Kind;
        switch ( f->kind )
        {
        case K::True:
        case K::False: return f;
        case K::Atom:
            if ( derived.is_dynamic( f->symbol ) )
            {
                std::vector< TermPtr > in( f->terms.begin(), f->terms.end() - 1 );
                return Formula::atom( rename( f->symbol, f->terms.back() ), args( in ) );
            }
            return Formula::atom( f->symbol, args( f->terms ) );
        case K::Eq:
            if ( f->terms[ 0 ]->is_time() )
                return Formula::truth( level( f->terms[ 0 ] ) == level( f->terms[ 1 ] ) );
            return Formula::eq( term( f->terms[ 0 ] ), term( f->terms[ 1 ] ) );
        default: break;
        }
        std::vector< FormulaPtr > kids;
        for ( const auto& c : f->children )
            kids.push_back( formula( c ) );
        return std::make_shared< Formula >( Formula{ f->kind, f->symbol, {}, std::move( kids ), f->vars } );
    }
};

std::vector< Variable > without( const std::vector< Variable >& vars, const std::string& name )
{
    std::vector< Variable > out;
    std::copy_if( vars.begin(), vars.end(), std::back_inserter( out ),
                  [ & ]( const Variable& v ) { return v.name != name; } );
    return out;
}

// Drops the binder of t from the leading universal chain.
FormulaPtr strip_binder( const FormulaPtr& f, const std::string& t )
{
    if ( f->kind != Formula::Kind::Forall )
        throw Error( ErrorCode::NotUniversal, "Time variable " + t + " is not universally quantified outermost" );
    const bool here = std::any_of( f->vars.begin(), f->vars.end(), [ & ]( const Variable& v ) { return v.name == t; } );
    if ( here )
        return Formula::forall( without( f->vars, t ), f->body() );
    return Formula::forall( f->vars, strip_binder( f->body(), t ) );
}

SentenceClass require_universal( const SentenceClass& c )
{
    if ( !c.is_universal() )
        throw Error( ErrorCode::NotUniversal, "time elimination needs a universal single-state or bistate input" );
    return c;
}

FormulaPtr eliminate( const FormulaPtr& f, const SentenceClass& c, const DerivedVocabularies& d, bool shift )
{
    const Eliminator e{ d, c.time_var->name, shift };
    return e.formula( strip_binder( f, c.time_var->name ) );
}

Rule eliminate( const Rule& r, const SentenceClass& c, const DerivedVocabularies& d, bool shift )
{
    const Eliminator e{ d, c.time_var->name, shift };
    return Rule{ without( r.vars, c.time_var->name ), e.formula( r.head ), e.formula( r.body ) };
}

// Initial inputs: Init is read as the current state.
FormulaPtr eliminate_initial( const FormulaPtr& f, const DerivedVocabularies& d )
{
    return Eliminator{ d, {}, false }.formula( f );
}

Rule eliminate_initial( const Rule& r, const DerivedVocabularies& d )
{
    const Eliminator e{ d, {}, false };
    return Rule{ r.vars, e.formula( r.head ), e.formula( r.body ) };
}

FormulaPtr false_rule_head( const SymbolDecl& decl, const std::string& name, std::vector< Variable >& vars )
{
    std::vector< TermPtr > args;
    for ( std::size_t i = 0; i < decl.arity(); ++i )
    {
        vars.push_back( { "x" + std::to_string( i + 1 ), decl.arg_sorts[ i ] } );
        args.push_back( Term::variable( vars.back() ) );
    }
    if ( decl.is_function() )
    {
        vars.push_back( { "y", *decl.out_sort } );
        return Formula::eq( Term::apply( name, std::move( args ), *decl.out_sort ), Term::variable( vars.back() ) );
    }
    return Formula::atom( name, std::move( args ) );
}

Rule false_rule( const Vocabulary& voc, const std::string& name )
{
    Rule r;
    r.head = false_rule_head( *voc.find_symbol( name ), name, r.vars );
    r.body = Formula::truth( false );
    return r;
}

struct Merged
{
    std::vector< Rule > rules;
    std::vector< SentenceClass > classes;
};

Merged merge_definitions( const LtcTheory& theory )
{
    Merged m;
    for ( std::size_t d = 0; d < theory.theory.definitions.size(); ++d )
        for ( std::size_t i = 0; i < theory.theory.definitions[ d ].rules.size(); ++i )
        {
            m.rules.push_back( theory.theory.definitions[ d ].rules[ i ] );
            m.classes.push_back( theory.rule_classes[ d ][ i ] );
        }
    return m;
}

void finish_definition( Theory& out, std::vector< Rule > rules )
{
    if ( !rules.empty() )
        out.definitions.push_back( Definition{ std::move( rules ) } );
}

} // namespace

FormulaPtr time_eliminate( const FormulaPtr& sentence, const DerivedVocabularies& derived )
{
    return eliminate( sentence, require_universal( classify( sentence ) ), derived, false );
}

Rule time_eliminate( const Rule& rule, const DerivedVocabularies& derived )
{
    return eliminate( rule, require_universal( classify( rule ) ), derived, false );
}

namespace
{

FormulaPtr shift_body( const FormulaPtr& f, const Variable& t )
{
    const bool here = f->kind == Formula::Kind::Forall
                      && std::any_of( f->vars.begin(), f->vars.end(), [ & ]( const Variable& v ) { return v.name == t.name; } );
    if ( here )
        return Formula::forall( f->vars,
                                substitute( f->body(), *Term::variable( t ), Term::succ( Term::variable( t ) ) ) );
    if ( f->kind != Formula::Kind::Forall )
        throw Error( ErrorCode::NotUniversal, "Time variable " + t.name + " is not universally quantified outermost" );
    return Formula::forall( f->vars, shift_body( f->body(), t ) );
}

} // namespace

FormulaPtr shift_to_next( const FormulaPtr& sentence, const Variable& t )
{
    return shift_body( sentence, t );
}

Rule shift_to_next( const Rule& rule, const Variable& t )
{
    return substitute( rule, *Term::variable( t ), Term::succ( Term::variable( t ) ) );
}

Theory derive_initial_theory( const LtcTheory& theory, const DerivedVocabularies& derived )
{
    Theory out;
    out.name = theory.theory.name + "0";
    out.vocabulary = derived.single_state;
    const auto& src = theory.theory;
    for ( std::size_t i = 0; i < src.sentences.size(); ++i )
    {
        const auto& c = theory.sentence_classes[ i ];
        switch ( c.kind )
        {
        case SentenceKind::Static: out.sentences.push_back( src.sentences[ i ] ); break;
        case SentenceKind::Initial: out.sentences.push_back( eliminate_initial( src.sentences[ i ], derived ) ); break;
        case SentenceKind::UniversalSingleState:
            out.sentences.push_back( eliminate( src.sentences[ i ], c, derived, false ) );
            break;
        default: break;
        }
    }

    const auto merged = merge_definitions( theory );
    std::vector< Rule > rules;
    std::set< std::string > defined_dynamic;
    std::set< std::string > covered;
    for ( std::size_t i = 0; i < merged.rules.size(); ++i )
    {
        const auto& r = merged.rules[ i ];
        const auto& c = merged.classes[ i ];
        if ( derived.is_dynamic( r.defined_symbol() ) )
            defined_dynamic.insert( r.defined_symbol() );
        switch ( c.kind )
        {
        case SentenceKind::Static: rules.push_back( r ); break;
        case SentenceKind::Initial:
            rules.push_back( eliminate_initial( r, derived ) );
            covered.insert( r.defined_symbol() );
            break;
        case SentenceKind::UniversalSingleState:
            rules.push_back( eliminate( r, c, derived, false ) );
            covered.insert( r.defined_symbol() );
            break;
        default: break;
        }
    }
    // A defined symbol without rules at the first state is false there.
    for ( const auto& d : derived.base->symbols() )
        if ( defined_dynamic.contains( d.name ) && !covered.contains( d.name ) )
            rules.push_back( false_rule( *derived.single_state, derived.projections.at( d.name ).projected ) );
    finish_definition( out, std::move( rules ) );
    return out;
}

Theory derive_transition_theory( const LtcTheory& theory, const DerivedVocabularies& derived )
{
    Theory out;
    out.name = theory.theory.name + "t";
    out.vocabulary = derived.bistate;
    const auto& src = theory.theory;
    for ( std::size_t i = 0; i < src.sentences.size(); ++i )
    {
        const auto& c = theory.sentence_classes[ i ];
        switch ( c.kind )
        {
        case SentenceKind::Static: out.sentences.push_back( src.sentences[ i ] ); break;
        case SentenceKind::UniversalSingleState:
            out.sentences.push_back( eliminate( src.sentences[ i ], c, derived, false ) );
            out.sentences.push_back( eliminate( src.sentences[ i ], c, derived, true ) );
            break;
        case SentenceKind::UniversalBistate:
            out.sentences.push_back( eliminate( src.sentences[ i ], c, derived, false ) );
            break;
        default: break;
        }
    }

    const auto merged = merge_definitions( theory );
    // Symbols whose later states also get values from initial or bistate
    // rules: their current state is given, not recomputed.
    std::set< std::string > mixed;
    std::set< std::string > single_state;
    for ( std::size_t i = 0; i < merged.rules.size(); ++i )
    {
        const auto& k = merged.classes[ i ].kind;
        if ( k == SentenceKind::UniversalSingleState )
            single_state.insert( merged.rules[ i ].defined_symbol() );
    }
    for ( std::size_t i = 0; i < merged.rules.size(); ++i )
    {
        const auto& k = merged.classes[ i ].kind;
        const auto& s = merged.rules[ i ].defined_symbol();
        if ( ( k == SentenceKind::Initial || k == SentenceKind::UniversalBistate ) && single_state.contains( s ) )
            mixed.insert( s );
    }

    std::vector< Rule > rules;
    std::set< std::string > defined_dynamic;
    std::set< std::string > covered_next;
    for ( std::size_t i = 0; i < merged.rules.size(); ++i )
    {
        const auto& r = merged.rules[ i ];
        const auto& c = merged.classes[ i ];
        if ( derived.is_dynamic( r.defined_symbol() ) )
            defined_dynamic.insert( r.defined_symbol() );
        switch ( c.kind )
        {
        case SentenceKind::Static: rules.push_back( r ); break;
        case SentenceKind::UniversalSingleState:
            if ( !mixed.contains( r.defined_symbol() ) )
                rules.push_back( eliminate( r, c, derived, false ) );
            rules.push_back( eliminate( r, c, derived, true ) );
            covered_next.insert( r.defined_symbol() );
            break;
        case SentenceKind::UniversalBistate:
            rules.push_back( eliminate( r, c, derived, false ) );
            covered_next.insert( r.defined_symbol() );
            break;
        default: break;
        }
    }
    for ( const auto& d : derived.base->symbols() )
        if ( defined_dynamic.contains( d.name ) && !covered_next.contains( d.name ) )
            rules.push_back( false_rule( *derived.bistate, derived.projections.at( d.name ).next ) );
    finish_definition( out, std::move( rules ) );
    return out;
}

DerivedTheories derive_theories( const LtcTheory& theory )
{
    DerivedTheories out;
    out.vocabularies = derive_vocabularies( theory.theory.vocabulary );
    out.initial = derive_initial_theory( theory, out.vocabularies );
    out.transition = derive_transition_theory( theory, out.vocabularies );
    return out;
}

bool is_time_free( const FormulaPtr& f )
{
    bool ok = true;
    for_each_term( f, [ & ]( const TermPtr& t ) {
        ok = ok && !t->is_time() && t->kind != Term::Kind::Init && t->kind != Term::Kind::Succ;
    } );
    if ( !ok )
        return false;
    if ( std::any_of( f->vars.begin(), f->vars.end(), []( const Variable& v ) { return is_time_sort( v.sort ); } ) )
        return false;
    return std::all_of( f->children.begin(), f->children.end(), is_time_free );
}

} // namespace ltc
