#include "ltc/classify.hpp"

#include <algorithm>
#include <map>

namespace ltc
{

std::string_view to_string( SentenceKind kind ) noexcept
{
    switch ( kind )
    {
    case SentenceKind::Static: return "static";
    case SentenceKind::Initial: return "initial";
    case SentenceKind::UniversalSingleState: return "universal single-state";
    case SentenceKind::UniversalBistate: return "universal bistate";
    case SentenceKind::Other: return "other";
    }
    return "other";
}

namespace
{

std::string render( const TermPtr& t )
{
    if ( t->args.empty() )
        return t->name;
    std::string s = t->name + "(";
    for ( std::size_t i = 0; i < t->args.size(); ++i )
    {
        if ( i )
            s += ",";
        s += render( t->args[ i ] );
    }
    return s + ")";
}

// Time-sorted material of a sentence or rule.
struct TimeScan
{
    std::vector< TermPtr > maximal_terms; // Time terms not nested under Succ
    std::set< std::string > time_vars;    // variables of sort Time, bound or free
    std::map< std::string, int > binders; // how often each Time variable is bound
    bool has_init = false;

    void term( const TermPtr& t, bool under_succ )
    {
        if ( t->is_time() )
        {
            if ( !under_succ )
                maximal_terms.push_back( t );
            if ( t->kind == Term::Kind::Init )
                has_init = true;
            if ( t->kind == Term::Kind::Variable )
                time_vars.insert( t->name );
        }
        const bool succ = t->kind == Term::Kind::Succ;
        for ( const auto& a : t->args )
            term( a, succ );
    }

    void formula( const FormulaPtr& f )
    {
        for ( const auto& v : f->vars )
            bind( v );
        for ( const auto& t : f->terms )
            term( t, false );
        for ( const auto& c : f->children )
            formula( c );
    }

    void bind( const Variable& v )
    {
        if ( is_time_sort( v.sort ) )
        {
            time_vars.insert( v.name );
            ++binders[ v.name ];
        }
    }
};

// Core classification; `outer` are the variables quantified at the very top
// (the leading Forall chain of a sentence, or a rule's variables).
SentenceClass classify_scan( const TimeScan& scan, const std::set< std::string >& outer )
{
    SentenceClass out;
    if ( scan.maximal_terms.empty() && scan.time_vars.empty() )
    {
        out.kind = SentenceKind::Static;
        return out;
    }
    if ( scan.has_init )
    {
        const bool only_init = scan.time_vars.empty()
                               && std::all_of( scan.maximal_terms.begin(), scan.maximal_terms.end(),
                                               []( const TermPtr& t ) { return t->kind == Term::Kind::Init; } );
        if ( only_init )
        {
            out.kind = SentenceKind::Initial;
            return out;
        }
        out.reason = "Init occurs together with other Time terms";
        return out;
    }
    if ( scan.time_vars.size() > 1 )
    {
        std::string names;
        for ( const auto& n : scan.time_vars )
            names += ( names.empty() ? "" : ", " ) + n;
        out.reason = "more than one Time variable (" + names + ")";
        return out;
    }
    if ( scan.time_vars.empty() )
    {
        out.reason = "Time term " + render( scan.maximal_terms.front() ) + " is not built from a Time variable";
        return out;
    }
    const std::string& t = *scan.time_vars.begin();
    bool bistate = false;
    for ( const auto& term : scan.maximal_terms )
    {
        if ( term->is_variable( t ) )
            continue;
        if ( term->kind == Term::Kind::Succ && term->args.front()->is_variable( t ) )
        {
            bistate = true;
            continue;
        }
        out.reason = "term " + render( term ) + " is neither " + t + " nor Succ(" + t + ")";
        return out;
    }
    auto it = scan.binders.find( t );
    const int bound = it == scan.binders.end() ? 0 : it->second;
    if ( !outer.contains( t ) || bound != 1 )
    {
        out.reason = "Time variable " + t + " is not universally quantified outermost";
        return out;
    }
    out.kind = bistate ? SentenceKind::UniversalBistate : SentenceKind::UniversalSingleState;
    out.time_var = Variable{ t, std::string( time_sort_name ) };
    return out;
}

std::optional< TermPtr > head_time( const Rule& r )
{
    const auto& args = r.head_args();
    if ( !args.empty() && args.back()->is_time() )
        return args.back();
    return std::nullopt;
}

bool mentions_succ( const FormulaPtr& f )
{
    bool found = false;
    for_each_term( f, [ & ]( const TermPtr& t ) { found = found || t->kind == Term::Kind::Succ; } );
    return found;
}

std::string rule_label( const Rule& r, std::size_t def, std::size_t idx )
{
    return "rule " + std::to_string( idx + 1 ) + " of definition " + std::to_string( def + 1 ) + " (defining "
           + r.defined_symbol() + ")";
}

} // namespace

SentenceClass classify( const FormulaPtr& sentence )
{
    TimeScan scan;
    scan.formula( sentence );
    std::set< std::string > outer;
    for ( const Formula* f = sentence.get(); f->kind == Formula::Kind::Forall; f = f->body().get() )
        for ( const auto& v : f->vars )
            outer.insert( v.name );
    return classify_scan( scan, outer );
}

SentenceClass classify( const Rule& rule )
{
    TimeScan scan;
    std::set< std::string > outer;
    for ( const auto& v : rule.vars )
    {
        scan.bind( v );
        outer.insert( v.name );
    }
    scan.formula( rule.head );
    scan.formula( rule.body );
    return classify_scan( scan, outer );
}

LtcCheck check_ltc_theory( const Theory& theory )
{
    LtcCheck check;
    LtcTheory ltc;
    ltc.theory = theory;

    for ( std::size_t i = 0; i < theory.sentences.size(); ++i )
    {
        auto cls = classify( theory.sentences[ i ] );
        if ( cls.kind == SentenceKind::Other )
            check.errors.push_back(
                Issue{ ErrorCode::NonLtcSentence, "sentence " + std::to_string( i + 1 ) + ": " + cls.reason, {} } );
        ltc.sentence_classes.push_back( std::move( cls ) );
    }

    std::map< std::string, std::size_t > defined_in;
    for ( std::size_t d = 0; d < theory.definitions.size(); ++d )
    {
        std::vector< SentenceClass > classes;
        const auto& rules = theory.definitions[ d ].rules;
        for ( std::size_t i = 0; i < rules.size(); ++i )
        {
            const Rule& r = rules[ i ];
            auto [ it, fresh ] = defined_in.emplace( r.defined_symbol(), d );
            if ( !fresh && it->second != d )
                check.errors.push_back( Issue{ ErrorCode::InvalidArgument,
                                               "symbol " + r.defined_symbol() + " is defined in more than one definition",
                                               {} } );
            auto cls = classify( r );
            if ( cls.kind == SentenceKind::Other )
            {
                check.errors.push_back(
                    Issue{ ErrorCode::NonLtcSentence, rule_label( r, d, i ) + ": " + cls.reason, {} } );
            }
            else
            {
                // Body side of a rule: its body plus the value side of a function head.
                std::vector< FormulaPtr > body{ r.body };
                if ( r.defines_function() )
                    body.push_back( Formula::eq( r.head->terms[ 1 ], r.head->terms[ 1 ] ) );
                const auto ht = head_time( r );
                if ( !ht )
                {
                    if ( cls.kind != SentenceKind::Static )
                        check.errors.push_back( Issue{ ErrorCode::FutureReference,
                                                       rule_label( r, d, i )
                                                           + ": static symbol defined in terms of dynamic values",
                                                       {} } );
                }
                else if ( ( *ht )->kind == Term::Kind::Variable )
                {
                    if ( std::any_of( body.begin(), body.end(), mentions_succ ) )
                        check.errors.push_back( Issue{ ErrorCode::FutureReference,
                                                       rule_label( r, d, i ) + ": head at " + ( *ht )->name
                                                           + " depends on a later time point",
                                                       {} } );
                }
            }
            classes.push_back( std::move( cls ) );
        }
        ltc.rule_classes.push_back( std::move( classes ) );
    }

    if ( check.ok() )
        check.theory = std::move( ltc );
    return check;
}

LtcTheory require_ltc_theory( const Theory& theory )
{
    auto check = check_ltc_theory( theory );
    if ( !check.ok() )
        throw Error( std::move( check.errors ) );
    return std::move( *check.theory );
}

} // namespace ltc
