#include "ltc/inference.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace ltc
{

std::string_view to_string( StopReason r ) noexcept
{
    switch ( r )
    {
    case StopReason::EndConditionMet: return "EndConditionMet";
    case StopReason::Deadlock: return "Deadlock";
    case StopReason::MaxSteps: return "MaxSteps";
    case StopReason::ChoicesExhausted: return "ChoicesExhausted";
    case StopReason::NoInitialState: return "NoInitialState";
    case StopReason::HookFailure: return "HookFailure";
    }
    return "?";
}

namespace
{

std::string tuple_names( const Structure& s, std::size_t sym, std::size_t index )
{
    const auto& voc = s.vocabulary();
    const auto& d = voc.symbols()[ sym ];
    const auto tuple = s.tuple_at( sym, index );
    std::string out;
    for ( std::size_t i = 0; i < tuple.size(); ++i )
        out += ( i ? "," : "" ) +
               s.domain( *voc.sort_index( d.arg_sorts[ i ] ) )[ static_cast< std::size_t >( tuple[ i ] ) ];
    return tuple.empty() ? d.name : d.name + "(" + out + ")";
}

} // namespace

std::string exogenous_label( const Structure& state )
{
    const auto& voc = state.vocabulary();
    std::vector< std::string > lits;
    for ( std::size_t f = 0; f < voc.symbols().size(); ++f )
    {
        const auto& d = voc.symbols()[ f ];
        if ( !d.exogenous || !state.has_table( f ) )
            continue;
        for ( std::size_t i = 0; i < state.table_size( f ); ++i )
        {
            if ( d.is_function() )
            {
                const int v = state.value( f, i );
                if ( v >= 0 )
                    lits.push_back( tuple_names( state, f, i ) + "=" +
                                    state.domain( *voc.sort_index( *d.out_sort ) )[ static_cast< std::size_t >( v ) ] );
            }
            else if ( state.truth( f, i ) == TruthValue::True )
                lits.push_back( tuple_names( state, f, i ) );
        }
    }
    if ( lits.empty() )
        return "(none)";
    std::sort( lits.begin(), lits.end() );
    std::string out;
    for ( std::size_t i = 0; i < lits.size(); ++i )
        out += ( i ? ", " : "" ) + lits[ i ];
    return out;
}

std::vector< SuccessorGroup > group_successors( const std::vector< Structure >& states )
{
    std::vector< SuccessorGroup > groups;
    std::map< std::string, std::size_t > index;
    for ( const auto& s : states )
    {
        auto label = exogenous_label( s );
        auto [ it, fresh ] = index.emplace( label, groups.size() );
        if ( fresh )
            groups.push_back( { std::move( label ), {} } );
        groups[ it->second ].states.push_back( s );
    }
    return groups;
}

std::string InvariantVerdict::summary() const
{
    switch ( status )
    {
    case Status::ProvenByInduction:
        return "PROVEN (induction: base ok, step ok)";
    case Status::BaseCounterexample: return "NOT PROVABLE BY INDUCTION (base case fails: an initial state violates it)";
    case Status::StepCounterexample:
        return kind == SentenceKind::UniversalBistate
                   ? "NOT PROVABLE (refuted over bounded unrolling: a transition violates it)"
                   : "NOT PROVABLE BY INDUCTION (step case fails: a transition breaks it)";
    case Status::NotApplicable: return "NOT APPLICABLE (" + reason + ")";
    }
    return "?";
}

struct Engine::Impl
{
    LtcTheory ltc;
    DerivedTheories derived;
    std::optional< Structure > progress_key;
    std::unique_ptr< ModelExpander > progress_solver;

    const DerivedVocabularies& v() const { return derived.vocabularies; }

    Structure to_base( const Structure& J ) const
    {
        if ( J.vocabulary() == *v().base )
            return J;
        return rebase( J, v().base );
    }

    Structure to_state( const Structure& S ) const
    {
        if ( S.vocabulary() == *v().single_state )
            return S;
        if ( S.vocabulary().name() == v().single_state->name() )
            return rebase( S, v().single_state );
        throw Error( ErrorCode::InvalidArgument, "structure " + S.name() + " is not a state of " + v().base->name() );
    }

    std::set< std::string > projected_names() const
    {
        std::set< std::string > out;
        for ( const auto& [ dyn, p ] : v().projections )
            out.insert( p.projected );
        return out;
    }
};

Engine::Engine( const Theory& theory ) : _impl( std::make_unique< Impl >() )
{
    _impl->ltc = require_ltc_theory( expand_fluent_macro( theory ) );
    _impl->derived = derive_theories( _impl->ltc );
}

Engine::~Engine() = default;
Engine::Engine( Engine&& ) noexcept = default;
Engine& Engine::operator=( Engine&& ) noexcept = default;

const LtcTheory& Engine::ltc() const
{
    return _impl->ltc;
}

const DerivedTheories& Engine::derived() const
{
    return _impl->derived;
}

Structure Engine::initial_slice( const Structure& J ) const
{
    const auto& v = vocabularies();
    if ( J.vocabulary() == *v.single_state )
        return J;
    auto base = _impl->to_base( J );
    const auto time = base.time_sort();
    if ( time && base.has_domain( *time ) )
        return project_state( base, 0, v );
    return rebase( base, v.single_state );
}

std::vector< Structure > Engine::initialise( const Structure& J, const SolveOptions& options )
{
    return model_expand( derived().initial, initial_slice( J ), options );
}

std::size_t Engine::for_each_successor( const Structure& state, const SolveOptions& options,
                                       const std::function< bool( const Structure& ) >& fn )
{
    const auto S = _impl->to_state( state );
    const auto& v = vocabularies();
    const auto B = rebase( S, v.bistate );
    if ( !_impl->progress_solver || !same_statics( *_impl->progress_key, S, v ) )
    {
        _impl->progress_solver.reset();
        _impl->progress_solver =
            std::make_unique< ModelExpander >( derived().transition, B, _impl->projected_names() );
        _impl->progress_key = S;
    }
    return _impl->progress_solver->for_each_model( B, options,
                                                   [ & ]( const Structure& m ) { return fn( next_state( m, v ) ); } );
}

std::vector< Structure > Engine::progress( const Structure& state, const SolveOptions& options )
{
    std::vector< Structure > out;
    for_each_successor( state, options, [ & ]( const Structure& s ) {
        out.push_back( s );
        return true;
    } );
    return out;
}

bool Engine::detect_deadlock( const Structure& state )
{
    SolveOptions o;
    o.nbmodels = 1;
    return progress( state, o ).empty();
}

bool Engine::is_weakly_compatible( const Chain& chain ) const
{
    if ( chain.empty() )
        return false;
    const auto& v = vocabularies();
    if ( !satisfies( chain.states[ 0 ], derived().initial ) )
        return false;
    for ( std::size_t k = 0; k + 1 < chain.size(); ++k )
    {
        if ( !same_statics( chain.states[ k ], chain.states[ k + 1 ], v ) )
            return false;
        if ( !satisfies( pair_states( chain.states[ k ], chain.states[ k + 1 ], v ), derived().transition ) )
            return false;
    }
    return true;
}

TruthValue Engine::kleene_compatibility( const Chain& chain, int lookahead ) const
{
    return eval_theory( theory(), chain_as_structure( chain, vocabularies(), lookahead ) );
}

std::vector< Structure > Engine::strong_successors_bounded( const Chain& chain, int lookahead, std::uint64_t max_nodes )
{
    if ( chain.empty() )
        throw Error( ErrorCode::InvalidArgument, "empty chain" );
    SolveOptions all;
    all.nbmodels = 0;
    std::uint64_t nodes = 0;
    std::function< bool( const Structure&, int ) > extendable = [ & ]( const Structure& s, int depth ) {
        if ( depth == 0 )
            return true;
        if ( max_nodes && ++nodes > max_nodes )
            throw Error( ErrorCode::Budget, "bounded successor search exceeded " + std::to_string( max_nodes ) + " states" );
        for ( const auto& next : progress( s, all ) )
            if ( extendable( next, depth - 1 ) )
                return true;
        return false;
    };
    std::vector< Structure > out;
    for ( const auto& s : progress( chain.back(), all ) )
        if ( extendable( s, lookahead ) )
            out.push_back( s );
    return out;
}

namespace
{

struct Stop
{
    StopReason reason;
    std::string message;
};

class Chooser
{
public:
    Chooser( const SimulationPolicy& p ) : _p( p ), _rng( p.seed ) {}

    // Returns the chosen state, or throws Stop.
    Structure pick( std::size_t step, const Structure* current, const std::vector< Structure >& states )
    {
        if ( _p.mode == SimulationPolicy::Mode::Random )
        {
            std::uniform_int_distribution< std::size_t > dist( 0, states.size() - 1 );
            return states[ dist( _rng ) ];
        }
        const auto groups = group_successors( states );
        ChoiceRequest req{ step, current, &groups, nullptr };
        const auto g = group_index( req, groups );
        const auto& group = groups[ g ];
        if ( group.states.size() == 1 )
            return group.states[ 0 ];
        req.outcome = &group;
        const auto k = next_index( req );
        if ( k >= group.states.size() )
            throw Stop{ StopReason::HookFailure, "outcome choice " + std::to_string( k ) + " out of range" };
        return group.states[ k ];
    }

private:
    const SimulationPolicy& _p;
    std::mt19937_64 _rng;
    std::size_t _next = 0;

    std::size_t group_index( const ChoiceRequest& req, const std::vector< SuccessorGroup >& groups )
    {
        if ( _p.mode == SimulationPolicy::Mode::Scripted && _next < _p.script.size() )
            if ( const auto* label = std::get_if< std::string >( &_p.script[ _next ] ) )
            {
                ++_next;
                for ( std::size_t i = 0; i < groups.size(); ++i )
                    if ( groups[ i ].label == *label )
                        return i;
                throw Stop{ StopReason::HookFailure, "no successor with exogenous choice " + *label };
            }
        const auto i = next_index( req );
        if ( i >= groups.size() )
            throw Stop{ StopReason::HookFailure, "choice " + std::to_string( i ) + " out of range" };
        return i;
    }

    std::size_t next_index( const ChoiceRequest& req )
    {
        if ( _p.mode == SimulationPolicy::Mode::Interactive )
        {
            if ( !_p.choose )
                throw Stop{ StopReason::HookFailure, "no choose hook" };
            return _p.choose( req );
        }
        if ( _next >= _p.script.size() )
            throw Stop{ StopReason::ChoicesExhausted, "" };
        const auto& c = _p.script[ _next++ ];
        if ( const auto* i = std::get_if< std::size_t >( &c ) )
            return *i;
        throw Stop{ StopReason::HookFailure, "expected an index to resolve an outcome, got " + std::get< std::string >( c ) };
    }
};

// Runs user hook code; its exceptions end the simulation with HookFailure.
template < class F >
auto guarded( F&& f ) -> decltype( f() )
{
    try
    {
        return f();
    }
    catch ( const Stop& )
    {
        throw;
    }
    catch ( const std::exception& e )
    {
        throw Stop{ StopReason::HookFailure, e.what() };
    }
}

} // namespace

SimulationResult Engine::simulate( const Structure& J, const SimulationPolicy& policy )
{
    SimulationResult result;
    result.seed = policy.seed;
    SolveOptions opts;
    opts.nbmodels = policy.successor_cap;
    Chooser chooser( policy );
    try
    {
        auto candidates = initialise( J, opts );
        if ( candidates.empty() )
        {
            result.reason = StopReason::NoInitialState;
            return result;
        }
        auto state = guarded( [ & ] { return chooser.pick( 0, nullptr, candidates ); } );
        for ( std::size_t step = 0;; ++step )
        {
            result.chain.states.push_back( state );
            const bool end = guarded( [ & ] {
                if ( policy.show )
                    policy.show( state, step );
                return policy.endcheck && policy.endcheck( state );
            } );
            if ( end )
            {
                result.reason = StopReason::EndConditionMet;
                return result;
            }
            if ( policy.max_steps && step >= *policy.max_steps )
            {
                result.reason = StopReason::MaxSteps;
                return result;
            }
            auto successors = progress( state, opts );
            if ( successors.empty() )
            {
                result.reason = StopReason::Deadlock;
                return result;
            }
            state = guarded( [ & ] { return chooser.pick( step + 1, &result.chain.back(), successors ); } );
        }
    }
    catch ( const Stop& s )
    {
        result.reason = s.reason;
        result.message = s.message;
    }
    return result;
}

namespace
{

Theory with_sentences( const Theory& base, std::vector< FormulaPtr > extra, const std::string& name )
{
    Theory t = base;
    t.name = name;
    for ( auto& f : extra )
        t.sentences.push_back( std::move( f ) );
    return t;
}

} // namespace

InvariantVerdict Engine::check_invariant( const FormulaPtr& phi, const Structure& I, const SolveOptions& options )
{
    InvariantVerdict out;
    const auto cls = classify( phi );
    out.kind = cls.kind;
    if ( !cls.is_universal() )
    {
        out.reason = "not single-state/bistate: " + std::string( to_string( cls.kind ) ) +
                     ( cls.reason.empty() ? "" : ", " + cls.reason );
        return out;
    }
    const auto& v = vocabularies();
    const auto S = rebase( _impl->to_base( I ), v.single_state );
    const auto B = rebase( S, v.bistate );
    auto one = options;
    one.nbmodels = 1;
    const auto te = time_eliminate( phi, v );
    if ( cls.kind == SentenceKind::UniversalBistate )
    {
        auto m = model_expand( with_sentences( derived().transition, { Formula::negation( te ) }, "step" ), B, one );
        if ( m.empty() )
            out.status = InvariantVerdict::Status::ProvenByInduction;
        else
        {
            out.status = InvariantVerdict::Status::StepCounterexample;
            out.witness = std::move( m.front() );
        }
        return out;
    }
    auto base = model_expand( with_sentences( derived().initial, { Formula::negation( te ) }, "base" ), S, one );
    if ( !base.empty() )
    {
        out.status = InvariantVerdict::Status::BaseCounterexample;
        out.witness = std::move( base.front() );
        return out;
    }
    const auto te_next = time_eliminate( shift_to_next( phi, *cls.time_var ), v );
    auto step = model_expand( with_sentences( derived().transition, { te, Formula::negation( te_next ) }, "step" ), B, one );
    if ( !step.empty() )
    {
        out.status = InvariantVerdict::Status::StepCounterexample;
        out.witness = std::move( step.front() );
        return out;
    }
    out.status = InvariantVerdict::Status::ProvenByInduction;
    return out;
}

namespace
{

Theory merge_goal( const Theory& t, const Theory& goal )
{
    if ( goal.vocabulary && goal.vocabulary->name() != t.vocabulary->name() )
        throw Error( ErrorCode::InvalidArgument,
                     "goal " + goal.name + " is over " + goal.vocabulary->name() + ", not " + t.vocabulary->name() );
    Theory m = t;
    m.name = t.name + "+" + goal.name;
    for ( const auto& s : goal.sentences )
        m.sentences.push_back( s );
    for ( const auto& d : goal.definitions )
        m.definitions.push_back( d );
    return m;
}

} // namespace

PlanResult Engine::plan( const Theory& goal, const Structure& J, int horizon, const SolveOptions& options )
{
    if ( horizon < 0 )
        throw Error( ErrorCode::InvalidArgument, "negative horizon" );
    auto I = _impl->to_base( J );
    I.set_time_horizon( horizon );
    auto one = options;
    one.nbmodels = 1;
    auto models = model_expand( merge_goal( theory(), goal ), I, one );
    PlanResult out;
    if ( models.empty() )
        return out;
    out.found = true;
    out.model = std::move( models.front() );
    out.chain = chain_of( out.model, vocabularies() );
    return out;
}

OptimalPlanResult Engine::plan_optimal( const Theory& goal, const Structure& J, int horizon,
                                        const std::optional< TermPtr >& cost, const SolveOptions& options )
{
    if ( horizon < 0 )
        throw Error( ErrorCode::InvalidArgument, "negative horizon" );
    auto I = _impl->to_base( J );
    I.set_time_horizon( horizon );
    OptimalPlanResult out;
    MinimizeResult r;
    if ( cost )
        r = minimize( merge_goal( theory(), goal ), I, *cost, options );
    else
    {
        const auto& base = *vocabularies().base;
        if ( base.find_symbol( goal_time_name ) )
            throw Error( ErrorCode::NameCollision, std::string( goal_time_name ) + " is already declared" );
        auto voc = std::make_shared< Vocabulary >( base );
        SymbolDecl gt;
        gt.name = goal_time_name;
        gt.out_sort = std::string( time_sort_name );
        voc->add_symbol( gt );
        const auto goal_time = Term::apply( std::string( goal_time_name ), {}, std::string( time_sort_name ) );
        Theory timed = goal;
        timed.vocabulary = voc;
        for ( auto& s : timed.sentences )
        {
            if ( s->kind != Formula::Kind::Exists || !is_time_sort( s->vars.front().sort ) )
                throw Error( ErrorCode::InvalidArgument,
                             "goal sentences must have the form ? t[Time]: ... unless a cost term is given" );
            const auto t = s->vars.front();
            auto body = substitute( s->body(), *Term::variable( t ), goal_time );
            std::vector< Variable > rest( s->vars.begin() + 1, s->vars.end() );
            s = rest.empty() ? body : Formula::exists( rest, body );
        }
        auto merged = merge_goal( theory(), timed );
        merged.vocabulary = voc;
        r = minimize( merged, rebase( I, voc ), goal_time, options );
        for ( auto& m : r.models )
            m = rebase( m, vocabularies().base );
    }
    if ( !r.satisfiable )
        return out;
    out.found = true;
    out.optimum = r.optimum;
    out.model = std::move( r.models.front() );
    out.chain = chain_of( out.model, vocabularies() );
    return out;
}

} // namespace ltc
