#include "oracle.hpp"
#include "programs.hpp"

#include "ltc/inference.hpp"
#include "ltc/textio.hpp"

#include <gtest/gtest.h>

using namespace ltc;
using namespace ltc::testing;

namespace
{

SolveOptions all()
{
    SolveOptions o;
    o.nbmodels = 0;
    return o;
}

struct Corridor : ::testing::Test
{
    // GameOver is defined here, so states are fixed by Move alone.
    SourceProgram p = load_programs( { "pacman-game.ltc", "win.ltc", "reach-east.ltc" } );
    Engine e{ theory_named( p, "T" ) };
    const Structure& corridor = structure_named( p, "corridor3" );

    Structure initial() { return e.initialise( corridor, all() ).at( 0 ); }
    FormulaPtr state_formula( const std::string& text ) const
    {
        return parse_formula( text, e.vocabularies().single_state );
    }
};

} // namespace

TEST_F( Corridor, InitialStates )
{
    const auto init = e.initialise( corridor, all() );
    ASSERT_EQ( init.size(), 3u );
    for ( const auto& s : init )
        EXPECT_EQ( s.value( "Pos", { "pm" } ), init[ 0 ].value( "Pos", { "pm" } ) );
    EXPECT_EQ( init[ 0 ].value( "Pos", { "pm" } ), std::optional< std::string >( "s1" ) );
    for ( const auto* s : { "s1", "s2", "s3" } )
        EXPECT_EQ( init[ 0 ].truth( "Pell", { s } ), TruthValue::True );
    // Move is exogenous: none, E or W.
    EXPECT_EQ( keys( init ), keys( brute_initial_states( e, corridor ) ) );
}

TEST_F( Corridor, SuccessorsFollowTheMove )
{
    auto s = initial();
    s.set_truth( "Move", { "pm", "E" }, TruthValue::True );
    s.set_truth( "Move", { "pm", "W" }, TruthValue::False );
    const auto next = e.progress( s, all() );
    ASSERT_EQ( next.size(), 3u ); // three choices of the next move
    for ( const auto& n : next )
    {
        EXPECT_EQ( n.value( "Pos", { "pm" } ), std::optional< std::string >( "s2" ) );
        EXPECT_EQ( n.truth( "Pell", { "s1" } ), TruthValue::False );
    }
    const auto groups = group_successors( next );
    ASSERT_EQ( groups.size(), 3u );
    EXPECT_EQ( groups[ 0 ].states.size(), 1u );
    std::set< std::string > labels;
    for ( const auto& g : groups )
        labels.insert( g.label );
    EXPECT_TRUE( labels.count( "(none)" ) );
    EXPECT_TRUE( labels.count( "Move(pm,E)" ) );
}

TEST_F( Corridor, StreamingStopsEarly )
{
    std::size_t seen = 0;
    e.for_each_successor( initial(), all(), [ & ]( const Structure& ) { return ++seen < 2; } );
    EXPECT_EQ( seen, 2u );
}

TEST_F( Corridor, InitialSliceOfLinearTimeStructure )
{
    auto J = rebase( corridor, e.vocabularies().base );
    J.set_time_horizon( 3 );
    const auto slice = e.initial_slice( J );
    EXPECT_EQ( &slice.vocabulary(), e.vocabularies().single_state.get() );
    EXPECT_EQ( slice.value( "StartPos", { "pm" } ), std::optional< std::string >( "s1" ) );
}

TEST_F( Corridor, WeakCompatibility )
{
    const auto s0 = initial();
    auto s1 = e.progress( s0, all() ).at( 0 );
    EXPECT_TRUE( e.is_weakly_compatible( Chain{ { s0, s1 } } ) );
    EXPECT_NE( e.kleene_compatibility( Chain{ { s0, s1 } } ), TruthValue::False );
    auto bad = s1;
    bad.set_value( "Pos", { "pm" }, "s3" );
    EXPECT_FALSE( e.is_weakly_compatible( Chain{ { s0, bad } } ) );
    EXPECT_EQ( e.kleene_compatibility( Chain{ { s0, bad } } ), TruthValue::False );
}

TEST_F( Corridor, StrongSuccessorsAreWeakOnes )
{
    const Chain c{ { initial() } };
    const auto weak = e.progress( c.back(), all() );
    const auto strong = keys( e.strong_successors_bounded( c, 2 ) );
    // Moving west from s1 has no successor; every other weak successor
    // can stand still forever.
    std::set< std::string > expected;
    for ( const auto& s : weak )
        if ( !( s.value( "Pos", { "pm" } ) == std::optional< std::string >( "s1" ) &&
                s.truth( "Move", { "pm", "W" } ) == TruthValue::True ) )
            expected.insert( key( s ) );
    EXPECT_LT( expected.size(), weak.size() );
    EXPECT_EQ( strong, expected );
    EXPECT_EQ( keys( e.strong_successors_bounded( c, 0 ) ), keys( weak ) );
}

TEST_F( Corridor, RandomSimulationIsReproducible )
{
    SimulationPolicy policy;
    policy.seed = 7;
    policy.max_steps = 6;
    const auto a = e.simulate( corridor, policy );
    const auto b = e.simulate( corridor, policy );
    EXPECT_TRUE( a.reason == StopReason::MaxSteps || a.reason == StopReason::Deadlock );
    EXPECT_EQ( a.reason == StopReason::MaxSteps, a.chain.size() == 7u );
    EXPECT_EQ( a.seed, 7u );
    EXPECT_EQ( keys( a.chain.states ), keys( b.chain.states ) );
    EXPECT_TRUE( e.is_weakly_compatible( a.chain ) );
}

TEST_F( Corridor, ScriptedSimulationByLabel )
{
    SimulationPolicy policy;
    policy.mode = SimulationPolicy::Mode::Scripted;
    policy.script = { std::string( "Move(pm,E)" ), std::string( "Move(pm,E)" ), std::string( "(none)" ) };
    std::vector< std::size_t > shown;
    policy.show = [ & ]( const Structure&, std::size_t step ) { shown.push_back( step ); };
    const auto r = e.simulate( corridor, policy );
    EXPECT_EQ( r.reason, StopReason::ChoicesExhausted );
    ASSERT_EQ( r.chain.size(), 3u );
    EXPECT_EQ( r.chain.back().value( "Pos", { "pm" } ), std::optional< std::string >( "s3" ) );
    EXPECT_EQ( shown, ( std::vector< std::size_t >{ 0, 1, 2 } ) );
}

TEST_F( Corridor, EndConditionStopsTheRun )
{
    SimulationPolicy policy;
    policy.mode = SimulationPolicy::Mode::Scripted;
    policy.script = { std::string( "Move(pm,E)" ), std::string( "Move(pm,E)" ), std::string( "(none)" ),
                      std::string( "(none)" ) };
    const auto at_east = state_formula( "Pos(pacman) = s3" );
    policy.endcheck = [ & ]( const Structure& s ) { return kleene_eval( at_east, s ) == TruthValue::True; };
    const auto r = e.simulate( corridor, policy );
    EXPECT_EQ( r.reason, StopReason::EndConditionMet );
    EXPECT_EQ( r.chain.size(), 3u );
}

TEST_F( Corridor, HookFailureIsReported )
{
    SimulationPolicy policy;
    policy.mode = SimulationPolicy::Mode::Interactive;
    policy.choose = []( const ChoiceRequest& ) -> std::size_t { throw std::runtime_error( "boom" ); };
    const auto r = e.simulate( corridor, policy );
    EXPECT_EQ( r.reason, StopReason::HookFailure );
    EXPECT_NE( r.message.find( "boom" ), std::string::npos );
}

TEST_F( Corridor, InvalidScriptChoice )
{
    SimulationPolicy policy;
    policy.mode = SimulationPolicy::Mode::Scripted;
    policy.script = { std::size_t( 99 ) };
    EXPECT_EQ( e.simulate( corridor, policy ).reason, StopReason::HookFailure );
}

TEST_F( Corridor, Planning )
{
    const auto& win = theory_named( p, "Win" );
    EXPECT_FALSE( e.plan( win, corridor, 2 ).found );
    const auto plan = e.plan( win, corridor, 3 );
    ASSERT_TRUE( plan.found );
    EXPECT_TRUE( e.is_weakly_compatible( plan.chain ) );
    const auto optimal = e.plan_optimal( win, corridor, 6 );
    ASSERT_TRUE( optimal.found );
    EXPECT_EQ( optimal.optimum, 3 );
}

TEST_F( Corridor, OptimalPlanIsCutAtTheOptimum )
{
    const auto& reach = theory_named( p, "ReachEast" );
    const auto optimal = e.plan_optimal( reach, corridor, 4 );
    ASSERT_TRUE( optimal.found );
    EXPECT_EQ( optimal.optimum, 2 );
    ASSERT_GE( optimal.chain.size(), 3u );
    EXPECT_EQ( optimal.chain.states[ 2 ].value( "Pos", { "pm" } ), std::optional< std::string >( "s3" ) );
    EXPECT_NE( optimal.chain.states[ 1 ].value( "Pos", { "pm" } ), std::optional< std::string >( "s3" ) );
}

TEST_F( Corridor, OptimalPlanningNeedsExistentialGoal )
{
    const auto goal = parse_or_throw( "theory G : V { ! t[Time]: Pos(pacman,t) ~= s3. }", &p );
    EXPECT_THROW( e.plan_optimal( goal.theories[ 0 ], corridor, 3 ), Error );
}

TEST_F( Corridor, InvariantVerdicts )
{
    const auto& V = e.vocabularies().base;
    const auto never = e.check_invariant(
        parse_formula( "! t[Time] s[Square]: ~Pell(s,t) => ~Pell(s,Succ(t))", V ), corridor );
    EXPECT_TRUE( never.proven() );
    EXPECT_EQ( never.kind, SentenceKind::UniversalBistate );

    const auto base = e.check_invariant( parse_formula( "! t[Time]: Pos(pacman,t) = s2", V ), corridor );
    EXPECT_EQ( base.status, InvariantVerdict::Status::BaseCounterexample );
    ASSERT_TRUE( base.witness );
    EXPECT_TRUE( satisfies( *base.witness, e.derived().initial ) );
    EXPECT_NE( base.summary().find( "base case" ), std::string::npos );

    const auto other = e.check_invariant( parse_formula( "? t[Time]: Pos(pacman,t) = s2", V ), corridor );
    EXPECT_EQ( other.status, InvariantVerdict::Status::NotApplicable );
    EXPECT_NE( other.summary().find( "NOT APPLICABLE" ), std::string::npos );
}

TEST( Inference, DeadlockIsDetected )
{
    const auto p = load_programs( { "deadlock.ltc" } );
    Engine e( theory_named( p, "T" ) );
    SimulationPolicy policy;
    const auto r = e.simulate( structure_named( p, "empty" ), policy );
    EXPECT_EQ( r.reason, StopReason::Deadlock );
    EXPECT_EQ( r.chain.size(), 1u );
    EXPECT_TRUE( e.detect_deadlock( r.chain.back() ) );
    EXPECT_TRUE( e.strong_successors_bounded( r.chain, 0 ).empty() );
}

TEST( Inference, NoInitialState )
{
    const auto p = parse_or_throw( R"(
vocabulary W { type Time  P(Time) }
theory T : W { P(Init). ~P(Init). }
structure D : W { }
)" );
    Engine e( p.theories[ 0 ] );
    SimulationPolicy policy;
    EXPECT_EQ( e.simulate( p.structures[ 0 ].structure, policy ).reason, StopReason::NoInitialState );
}

TEST( Inference, ExogenousLabels )
{
    const auto p = load_programs( { "pacman-game.ltc" } );
    Engine e( theory_named( p, "T" ) );
    auto s = e.initialise( structure_named( p, "corridor3" ), all() ).at( 0 );
    s.set_truth( "Move", { "pm", "E" }, TruthValue::False );
    s.set_truth( "Move", { "pm", "W" }, TruthValue::False );
    EXPECT_EQ( exogenous_label( s ), "(none)" );
    s.set_truth( "Move", { "pm", "W" }, TruthValue::True );
    EXPECT_EQ( exogenous_label( s ), "Move(pm,W)" );
}
