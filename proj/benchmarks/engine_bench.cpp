#include "ltc/inference.hpp"
#include "ltc/textio.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

using namespace ltc;

namespace
{

std::string slurp( const std::string& name )
{
    std::ifstream in( std::string( LTC_PROGRAMS_DIR ) + "/" + name );
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Pacman
{
    SourceProgram program;
    SourceProgram domains;
    SourceProgram goals;

    Pacman()
        : program( parse_or_throw( slurp( "pacman.ltc" ) ) ),
          domains( parse_or_throw( slurp( "corridor3.ltc" ) + slurp( "grid2x2.ltc" ), &program ) ),
          goals( parse_or_throw( slurp( "win.ltc" ), &program ) )
    {
    }

    const Theory& theory() const { return *program.find_theory( "T" ); }
    const Structure& domain( const char* name ) const { return domains.find_structure( name )->structure; }
};

const Pacman& pacman()
{
    static const Pacman p;
    return p;
}

void BM_Parse( benchmark::State& state )
{
    const auto text = slurp( "pacman.ltc" );
    for ( auto _ : state )
        benchmark::DoNotOptimize( parse( text ) );
}
BENCHMARK( BM_Parse );

void BM_Derive( benchmark::State& state )
{
    for ( auto _ : state )
        benchmark::DoNotOptimize( Engine( pacman().theory() ) );
}
BENCHMARK( BM_Derive );

void BM_ProgressAll( benchmark::State& state )
{
    Engine e( pacman().theory() );
    const auto& grid = pacman().domain( "grid2x2" );
    const auto s0 = e.initialise( grid ).at( 0 );
    SolveOptions all;
    all.nbmodels = 0;
    for ( auto _ : state )
        benchmark::DoNotOptimize( e.progress( s0, all ) );
}
BENCHMARK( BM_ProgressAll );

void BM_RandomSimulation( benchmark::State& state )
{
    Engine e( pacman().theory() );
    const auto& grid = pacman().domain( "grid2x2" );
    SimulationPolicy p;
    p.max_steps = static_cast< std::size_t >( state.range( 0 ) );
    for ( auto _ : state )
    {
        p.seed++;
        benchmark::DoNotOptimize( e.simulate( grid, p ) );
    }
}
BENCHMARK( BM_RandomSimulation )->Arg( 5 )->Arg( 20 );

void BM_InvariantGrid( benchmark::State& state )
{
    Engine e( pacman().theory() );
    const auto phi = parse_formula( "! t[Time] s[Square]: ~Pell(s,t) => ~Pell(s,Succ(t))", e.vocabularies().base );
    const auto& grid = pacman().domain( "grid2x2" );
    for ( auto _ : state )
        benchmark::DoNotOptimize( e.check_invariant( phi, grid ) );
}
BENCHMARK( BM_InvariantGrid );

void BM_PlanWin( benchmark::State& state )
{
    Engine e( pacman().theory() );
    const auto& corridor = pacman().domain( "corridor3" );
    const auto& win = *pacman().goals.find_theory( "Win" );
    for ( auto _ : state )
        benchmark::DoNotOptimize( e.plan( win, corridor, static_cast< int >( state.range( 0 ) ) ) );
}
BENCHMARK( BM_PlanWin )->Arg( 3 )->Arg( 6 );

} // namespace

BENCHMARK_MAIN();
