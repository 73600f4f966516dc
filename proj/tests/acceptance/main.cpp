#include "criteria.hpp"

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace ltc::testing;

namespace
{

struct Criterion
{
    int number;
    const char* name;
    double time_limit; // seconds; 0 for none
    std::function< Report() > run;
};

constexpr std::uint64_t seed = 20240601;

} // namespace

int main()
{
    const std::vector< Criterion > criteria = {
        { 1, "golden derivation", 1.0, [] { return check_golden_derivation(); } },
        { 2, "decomposition oracle", 60.0, [] { return check_decomposition( 100, seed ); } },
        { 3, "weak progression", 0, [] { return check_weak_progression( 100, seed ); } },
        { 4, "weak Markov", 0, [] { return check_weak_markov( 50, seed ); } },
        { 5, "deadlock example", 0, [] { return check_deadlock_example(); } },
        { 6, "Kleene properties", 0, [] { return check_kleene( 1000, 1000, 100, seed ); } },
        { 7, "invariants", 5.0, [] { return check_invariants(); } },
        { 8, "planning", 5.0, [] { return check_planning(); } },
        { 9, "round trip", 0, [] { return check_round_trip( 500, seed ); } },
        { 10, "induction soundness", 0, [] { return check_induction_soundness( 100, seed ); } },
    };
    int failures = 0;
    for ( const auto& c : criteria )
    {
        Report r;
        try
        {
            r = c.run();
        }
        catch ( const std::exception& e )
        {
            r.pass = false;
            r.detail = std::string( "exception: " ) + e.what();
        }
        bool pass = r.pass;
        std::string detail = r.detail;
        if ( c.time_limit > 0 && r.seconds >= c.time_limit )
        {
            pass = false;
            detail += " (time limit " + std::to_string( c.time_limit ) + " s exceeded)";
        }
        failures += !pass;
        std::printf( "%s %d %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", c.number, c.name, detail.c_str(), r.seconds );
        std::fflush( stdout );
    }
    return failures == 0 ? 0 : 1;
}
