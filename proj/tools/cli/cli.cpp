#include "cli.hpp"

#include "ltc/inference.hpp"
#include "ltc/service.hpp"
#include "ltc/textio.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ltc::cli
{

using nlohmann::json;

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_input = 2;

struct InputError : std::runtime_error
{
    std::vector< Issue > issues;
    InputError( const std::string& m, std::vector< Issue > is = {} ) : std::runtime_error( m ), issues( std::move( is ) ) {}
};

std::string slurp( const std::string& path )
{
    std::ifstream f( path );
    if ( !f )
        throw InputError( "cannot read " + path );
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

// Blocks parsed from one file, and the program they extend.
struct Loaded
{
    SourceProgram program;
    std::vector< const Theory* > theories;
    std::vector< const StructureBlock* > structures;
};

class Workspace
{
public:
    Loaded load( const std::string& path )
    {
        auto r = parse( slurp( path ), _have ? &_program : nullptr );
        if ( !r.ok() )
        {
            std::string msg;
            for ( const auto& d : r.diagnostics )
                msg += path + ":" + format_issue( d ) + "\n";
            throw InputError( msg, r.diagnostics );
        }
        _program = std::move( *r.program );
        _have = true;
        Loaded out;
        for ( const auto& b : _program.blocks )
        {
            if ( b.kind == SourceProgram::BlockKind::Theory )
                out.theories.push_back( &_program.theories[ b.index ] );
            if ( b.kind == SourceProgram::BlockKind::Structure )
                out.structures.push_back( &_program.structures[ b.index ] );
        }
        return out;
    }

    const SourceProgram& program() const { return _program; }

private:
    SourceProgram _program;
    bool _have = false;
};

// Per-invocation options shared by most subcommands.
struct Common
{
    std::vector< std::string > files;
    std::string theory;
    std::string structure;
    std::string domain;
    bool json = false;
};

struct Context
{
    std::ostream& out;
    std::ostream& err;
    std::istream& in;
    Common common;
    Workspace ws;
    // Copies, since later loads replace the workspace program.
    std::optional< Theory > theory;
    std::vector< Structure > structures;
    json result = json::object();
    std::vector< std::string > diagnostics;

    void load_main()
    {
        for ( const auto& f : common.files )
        {
            auto l = ws.load( f );
            if ( !theory && !l.theories.empty() && common.theory.empty() )
                theory = *l.theories.front();
            for ( const auto* s : l.structures )
                structures.push_back( s->structure );
        }
        if ( !common.theory.empty() )
        {
            const auto* t = ws.program().find_theory( common.theory );
            if ( !t )
                throw InputError( "no theory named " + common.theory );
            theory = *t;
        }
        if ( !theory )
            throw InputError( "no theory in the input files" );
        if ( !common.domain.empty() )
        {
            auto l = ws.load( common.domain );
            if ( l.structures.empty() )
                throw InputError( common.domain + " declares no structure" );
            structures.insert( structures.begin(), l.structures.front()->structure );
        }
    }

    Structure domain( const Engine& e ) const
    {
        if ( !common.structure.empty() )
        {
            for ( const auto& s : structures )
                if ( s.name() == common.structure )
                    return s;
            const auto* b = ws.program().find_structure( common.structure );
            if ( !b )
                throw InputError( "no structure named " + common.structure );
            return b->structure;
        }
        for ( const auto& s : structures )
            if ( s.vocabulary().name() == e.vocabularies().base->name() ||
                 s.vocabulary().name() == e.vocabularies().single_state->name() )
                return s;
        throw InputError( "no structure over " + e.vocabularies().base->name() +
                          " given; pass one with --domain or as an extra file" );
    }

    // Sentences of the first theory in a given file.
    std::pair< Theory, std::string > aux_theory( const std::string& path )
    {
        auto l = ws.load( path );
        if ( l.theories.empty() )
            throw InputError( path + " declares no theory" );
        return { *l.theories.front(), path };
    }
};

json state_json( const Structure& s, std::size_t step )
{
    return { { "step", step }, { "label", exogenous_label( s ) }, { "state", to_json( s ) } };
}

std::string state_text( Structure s, const std::string& name )
{
    s.set_name( name );
    return print( s, true );
}

SolveOptions with_models( std::size_t n )
{
    SolveOptions o;
    o.nbmodels = n;
    return o;
}

int cmd_check( Context& c )
{
    c.load_main();
    int rc = exit_ok;
    json checked = json::array();
    for ( const auto& t : c.ws.program().theories )
    {
        auto r = check_ltc_theory( expand_fluent_macro( t ) );
        json j = { { "theory", t.name }, { "ltc", r.ok() } };
        for ( const auto& w : r.warnings )
            c.diagnostics.push_back( t.name + ": warning: " + format_issue( w ) );
        if ( r.ok() )
        {
            if ( !c.common.json )
                c.out << "OK " << t.name << "\n";
        }
        else
        {
            rc = exit_negative;
            for ( const auto& e : r.errors )
                c.diagnostics.push_back( t.name + ": " + format_issue( e ) );
            if ( !c.common.json )
                c.out << "NOT LTC " << t.name << "\n";
        }
        checked.push_back( j );
    }
    c.result[ "theories" ] = checked;
    return rc;
}

int cmd_derive( Context& c )
{
    c.load_main();
    Engine e( *c.theory );
    const auto& d = e.derived();
    for ( const auto& w : d.warnings )
        c.diagnostics.push_back( "warning: " + format_issue( w ) );
    if ( c.common.json )
    {
        c.result[ "initial" ] = print( d.initial );
        c.result[ "transition" ] = print( d.transition );
    }
    else
        c.out << print( d.initial ) << "\n" << print( d.transition );
    return exit_ok;
}

int cmd_init( Context& c, std::size_t nbmodels )
{
    c.load_main();
    Engine e( *c.theory );
    const auto models = e.initialise( c.domain( e ), with_models( nbmodels ) );
    json states = json::array();
    for ( std::size_t i = 0; i < models.size(); ++i )
    {
        if ( c.common.json )
            states.push_back( state_json( models[ i ], 0 ) );
        else
            c.out << state_text( models[ i ], "initial_" + std::to_string( i ) ) << "\n";
    }
    c.result[ "states" ] = states;
    if ( models.empty() )
    {
        if ( !c.common.json )
            c.out << "NO INITIAL STATE\n";
        return exit_negative;
    }
    return exit_ok;
}

int cmd_progress( Context& c, const std::string& state_file, std::size_t nbmodels )
{
    c.load_main();
    Engine e( *c.theory );
    auto l = c.ws.load( state_file );
    if ( l.structures.empty() )
        throw InputError( state_file + " declares no state" );
    const auto state = l.structures.back()->structure;
    const auto groups = group_successors( e.progress( state, with_models( nbmodels ) ) );
    json out = json::array();
    std::size_t index = 0;
    for ( const auto& g : groups )
    {
        json members = json::array();
        if ( !c.common.json )
            c.out << "// choice: " << g.label << "\n";
        for ( const auto& s : g.states )
        {
            if ( c.common.json )
                members.push_back( to_json( s ) );
            else
                c.out << state_text( s, "successor_" + std::to_string( index ) ) << "\n";
            ++index;
        }
        out.push_back( { { "label", g.label }, { "states", members } } );
    }
    c.result[ "groups" ] = out;
    c.result[ "count" ] = index;
    if ( index == 0 )
    {
        if ( !c.common.json )
            c.out << "DEADLOCK: no successor state\n";
        return exit_negative;
    }
    return exit_ok;
}

std::vector< ScriptChoice > read_script( const std::string& path )
{
    json j = json::parse( slurp( path ), nullptr, false );
    if ( j.is_object() && j.contains( "choices" ) )
        j = j[ "choices" ];
    if ( j.is_discarded() || !j.is_array() )
        throw InputError( path + ": expected a JSON array of choices" );
    std::vector< ScriptChoice > out;
    for ( const auto& x : j )
    {
        if ( x.is_number_unsigned() )
            out.emplace_back( x.get< std::size_t >() );
        else if ( x.is_string() )
            out.emplace_back( x.get< std::string >() );
        else
            throw InputError( path + ": choices are indices or exogenous labels" );
    }
    return out;
}

struct SimulateArgs
{
    bool random = false;
    std::uint64_t seed = 0;
    std::string script;
    std::optional< std::size_t > max_steps;
    std::string end;
    std::size_t cap = 0;
};

int cmd_simulate( Context& c, const SimulateArgs& a )
{
    c.load_main();
    Engine e( *c.theory );
    SimulationPolicy p;
    p.seed = a.seed;
    p.max_steps = a.max_steps;
    p.successor_cap = a.cap;
    if ( a.random )
        p.mode = SimulationPolicy::Mode::Random;
    else if ( !a.script.empty() )
    {
        p.mode = SimulationPolicy::Mode::Scripted;
        p.script = read_script( a.script );
    }
    else
    {
        p.mode = SimulationPolicy::Mode::Interactive;
        p.choose = [ &c ]( const ChoiceRequest& r ) -> std::size_t {
            if ( r.outcome )
            {
                c.err << "outcomes of " << r.outcome->label << ":\n";
                for ( std::size_t i = 0; i < r.outcome->states.size(); ++i )
                    c.err << "  [" << i << "]\n" << state_text( r.outcome->states[ i ], "outcome" );
            }
            else
                for ( std::size_t i = 0; i < r.groups->size(); ++i )
                    c.err << "  [" << i << "] " << ( *r.groups )[ i ].label << " (" << ( *r.groups )[ i ].states.size()
                          << ")\n";
            // An index, or the label of a group.
            for ( std::string line;; )
            {
                c.err << "choice> " << std::flush;
                if ( !std::getline( c.in, line ) )
                    throw std::runtime_error( "input closed" );
                const auto first = line.find_first_not_of( " \t\r" );
                if ( first == std::string::npos )
                    continue;
                line = line.substr( first, line.find_last_not_of( " \t\r" ) - first + 1 );
                if ( line.find_first_not_of( "0123456789" ) == std::string::npos )
                    return std::stoul( line );
                if ( !r.outcome )
                    for ( std::size_t i = 0; i < r.groups->size(); ++i )
                        if ( ( *r.groups )[ i ].label == line )
                            return i;
                c.err << "unknown choice " << line << "\n";
            }
        };
    }
    if ( !a.end.empty() )
    {
        const auto end = parse_formula( a.end, e.vocabularies().single_state );
        p.endcheck = [ end ]( const Structure& s ) { return kleene_eval( end, s ) == TruthValue::True; };
    }
    const auto r = e.simulate( c.domain( e ), p );
    json states = json::array();
    for ( std::size_t k = 0; k < r.chain.size(); ++k )
    {
        if ( c.common.json )
            states.push_back( state_json( r.chain.states[ k ], k ) );
        else
            c.out << "// step " << k << ": " << exogenous_label( r.chain.states[ k ] ) << "\n"
                  << state_text( r.chain.states[ k ], "step_" + std::to_string( k ) ) << "\n";
    }
    c.result[ "states" ] = states;
    c.result[ "metadata" ] = { { "seed", r.seed }, { "reason", std::string( to_string( r.reason ) ) } };
    if ( !r.message.empty() )
        c.diagnostics.push_back( r.message );
    if ( !c.common.json )
        c.out << "STOP " << to_string( r.reason ) << " after " << ( r.chain.empty() ? 0 : r.chain.size() - 1 )
              << " steps (seed " << r.seed << ")\n";
    if ( r.reason == StopReason::HookFailure )
        return exit_input;
    return r.reason == StopReason::NoInitialState ? exit_negative : exit_ok;
}

int cmd_plan( Context& c, const std::string& goal_file, int horizon, bool optimal, const std::string& cost_text )
{
    c.load_main();
    Engine e( *c.theory );
    const auto goal = c.aux_theory( goal_file ).first;
    const auto J = c.domain( e );
    Chain chain;
    bool found = false;
    if ( optimal )
    {
        std::optional< TermPtr > cost;
        if ( !cost_text.empty() )
            cost = parse_term( cost_text, e.vocabularies().base );
        const auto r = e.plan_optimal( goal, J, horizon, cost );
        found = r.found;
        chain = r.chain;
        if ( found )
        {
            c.result[ "optimum" ] = r.optimum;
            if ( !cost && chain.size() > static_cast< std::size_t >( r.optimum ) + 1 )
                chain.states.resize( static_cast< std::size_t >( r.optimum ) + 1 );
            if ( !c.common.json )
                c.out << "OPTIMUM " << r.optimum << "\n";
        }
    }
    else
    {
        const auto r = e.plan( goal, J, horizon );
        found = r.found;
        chain = r.chain;
    }
    c.result[ "found" ] = found;
    c.result[ "horizon" ] = horizon;
    if ( !found )
    {
        if ( !c.common.json )
            c.out << "NO PLAN at horizon " << horizon << "\n";
        return exit_negative;
    }
    if ( !c.common.json )
        c.out << "PLAN at horizon " << horizon << "\n";
    json states = json::array();
    for ( std::size_t k = 0; k < chain.size(); ++k )
    {
        if ( c.common.json )
            states.push_back( state_json( chain.states[ k ], k ) );
        else
            c.out << "// step " << k << ": " << exogenous_label( chain.states[ k ] ) << "\n"
                  << state_text( chain.states[ k ], "step_" + std::to_string( k ) ) << "\n";
    }
    c.result[ "states" ] = states;
    return exit_ok;
}

int cmd_invariant( Context& c, const std::string& prop_file )
{
    c.load_main();
    Engine e( *c.theory );
    const auto prop = c.aux_theory( prop_file ).first;
    if ( prop.sentences.empty() )
        throw InputError( prop_file + " has no sentences" );
    const auto I = c.domain( e );
    bool all = true;
    json verdicts = json::array();
    for ( const auto& phi : prop.sentences )
    {
        const auto v = e.check_invariant( phi, I );
        all = all && v.proven();
        json j = { { "sentence", print( phi ) },
                   { "kind", std::string( to_string( v.kind ) ) },
                   { "proven", v.proven() },
                   { "verdict", v.summary() } };
        if ( v.witness )
            j[ "witness" ] = to_json( *v.witness );
        verdicts.push_back( j );
        if ( !c.common.json )
        {
            if ( prop.sentences.size() > 1 )
                c.out << print( phi ) << "\n";
            c.out << v.summary() << "\n";
            if ( v.witness )
            {
                auto w = *v.witness;
                w.set_name( "counterexample" );
                c.out << print( w ) << "\n";
            }
        }
    }
    c.result[ "verdicts" ] = verdicts;
    return all ? exit_ok : exit_negative;
}

int cmd_export( Context& c, const std::string& prop_file, const std::string& dir )
{
    c.load_main();
    Engine e( *c.theory );
    const auto prop = c.aux_theory( prop_file ).first;
    if ( prop.sentences.empty() )
        throw InputError( prop_file + " has no sentences" );
    std::filesystem::create_directories( dir );
    const auto stem = std::filesystem::path( prop_file ).stem().string();
    json files = json::array();
    for ( std::size_t i = 0; i < prop.sentences.size(); ++i )
    {
        const auto x = e.export_induction_obligations( prop.sentences[ i ] );
        for ( const auto& w : x.warnings )
            c.diagnostics.push_back( "warning: " + w.message );
        for ( const auto& d : x.documents )
        {
            const auto name = stem + ( prop.sentences.size() > 1 ? "_" + std::to_string( i ) : "" ) + "_" + d.name + ".p";
            const auto path = ( std::filesystem::path( dir ) / name ).string();
            std::ofstream f( path );
            f << d.text;
            if ( !f )
                throw InputError( "cannot write " + path );
            files.push_back( path );
            if ( !c.common.json )
                c.out << path << "\n";
        }
    }
    c.result[ "files" ] = files;
    return exit_ok;
}

void add_common( CLI::App* sub, Common& common, bool files = true )
{
    if ( files )
        sub->add_option( "files", common.files, "program files, later ones may refer to earlier ones" )->required();
    sub->add_option( "--theory", common.theory, "theory to use (default: first in the first file)" );
    sub->add_option( "--structure", common.structure, "structure to use" );
    sub->add_option( "--domain", common.domain, "file whose first structure fixes the domains" );
    sub->add_flag( "--json", common.json, "print a JSON envelope {ok, result, diagnostics}" );
}

} // namespace

int run( const std::vector< std::string >& args, std::ostream& out, std::ostream& err, std::istream& in )
{
    CLI::App app{ "Linear Time Calculus reasoning engine", "ltc" };
    app.require_subcommand( 1 );
    Context c{ out, err, in, {}, {}, {}, {}, json::object(), {} };

    auto* check = app.add_subcommand( "check", "parse and check that every theory is an LTC theory" );
    add_common( check, c.common );
    auto* derive = app.add_subcommand( "derive", "print the initial and transition theories" );
    add_common( derive, c.common );

    std::size_t nbmodels = 1;
    auto* init = app.add_subcommand( "init", "initial states" );
    add_common( init, c.common );
    init->add_option( "--nbmodels", nbmodels, "number of states, 0 for all" );

    std::string state_file;
    auto* progress = app.add_subcommand( "progress", "successor states of a state" );
    add_common( progress, c.common );
    progress->add_option( "--state", state_file, "file holding the current state" )->required();
    progress->add_option( "--nbmodels", nbmodels, "number of states, 0 for all" );

    SimulateArgs sim;
    auto* simulate = app.add_subcommand( "simulate", "run a simulation" );
    add_common( simulate, c.common );
    simulate->add_flag( "--random", sim.random, "choose successors uniformly at random" );
    simulate->add_option( "--seed", sim.seed, "random seed" );
    simulate->add_option( "--script", sim.script, "JSON array of choices (indices or labels)" );
    simulate->add_option( "--max-steps", sim.max_steps, "stop after this many steps" );
    simulate->add_option( "--end", sim.end, "stop when this state formula holds" );
    simulate->add_option( "--cap", sim.cap, "successors computed per step, 0 for all" );

    std::string goal, cost;
    int horizon = 0;
    bool optimal = false;
    auto* plan = app.add_subcommand( "plan", "bounded planning" );
    add_common( plan, c.common );
    plan->add_option( "--goal", goal, "file whose first theory is the goal" )->required();
    plan->add_option( "--horizon", horizon, "last time point" )->required()->check( CLI::NonNegativeNumber );
    plan->add_flag( "--optimal", optimal, "minimise the goal time, or --cost" );
    plan->add_option( "--cost", cost, "integer term to minimise" )->needs( "--optimal" );

    std::string prop;
    auto* invariant = app.add_subcommand( "invariant", "prove invariants by induction over fixed domains" );
    add_common( invariant, c.common );
    invariant->add_option( "--prop", prop, "file whose first theory holds the invariants" )->required();

    std::string dir;
    auto* tptp = app.add_subcommand( "export-tptp", "write induction obligations as TPTP FOF" );
    add_common( tptp, c.common );
    tptp->add_option( "--prop", prop, "file whose first theory holds the invariants" )->required();
    tptp->add_option( "--out", dir, "output directory" )->required();

    std::string host = "127.0.0.1", log_path;
    int port = 8080;
    service::Config config;
    long ttl = 30 * 60;
    auto* serve = app.add_subcommand( "serve", "run the HTTP session service" );
    serve->add_option( "--port", port, "port" )->envname( "LTC_PORT" );
    serve->add_option( "--host", host, "bind address" )->envname( "LTC_HOST" );
    serve->add_option( "--ttl", ttl, "session time to live in seconds" )->envname( "LTC_SESSION_TTL" );
    serve->add_option( "--cap", config.successor_cap, "successor cap" )->envname( "LTC_SUCCESSOR_CAP" );
    serve->add_option( "--log", log_path, "append session requests as JSON lines" )->envname( "LTC_SESSION_LOG" );

    std::vector< std::string > reversed( args.rbegin(), args.rend() );
    try
    {
        app.parse( reversed );
    }
    catch ( const CLI::CallForHelp& )
    {
        out << app.help();
        return exit_ok;
    }
    catch ( const CLI::ParseError& e )
    {
        err << e.what() << "\n";
        return exit_input;
    }

    int rc = exit_input;
    bool ok = false;
    try
    {
        if ( *check )
            rc = cmd_check( c );
        else if ( *derive )
            rc = cmd_derive( c );
        else if ( *init )
            rc = cmd_init( c, nbmodels );
        else if ( *progress )
            rc = cmd_progress( c, state_file, nbmodels );
        else if ( *simulate )
            rc = cmd_simulate( c, sim );
        else if ( *plan )
            rc = cmd_plan( c, goal, horizon, optimal, cost );
        else if ( *invariant )
            rc = cmd_invariant( c, prop );
        else if ( *tptp )
            rc = cmd_export( c, prop, dir );
        else if ( *serve )
        {
            config.ttl = std::chrono::seconds( ttl );
            if ( !log_path.empty() )
                config.log_path = log_path;
            err << "serving on " << host << ":" << port << "\n";
            return service::serve( host, port, config ) ? exit_ok : exit_input;
        }
        ok = rc != exit_input;
    }
    catch ( const InputError& e )
    {
        c.diagnostics.push_back( e.what() );
    }
    catch ( const Error& e )
    {
        if ( e.issues().empty() )
            c.diagnostics.push_back( std::string( to_string( e.code() ) ) + ": " + e.what() );
        for ( const auto& i : e.issues() )
            c.diagnostics.push_back( format_issue( i ) );
    }
    if ( c.common.json )
        out << json{ { "ok", ok && rc == exit_ok }, { "result", c.result }, { "diagnostics", c.diagnostics } }.dump( 2 )
            << "\n";
    for ( const auto& d : c.diagnostics )
    {
        err << d;
        if ( d.empty() || d.back() != '\n' )
            err << "\n";
    }
    return ok ? rc : exit_input;
}

} // namespace ltc::cli
