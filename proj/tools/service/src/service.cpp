#include "ltc/service.hpp"

#include "ltc/inference.hpp"
#include "ltc/textio.hpp"

#include <httplib.h>

#include <fstream>
#include <random>
#include <sstream>

namespace ltc::service
{

using nlohmann::json;

enum class Status
{
    AwaitingInit,
    Running,
    Deadlock,
    Ended,
};

static const char* status_name( Status s )
{
    switch ( s )
    {
    case Status::AwaitingInit: return "AwaitingInit";
    case Status::Running: return "Running";
    case Status::Deadlock: return "Deadlock";
    case Status::Ended: return "Ended";
    }
    return "?";
}

struct Session
{
    std::string id;
    std::mutex mutex;
    SourceProgram program;
    std::unique_ptr< Engine > engine;
    Structure domain;
    FormulaPtr end;
    std::vector< Structure > history;
    // Initial candidates while awaiting init, successors of the last state after.
    std::vector< Structure > choices;
    bool truncated = false;
    Status status = Status::AwaitingInit;
    SessionStore::Clock::time_point touched = SessionStore::Clock::now();
};

namespace
{

Response error( int status, const std::string& kind, const std::string& message, json extra = json::object() )
{
    extra[ "error" ] = kind;
    extra[ "message" ] = message;
    return { status, std::move( extra ) };
}

json issues_json( const std::vector< Issue >& issues )
{
    json out = json::array();
    for ( const auto& i : issues )
        out.push_back( { { "code", std::string( to_string( i.code ) ) },
                         { "message", i.message },
                         { "line", i.span.line },
                         { "column", i.span.column } } );
    return out;
}

Response ltc_error( const Error& e )
{
    return error( 422, std::string( to_string( e.code() ) ), e.what(), { { "issues", issues_json( e.issues() ) } } );
}

std::string fresh_id()
{
    static std::mutex m;
    static std::random_device rd;
    std::lock_guard lock( m );
    std::ostringstream out;
    for ( int i = 0; i < 4; ++i )
    {
        char buf[ 9 ];
        std::snprintf( buf, sizeof buf, "%08x", rd() );
        out << buf;
    }
    return out.str();
}

std::vector< std::string > split_filter( const std::string& filter )
{
    std::vector< std::string > out;
    std::string cur;
    int depth = 0;
    for ( char c : filter )
    {
        if ( c == '(' )
            ++depth;
        if ( c == ')' )
            --depth;
        if ( c == ',' && depth == 0 )
        {
            out.push_back( cur );
            cur.clear();
        }
        else if ( c != ' ' )
            cur += c;
    }
    if ( !cur.empty() )
        out.push_back( cur );
    return out;
}

bool label_matches( const std::string& label, const std::vector< std::string >& required )
{
    std::vector< std::string > lits;
    std::string compact;
    for ( char c : label )
        if ( c != ' ' )
            compact += c;
    lits = split_filter( compact );
    for ( const auto& r : required )
        if ( std::find( lits.begin(), lits.end(), r ) == lits.end() )
            return false;
    return true;
}

bool ended( const Session& s, const Structure& state )
{
    return s.end && kleene_eval( s.end, state ) == TruthValue::True;
}

// Recomputes the successor cache and status from the last history state.
void refresh( Session& s, std::size_t cap )
{
    s.choices.clear();
    s.truncated = false;
    if ( s.history.empty() )
    {
        s.status = Status::AwaitingInit;
        SolveOptions o;
        o.nbmodels = cap + 1;
        s.choices = s.engine->initialise( s.domain, o );
    }
    else
    {
        const auto& last = s.history.back();
        if ( ended( s, last ) )
        {
            s.status = Status::Ended;
            return;
        }
        SolveOptions o;
        o.nbmodels = cap + 1;
        s.choices = s.engine->progress( last, o );
        s.status = s.choices.empty() ? Status::Deadlock : Status::Running;
    }
    if ( s.choices.size() > cap )
    {
        s.choices.resize( cap );
        s.truncated = true;
    }
}

json groups_json( const std::vector< Structure >& states, std::size_t first_index, bool with_states )
{
    json groups = json::array();
    std::map< std::string, std::size_t > where;
    for ( std::size_t i = 0; i < states.size(); ++i )
    {
        const auto label = exogenous_label( states[ i ] );
        auto [ it, fresh ] = where.emplace( label, groups.size() );
        if ( fresh )
            groups.push_back( { { "label", label }, { "choices", json::array() } } );
        json c = { { "index", first_index + i } };
        if ( with_states )
            c[ "state" ] = to_json( states[ i ] );
        groups[ it->second ][ "choices" ].push_back( std::move( c ) );
    }
    return groups;
}

json summary( const Session& s )
{
    json out = { { "id", s.id },
                 { "status", status_name( s.status ) },
                 { "step", s.history.empty() ? json( nullptr ) : json( s.history.size() - 1 ) },
                 { "history_length", s.history.size() },
                 { "state", s.history.empty() ? json( nullptr ) : to_json( s.history.back() ) },
                 { "choices", groups_json( s.choices, 0, false ) },
                 { "choice_count", s.choices.size() },
                 { "truncated", s.truncated } };
    return out;
}

std::optional< long long > int_field( const json& body, const char* name )
{
    if ( !body.is_object() || !body.contains( name ) || !body[ name ].is_number_integer() )
        return std::nullopt;
    return body[ name ].get< long long >();
}

// Successors of the last state whose label contains every filter literal,
// up to the cap.
std::vector< Structure > filtered_choices( Session& s, const std::string& filter, std::size_t cap, bool& truncated )
{
    const auto required = split_filter( filter );
    std::vector< Structure > out;
    truncated = false;
    auto keep = [ & ]( const Structure& st ) {
        if ( !label_matches( exogenous_label( st ), required ) )
            return true;
        if ( out.size() == cap )
        {
            truncated = true;
            return false;
        }
        out.push_back( st );
        return true;
    };
    SolveOptions all;
    all.nbmodels = 0;
    if ( s.history.empty() )
    {
        for ( const auto& st : s.engine->initialise( s.domain, all ) )
            if ( !keep( st ) )
                break;
    }
    else
        s.engine->for_each_successor( s.history.back(), all, keep );
    return out;
}

} // namespace

SessionStore::SessionStore( Config config ) : _config( std::move( config ) ) {}
SessionStore::~SessionStore() = default;

std::size_t SessionStore::size() const
{
    std::lock_guard lock( _mutex );
    return _sessions.size();
}

std::size_t SessionStore::evict_expired( Clock::time_point now )
{
    std::lock_guard lock( _mutex );
    std::size_t n = 0;
    for ( auto it = _sessions.begin(); it != _sessions.end(); )
    {
        if ( now - it->second->touched > _config.ttl )
        {
            it = _sessions.erase( it );
            ++n;
        }
        else
            ++it;
    }
    return n;
}

std::shared_ptr< Session > SessionStore::find( const std::string& id )
{
    evict_expired();
    std::lock_guard lock( _mutex );
    const auto it = _sessions.find( id );
    if ( it == _sessions.end() )
        return nullptr;
    it->second->touched = Clock::now();
    return it->second;
}

void SessionStore::log( const std::string& id, const std::string& op, const json& args )
{
    if ( !_config.log_path )
        return;
    std::lock_guard lock( _log_mutex );
    std::ofstream out( *_config.log_path, std::ios::app );
    out << json{ { "session", id }, { "op", op }, { "args", args } }.dump() << '\n';
}

Response SessionStore::create( const std::string& body, bool is_json )
{
    std::string text = body;
    std::string theory_name, structure_name, end_text;
    if ( is_json )
    {
        json j = json::parse( body, nullptr, false );
        if ( j.is_discarded() || !j.is_object() || !j.contains( "program" ) || !j[ "program" ].is_string() )
            return error( 400, "BadRequest", "expected a JSON object with a string field 'program'" );
        text = j[ "program" ].get< std::string >();
        theory_name = j.value( "theory", "" );
        structure_name = j.value( "structure", "" );
        end_text = j.value( "end", "" );
    }
    auto parsed = parse( text );
    if ( !parsed.ok() )
        return error( 400, "Diagnostics", "program does not parse", { { "diagnostics", issues_json( parsed.diagnostics ) } } );
    auto s = std::make_shared< Session >();
    s->program = std::move( *parsed.program );
    try
    {
        const Theory* theory = theory_name.empty()
                                   ? ( s->program.theories.empty() ? nullptr : &s->program.theories.front() )
                                   : s->program.find_theory( theory_name );
        if ( !theory )
            return error( 422, "InvalidArgument", theory_name.empty() ? "program has no theory" : "no theory " + theory_name );
        s->engine = std::make_unique< Engine >( *theory );
        const StructureBlock* block = nullptr;
        if ( !structure_name.empty() )
        {
            block = s->program.find_structure( structure_name );
            if ( !block )
                return error( 422, "InvalidArgument", "no structure " + structure_name );
        }
        else
            for ( const auto& b : s->program.structures )
                if ( b.vocabulary_name == theory->vocabulary->name() ||
                     b.structure.vocabulary().name() == theory->vocabulary->name() )
                {
                    block = &b;
                    break;
                }
        s->domain = block ? block->structure : Structure( s->engine->vocabularies().base );
        if ( !end_text.empty() )
            s->end = parse_formula( end_text, s->engine->vocabularies().single_state );
        refresh( *s, _config.successor_cap );
    }
    catch ( const Error& e )
    {
        return ltc_error( e );
    }
    s->id = fresh_id();
    {
        std::lock_guard lock( _mutex );
        _sessions[ s->id ] = s;
    }
    log( s->id, "create", { { "program", text }, { "theory", theory_name }, { "structure", structure_name }, { "end", end_text } } );
    json out = summary( *s );
    json candidates = json::array();
    for ( const auto& c : s->choices )
        candidates.push_back( to_json( c ) );
    out[ "candidates" ] = std::move( candidates );
    return { 201, std::move( out ) };
}

Response SessionStore::get( const std::string& id )
{
    auto s = find( id );
    if ( !s )
        return error( 404, "NotFound", "no session " + id );
    std::lock_guard lock( s->mutex );
    return { 200, summary( *s ) };
}

Response SessionStore::successors( const std::string& id, const std::string& filter )
{
    auto s = find( id );
    if ( !s )
        return error( 404, "NotFound", "no session " + id );
    std::lock_guard lock( s->mutex );
    try
    {
        bool truncated = s->truncated;
        std::vector< Structure > filtered;
        const auto* list = &s->choices;
        if ( !filter.empty() )
        {
            filtered = filtered_choices( *s, filter, _config.successor_cap, truncated );
            list = &filtered;
        }
        return { 200,
                 { { "status", status_name( s->status ) },
                   { "filter", filter },
                   { "truncated", truncated },
                   { "count", list->size() },
                   { "groups", groups_json( *list, 0, true ) } } };
    }
    catch ( const Error& e )
    {
        return ltc_error( e );
    }
}

Response SessionStore::step( const std::string& id, const json& body )
{
    auto s = find( id );
    if ( !s )
        return error( 404, "NotFound", "no session " + id );
    std::lock_guard lock( s->mutex );
    if ( s->status == Status::Deadlock || s->status == Status::Ended )
        return error( 409, status_name( s->status ), std::string( "session is in state " ) + status_name( s->status ) );
    const auto choice = int_field( body, "choice" );
    if ( !choice )
        return error( 422, "InvalidChoice", "expected an integer field 'choice'" );
    try
    {
        const std::string filter = body.is_object() ? body.value( "filter", "" ) : "";
        bool truncated = false;
        auto list = filter.empty() ? s->choices : filtered_choices( *s, filter, _config.successor_cap, truncated );
        if ( *choice < 0 || static_cast< std::size_t >( *choice ) >= list.size() )
            return error( 422, "InvalidChoice",
                          "choice " + std::to_string( *choice ) + " not in [0, " + std::to_string( list.size() ) + ")" );
        s->history.push_back( list[ static_cast< std::size_t >( *choice ) ] );
        refresh( *s, _config.successor_cap );
    }
    catch ( const Error& e )
    {
        return ltc_error( e );
    }
    log( id, "step", body );
    return { 200, summary( *s ) };
}

Response SessionStore::rollback( const std::string& id, const json& body )
{
    auto s = find( id );
    if ( !s )
        return error( 404, "NotFound", "no session " + id );
    std::lock_guard lock( s->mutex );
    const auto to = int_field( body, "to" );
    if ( !to )
        return error( 422, "InvalidArgument", "expected an integer field 'to'" );
    if ( *to < 0 || static_cast< std::size_t >( *to ) >= s->history.size() )
        return error( 422, "InvalidArgument", "no step " + std::to_string( *to ) + " in the history" );
    try
    {
        s->history.resize( static_cast< std::size_t >( *to ) + 1 );
        refresh( *s, _config.successor_cap );
    }
    catch ( const Error& e )
    {
        return ltc_error( e );
    }
    log( id, "rollback", body );
    return { 200, summary( *s ) };
}

Response SessionStore::history( const std::string& id )
{
    auto s = find( id );
    if ( !s )
        return error( 404, "NotFound", "no session " + id );
    std::lock_guard lock( s->mutex );
    json states = json::array();
    for ( const auto& st : s->history )
        states.push_back( to_json( st ) );
    return { 200, { { "states", std::move( states ) }, { "metadata", { { "status", status_name( s->status ) } } } } };
}

Response SessionStore::remove( const std::string& id )
{
    std::lock_guard lock( _mutex );
    if ( _sessions.erase( id ) == 0 )
        return error( 404, "NotFound", "no session " + id );
    return { 200, { { "deleted", id } } };
}

void register_routes( httplib::Server& server, SessionStore& store )
{
    auto reply = []( httplib::Response& res, const Response& r ) {
        res.status = r.status;
        res.set_content( r.body.dump(), "application/json" );
    };
    auto body_json = []( const httplib::Request& req ) {
        return req.body.empty() ? json::object() : json::parse( req.body, nullptr, false );
    };
    server.Post( "/sessions", [ &store, reply ]( const httplib::Request& req, httplib::Response& res ) {
        const bool is_json = req.get_header_value( "Content-Type" ).find( "json" ) != std::string::npos;
        reply( res, store.create( req.body, is_json ) );
    } );
    server.Get( R"(/sessions/([0-9a-f]+))", [ &store, reply ]( const httplib::Request& req, httplib::Response& res ) {
        reply( res, store.get( req.matches[ 1 ] ) );
    } );
    server.Delete( R"(/sessions/([0-9a-f]+))", [ &store, reply ]( const httplib::Request& req, httplib::Response& res ) {
        reply( res, store.remove( req.matches[ 1 ] ) );
    } );
    server.Get( R"(/sessions/([0-9a-f]+)/successors)",
                [ &store, reply ]( const httplib::Request& req, httplib::Response& res ) {
                    reply( res, store.successors( req.matches[ 1 ], req.get_param_value( "filter" ) ) );
                } );
    server.Get( R"(/sessions/([0-9a-f]+)/history)", [ &store, reply ]( const httplib::Request& req, httplib::Response& res ) {
        reply( res, store.history( req.matches[ 1 ] ) );
    } );
    server.Post( R"(/sessions/([0-9a-f]+)/step)",
                 [ &store, reply, body_json ]( const httplib::Request& req, httplib::Response& res ) {
                     const auto b = body_json( req );
                     if ( b.is_discarded() )
                         return reply( res, error( 400, "BadRequest", "body is not JSON" ) );
                     reply( res, store.step( req.matches[ 1 ], b ) );
                 } );
    server.Post( R"(/sessions/([0-9a-f]+)/rollback)",
                 [ &store, reply, body_json ]( const httplib::Request& req, httplib::Response& res ) {
                     const auto b = body_json( req );
                     if ( b.is_discarded() )
                         return reply( res, error( 400, "BadRequest", "body is not JSON" ) );
                     reply( res, store.rollback( req.matches[ 1 ], b ) );
                 } );
    server.set_exception_handler( [ reply ]( const httplib::Request&, httplib::Response& res, std::exception_ptr ep ) {
        try
        {
            std::rethrow_exception( ep );
        }
        catch ( const std::exception& e )
        {
            reply( res, error( 500, "Internal", e.what() ) );
        }
    } );
}

bool serve( const std::string& host, int port, Config config )
{
    SessionStore store( std::move( config ) );
    httplib::Server server;
    register_routes( server, store );
    return server.listen( host, port );
}

} // namespace ltc::service
