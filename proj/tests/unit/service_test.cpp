#include "programs.hpp"

#include "ltc/service.hpp"

#include <httplib.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace ltc;
using namespace ltc::testing;
using nlohmann::json;

namespace
{

class Http : public ::testing::Test
{
protected:
    service::SessionStore store{ config() };
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::unique_ptr< httplib::Client > client;

    static service::Config config()
    {
        service::Config c;
        c.successor_cap = 50;
        return c;
    }

    void SetUp() override
    {
        service::register_routes( server, store );
        port = server.bind_to_any_port( "127.0.0.1" );
        ASSERT_GT( port, 0 );
        thread = std::thread( [ this ] { server.listen_after_bind(); } );
        server.wait_until_ready();
        client = std::make_unique< httplib::Client >( "127.0.0.1", port );
    }

    void TearDown() override
    {
        server.stop();
        if ( thread.joinable() )
            thread.join();
    }

    std::pair< int, json > post( const std::string& path, const json& body )
    {
        auto r = client->Post( path, body.dump(), "application/json" );
        EXPECT_TRUE( r );
        return { r->status, json::parse( r->body ) };
    }
    std::pair< int, json > get( const std::string& path )
    {
        auto r = client->Get( path );
        EXPECT_TRUE( r );
        return { r->status, json::parse( r->body ) };
    }

    std::string create_game( const std::string& end = "GameOver" )
    {
        auto [ status, body ] = post( "/sessions", { { "program", read_file( program_path( "pacman-game.ltc" ) ) },
                                                     { "end", end } } );
        EXPECT_EQ( status, 201 ) << body.dump();
        return body.value( "id", "" );
    }

    // Index of the first successor whose label is `label`.
    std::size_t choice_with_label( const json& summary, const std::string& label )
    {
        for ( const auto& g : summary[ "choices" ] )
            if ( g[ "label" ] == label )
                return g[ "choices" ][ 0 ][ "index" ].get< std::size_t >();
        ADD_FAILURE() << "no choice labelled " << label << " in " << summary.dump();
        return 0;
    }
};

} // namespace

TEST_F( Http, PlayTheCorridorToGameOver )
{
    const auto id = create_game();
    auto [ status, s ] = get( "/sessions/" + id );
    ASSERT_EQ( status, 200 );
    EXPECT_EQ( s[ "status" ], "AwaitingInit" );
    EXPECT_EQ( s[ "choice_count" ], 3 );
    // A state holds the move made from it: east twice, then stand still.
    for ( const auto* label : { "Move(pm,E)", "Move(pm,E)", "(none)", "(none)" } )
    {
        std::tie( status, s ) = post( "/sessions/" + id + "/step", { { "choice", choice_with_label( s, label ) } } );
        ASSERT_EQ( status, 200 ) << s.dump();
    }
    // Pellets s1, s2, s3 are gone at steps 1, 2, 3; the end formula holds at step 3.
    EXPECT_EQ( s[ "status" ], "Ended" );
    EXPECT_EQ( s[ "step" ], 3 );
    EXPECT_EQ( s[ "state" ][ "predicates" ][ "GameOver" ], json::array( { json::array() } ) );
    const auto [ st, body ] = post( "/sessions/" + id + "/step", { { "choice", 0 } } );
    EXPECT_EQ( st, 409 );

    const auto [ hs, history ] = get( "/sessions/" + id + "/history" );
    ASSERT_EQ( hs, 200 );
    EXPECT_EQ( history[ "states" ].size(), 4u );
}

TEST_F( Http, SuccessorsFilterAndRollback )
{
    const auto id = create_game();
    auto [ status, s ] = post( "/sessions/" + id + "/step", { { "choice", 0 } } );
    ASSERT_EQ( status, 200 );
    EXPECT_EQ( s[ "status" ], "Running" );
    const auto [ fs, filtered ] = get( "/sessions/" + id + "/successors?filter=Move(pm,E)" );
    ASSERT_EQ( fs, 200 );
    ASSERT_EQ( filtered[ "count" ], 1 );
    EXPECT_EQ( filtered[ "groups" ][ 0 ][ "label" ], "Move(pm,E)" );
    EXPECT_TRUE( filtered[ "groups" ][ 0 ][ "choices" ][ 0 ].contains( "state" ) );

    std::tie( status, s ) = post( "/sessions/" + id + "/step", { { "choice", 0 }, { "filter", "Move(pm,E)" } } );
    ASSERT_EQ( status, 200 );
    EXPECT_EQ( s[ "history_length" ], 2 );
    std::tie( status, s ) = post( "/sessions/" + id + "/rollback", { { "to", 0 } } );
    ASSERT_EQ( status, 200 );
    EXPECT_EQ( s[ "history_length" ], 1 );
    std::tie( status, s ) = post( "/sessions/" + id + "/rollback", { { "to", 5 } } );
    EXPECT_EQ( status, 422 );
}

TEST_F( Http, DeadlockSession )
{
    auto [ status, s ] = post( "/sessions", { { "program", read_file( program_path( "deadlock.ltc" ) ) } } );
    ASSERT_EQ( status, 201 );
    const std::string id = s[ "id" ];
    std::tie( status, s ) = post( "/sessions/" + id + "/step", { { "choice", 0 } } );
    ASSERT_EQ( status, 200 );
    EXPECT_EQ( s[ "status" ], "Deadlock" );
    EXPECT_EQ( s[ "choice_count" ], 0 );
    std::tie( status, s ) = post( "/sessions/" + id + "/step", { { "choice", 0 } } );
    EXPECT_EQ( status, 409 );
}

TEST_F( Http, ErrorsAndDeletion )
{
    auto [ status, body ] = post( "/sessions", { { "program", "vocabulary V { type" } } );
    EXPECT_EQ( status, 400 );
    EXPECT_FALSE( body[ "diagnostics" ].empty() );
    std::tie( status, body ) = post( "/sessions", { { "nothing", 1 } } );
    EXPECT_EQ( status, 400 );
    std::tie( status, body ) = post(
        "/sessions", { { "program", "vocabulary W { type Time  P(Time) }\ntheory T : W { ! t[Time]: P(Succ(Succ(t))). }" } } );
    EXPECT_EQ( status, 422 );
    std::tie( status, body ) = get( "/sessions/0123abcd" );
    EXPECT_EQ( status, 404 );

    const auto id = create_game();
    std::tie( status, body ) = post( "/sessions/" + id + "/step", { { "choice", 42 } } );
    EXPECT_EQ( status, 422 );
    EXPECT_EQ( body[ "error" ], "InvalidChoice" );
    std::tie( status, body ) = post( "/sessions/" + id + "/step", { { "choice", "x" } } );
    EXPECT_EQ( status, 422 );
    auto r = client->Delete( "/sessions/" + id );
    ASSERT_TRUE( r );
    EXPECT_EQ( r->status, 200 );
    std::tie( status, body ) = get( "/sessions/" + id );
    EXPECT_EQ( status, 404 );
}

TEST_F( Http, PlainTextProgram )
{
    auto r = client->Post( "/sessions", read_file( program_path( "pacman-game.ltc" ) ), "text/plain" );
    ASSERT_TRUE( r );
    EXPECT_EQ( r->status, 201 );
    EXPECT_EQ( json::parse( r->body )[ "candidates" ].size(), 3u );
}

TEST( SessionStore, ExpiryAndLog )
{
    const auto log = std::filesystem::temp_directory_path() / "ltc_service_test.log";
    std::filesystem::remove( log );
    service::Config c;
    c.ttl = std::chrono::seconds( 60 );
    c.log_path = log.string();
    service::SessionStore store( c );
    const auto created = store.create( read_file( program_path( "pacman-game.ltc" ) ), false );
    ASSERT_EQ( created.status, 201 );
    const std::string id = created.body[ "id" ];
    EXPECT_EQ( store.step( id, { { "choice", 1 } } ).status, 200 );
    EXPECT_EQ( store.size(), 1u );
    EXPECT_EQ( store.evict_expired( service::SessionStore::Clock::now() + std::chrono::minutes( 2 ) ), 1u );
    EXPECT_EQ( store.get( id ).status, 404 );

    std::ifstream in( log );
    std::string line;
    std::vector< std::string > ops;
    while ( std::getline( in, line ) )
        ops.push_back( json::parse( line )[ "op" ] );
    EXPECT_EQ( ops, ( std::vector< std::string >{ "create", "step" } ) );
    std::filesystem::remove( log );
}

TEST( SessionStore, ReplayReproducesTimeline )
{
    service::SessionStore store;
    const auto program = read_file( program_path( "pacman-game.ltc" ) );
    // Record the indices of a labelled play, then replay them.
    std::vector< int > log;
    json first;
    {
        auto s = store.create( program, false ).body;
        const std::string id = s[ "id" ];
        for ( const std::string label : { "Move(pm,E)", "(none)", "Move(pm,W)", "(none)" } )
        {
            int index = -1;
            for ( const auto& g : s[ "choices" ] )
                if ( g[ "label" ] == label )
                    index = g[ "choices" ][ 0 ][ "index" ];
            ASSERT_GE( index, 0 ) << label;
            log.push_back( index );
            const auto r = store.step( id, { { "choice", index } } );
            ASSERT_EQ( r.status, 200 );
            s = r.body;
        }
        first = store.history( id ).body[ "states" ];
    }
    const std::string id = store.create( program, false ).body[ "id" ];
    for ( int index : log )
        ASSERT_EQ( store.step( id, { { "choice", index } } ).status, 200 );
    EXPECT_EQ( store.history( id ).body[ "states" ], first );
    EXPECT_EQ( first.size(), 4u );
}
