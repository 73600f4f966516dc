#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace httplib
{
class Server;
}

namespace ltc::service
{

struct Config
{
    std::size_t successor_cap = 200;
    std::chrono::seconds ttl{ 30 * 60 };
    std::optional< std::string > log_path; // append-only JSON lines
};

struct Response
{
    int status = 200;
    nlohmann::json body;
};

struct Session;

// In-memory session table. Every operation is safe to call concurrently;
// operations on one session are serialized.
class SessionStore
{
public:
    using Clock = std::chrono::steady_clock;

    explicit SessionStore( Config config = {} );
    ~SessionStore();

    // Body is either program text, or JSON {program, theory?, structure?, end?}.
    Response create( const std::string& body, bool is_json );
    Response get( const std::string& id );
    // filter: comma-separated exogenous literals every listed successor must contain.
    Response successors( const std::string& id, const std::string& filter = {} );
    Response step( const std::string& id, const nlohmann::json& body );
    Response rollback( const std::string& id, const nlohmann::json& body );
    Response history( const std::string& id );
    Response remove( const std::string& id );

    std::size_t evict_expired( Clock::time_point now = Clock::now() );
    std::size_t size() const;
    const Config& config() const { return _config; }

private:
    Config _config;
    mutable std::mutex _mutex;
    std::map< std::string, std::shared_ptr< Session > > _sessions;
    std::mutex _log_mutex;

    std::shared_ptr< Session > find( const std::string& id );
    void log( const std::string& id, const std::string& op, const nlohmann::json& args );
};

void register_routes( httplib::Server& server, SessionStore& store );

// Blocks serving on host:port until stopped.
bool serve( const std::string& host, int port, Config config = {} );

} // namespace ltc::service
