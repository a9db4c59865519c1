#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

namespace swiim {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Largest accepted request body; bigger ones get 413.
    std::size_t max_upload = 64u << 20;
    /// Sessions untouched for this long are dropped.
    std::chrono::seconds ttl{3600};
};

/// Reads SWIIM_BIND (host or host:port), SWIIM_MAX_UPLOAD (bytes) and
/// SWIIM_TTL (seconds) over the defaults. Malformed values raise
/// std::invalid_argument.
ServiceConfig config_from_env(ServiceConfig base = {});

/// JSON-over-HTTP session API. Sessions live in memory; mutations on one
/// session are serialized, different sessions proceed in parallel.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds config.host:config.port (port 0 picks a free one). Returns the
    /// bound port, or -1.
    int bind();
    /// Blocks serving requests until stop().
    bool listen();
    void stop();
    /// Blocks until the server accepts connections.
    void wait_until_ready() const;

    std::size_t session_count() const;
    /// Drops sessions idle for longer than the TTL as of `now`. Also runs
    /// before every request.
    std::size_t expire_idle(std::chrono::steady_clock::time_point now);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace swiim
