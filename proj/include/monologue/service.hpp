#pragma once

#include "monologue/gateway.hpp"
#include "monologue/workflow.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace monologue {

struct ServiceConfig {
    std::filesystem::path data_dir = "data";
    // Mock providers default their fixture directory to <data_dir>/fixtures.
    ProviderConfig provider;
    std::optional<std::filesystem::path> templates_dir;
    // Request bodies may override sentiment, policy and style per call;
    // temperature and token limits are service-wide.
    StageOptions defaults;
};

/// JSON-over-HTTP facade over the session store and the workflow.
///
///   POST  /sessions                       {articleText | articlePath}       -> 201 document
///   GET   /sessions[?stage=]                                                -> summaries
///   GET   /sessions/{id}                                                    -> document
///   POST  /sessions/{id}/advance          {stage?, sentiment?, policy?, style?, picks?}
///   GET   /sessions/{id}/combinations[?policy=]                             -> ranked list
///   POST  /sessions/{id}/combination      {picks | policy}
///   PATCH /sessions/{id}/stages/{stage}   {replacement}
///   GET   /sessions/{id}/report                                             -> text/plain
///
/// Mutations on an existing session require `If-Match: <version>`; success
/// responses carry the new version in ETag. All state lives in the store.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds to an ephemeral port on `host`; returns the port or -1.
    int bind_any_port(const std::string& host);
    bool bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Parses "host:port" (":port" binds all interfaces). Throws ConfigInvalid.
std::pair<std::string, int> parse_listen_address(const std::string& addr);

} // namespace monologue
