#include <httplib.h>

#include "monologue/gateway.hpp"

namespace monologue {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("not an absolute URL: " + url, false);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResult post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                    const std::string& body, std::chrono::milliseconds timeout) override {
        auto [origin, path] = split_url(url);
        httplib::Client client(origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);

        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path, h, body, "application/json");
        if (!res) {
            const auto err = res.error();
            const auto elapsed = std::chrono::steady_clock::now() - started;
            const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                                   (err == httplib::Error::Read && elapsed >= timeout * 9 / 10);
            throw TransportError("HTTP transport failure: " + httplib::to_string(err), timed_out);
        }
        return {res->status, res->body};
    }
};

} // namespace

std::shared_ptr<HttpTransport> make_http_transport() {
    return std::make_shared<HttplibTransport>();
}

} // namespace monologue
