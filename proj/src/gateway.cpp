#include "monologue/gateway.hpp"

#include "monologue/error.hpp"
#include "monologue/text.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace monologue {

using json = nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string shortest_repr(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

bool is_transient(int status) {
    return status == 408 || status == 429 || status >= 500;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string derive_embedding_uri(const std::string& endpoint) {
    for (std::string_view suffix : {"/chat/completions", "/completions"}) {
        if (ends_with(endpoint, suffix)) return endpoint.substr(0, endpoint.size() - suffix.size()) + "/embeddings";
    }
    return {};
}

std::string first_candidate_text(const json& reply) {
    const auto& choices = reply.at("choices");
    if (!choices.is_array() || choices.empty()) throw std::runtime_error("no choices in reply");
    const auto& first = choices.at(0);
    if (auto msg = first.find("message"); msg != first.end()) return msg->at("content").get<std::string>();
    return first.at("text").get<std::string>();
}

} // namespace

void ProviderConfig::validate() const {
    if (kind == ProviderKind::Live) {
        if (endpoint_uri.empty()) throw Error(ErrorCode::ConfigInvalid, "live provider requires an endpoint URI");
        if (api_key_env_var.empty())
            throw Error(ErrorCode::ConfigInvalid, "live provider requires an API key environment variable name");
    } else if (!fixture_dir) {
        throw Error(ErrorCode::ConfigInvalid, "mock provider requires a fixture directory");
    }
    if (max_retries < 0) throw Error(ErrorCode::ConfigInvalid, "maxRetries must be >= 0");
    if (embedding_dim == 0) throw Error(ErrorCode::ConfigInvalid, "embedding dimension must be positive");
}

std::string CompletionRequest::request_key() const {
    return text::sha256_hex("temperature=" + shortest_repr(temperature) + "\n" + prompt);
}

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

EmbeddingVector normalized(std::vector<double> values, std::string source_text) {
    EmbeddingVector v{std::move(values), std::move(source_text), false};
    const double n = v.norm();
    if (n == 0.0 || !std::isfinite(n))
        throw Error(ErrorCode::NotNormalized, "cannot normalize a zero or non-finite vector for \"" + v.source_text + "\"");
    for (double& x : v.values) x /= n;
    v.unit_norm = true;
    return v;
}

EmbeddingVector mock_embedding(std::string_view text, std::size_t dim) {
    std::uint64_t state = text::fnv1a64(text);
    std::vector<double> values(dim);
    for (auto& x : values) {
        // 53 random bits -> [0, 1) -> [-1, 1)
        const double unit = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
        x = 2.0 * unit - 1.0;
    }
    return normalized(std::move(values), std::string(text));
}

Gateway::Gateway(ProviderConfig config, std::shared_ptr<HttpTransport> transport, Sleeper sleeper,
                 std::uint64_t jitter_seed)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)), rng_(jitter_seed) {
    config_.validate();
    if (config_.kind == ProviderKind::Live) {
        if (!transport_) transport_ = make_http_transport();
        if (config_.embedding_uri.empty()) config_.embedding_uri = derive_embedding_uri(config_.endpoint_uri);
    }
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::filesystem::path Gateway::fixture_path(const std::filesystem::path& dir, const CompletionRequest& request) {
    return dir / (request.request_key() + ".txt");
}

std::string Gateway::api_key() const {
    const char* key = std::getenv(config_.api_key_env_var.c_str());
    if (!key || !*key)
        throw Error(ErrorCode::ConfigInvalid, "environment variable " + config_.api_key_env_var + " is not set");
    return key;
}

std::chrono::milliseconds Gateway::backoff_delay(int retry) {
    const auto cap = kBackoffBase.count() * (std::int64_t{1} << std::min(retry, 20));
    std::lock_guard lock(rng_mu_);
    std::uniform_int_distribution<std::int64_t> dist(0, cap);
    return std::chrono::milliseconds(dist(rng_));
}

HttpResult Gateway::post_with_retries(const std::string& url, const std::string& body, int& attempts) {
    const std::vector<std::pair<std::string, std::string>> headers{
        {"Authorization", "Bearer " + api_key()},
    };
    std::string last_failure;
    bool last_timed_out = false;
    attempts = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) sleeper_(backoff_delay(attempt - 1));
        ++attempts;
        try {
            auto result = transport_->post(url, headers, body, config_.timeout);
            if (result.status >= 200 && result.status < 300) return result;
            if (!is_transient(result.status)) {
                throw Error(ErrorCode::ProviderRejected,
                            "provider returned HTTP " + std::to_string(result.status) + ": " + result.body.substr(0, 300));
            }
            last_failure = "HTTP " + std::to_string(result.status);
            last_timed_out = result.status == 408;
        } catch (const TransportError& e) {
            last_failure = e.what();
            last_timed_out = e.timed_out();
        }
    }
    if (config_.max_retries == 0) {
        throw Error(last_timed_out ? ErrorCode::ProviderTimeout : ErrorCode::ProviderUnavailable,
                    "provider request failed: " + last_failure);
    }
    throw Error(ErrorCode::RetriesExhausted,
                "provider request failed after " + std::to_string(attempts) + " attempts; last failure: " + last_failure);
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
    const auto started = std::chrono::steady_clock::now();
    CompletionResponse response;

    if (config_.kind == ProviderKind::Mock) {
        auto path = fixture_path(*config_.fixture_dir, request);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::MissingFixture, "no fixture recorded for this request; expected " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        response.text = buf.str();
        response.provider_name = "mock";
        response.from_fixture = true;
        response.attempts = 1;
    } else {
        json body;
        body["model"] = config_.model;
        body["max_tokens"] = request.max_tokens;
        body["temperature"] = request.temperature;
        if (config_.api_style == ApiStyle::Chat) {
            body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
        } else {
            body["prompt"] = request.prompt;
        }
        auto result = post_with_retries(config_.endpoint_uri, body.dump(), response.attempts);
        try {
            response.text = first_candidate_text(json::parse(result.body));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ProviderRejected, std::string("unexpected completion reply: ") + e.what());
        }
        response.provider_name = "live:" + config_.model;
        if (config_.record_dir) write_fixture(*config_.record_dir, request, response.text);
    }
    response.latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return response;
}

std::vector<EmbeddingVector> Gateway::embed(std::span<const std::string> texts) {
    if (texts.empty()) throw Error(ErrorCode::InvariantViolation, "nothing to embed");
    for (const auto& t : texts) {
        if (t.empty()) throw Error(ErrorCode::InvariantViolation, "cannot embed an empty string");
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    if (config_.kind == ProviderKind::Mock) {
        for (const auto& t : texts) out.push_back(mock_embedding(t, config_.embedding_dim));
        return out;
    }

    if (config_.embedding_uri.empty())
        throw Error(ErrorCode::ConfigInvalid, "no embedding endpoint configured for the live provider");
    json body{{"model", config_.embedding_model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    int attempts = 0;
    auto result = post_with_retries(config_.embedding_uri, body.dump(), attempts);
    try {
        auto reply = json::parse(result.body);
        const auto& data = reply.at("data");
        if (data.size() != texts.size()) throw std::runtime_error("reply has " + std::to_string(data.size()) + " vectors");
        std::vector<std::vector<double>> vectors(texts.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            // entries may carry an explicit index; fall back to position
            const std::size_t idx = data[i].value("index", i);
            if (idx >= texts.size()) throw std::runtime_error("embedding index out of range");
            vectors[idx] = data[i].at("embedding").get<std::vector<double>>();
        }
        for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(normalized(std::move(vectors[i]), texts[i]));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::ProviderRejected, std::string("unexpected embedding reply: ") + e.what());
    }
    return out;
}

void write_fixture(const std::filesystem::path& dir, const CompletionRequest& request, std::string_view text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw Error(ErrorCode::UnwritableFixtureDir, "cannot create fixture directory " + dir.string());
    auto path = Gateway::fixture_path(dir, request);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw Error(ErrorCode::UnwritableFixtureDir, "cannot write fixture " + path.string());
}

std::filesystem::path Gateway::record_fixture(const CompletionRequest& request, const std::filesystem::path& out_dir) {
    if (config_.kind != ProviderKind::Live)
        throw Error(ErrorCode::ConfigInvalid, "recording fixtures requires the live provider");
    // Fail before spending a provider call.
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw Error(ErrorCode::UnwritableFixtureDir, "cannot create fixture directory " + out_dir.string());
    auto response = complete(request);
    write_fixture(out_dir, request, response.text);
    return fixture_path(out_dir, request);
}

} // namespace monologue
