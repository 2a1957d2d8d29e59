#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace monologue {

enum class ProviderKind { Live, Mock };

// Request body shape for the live completion endpoint.
//   Chat:       {"model", "messages": [{"role": "user", "content": prompt}], "max_tokens", "temperature"}
//   Completion: {"model", "prompt", "max_tokens", "temperature"}
// Replies are read from choices[0].message.content or choices[0].text.
enum class ApiStyle { Chat, Completion };

inline constexpr double kCreativeTemperature = 0.8;
inline constexpr double kRecordingTemperature = 0.0;
inline constexpr std::chrono::milliseconds kBackoffBase{500};
inline constexpr std::size_t kMockEmbeddingDim = 64;

// Fixtures are recorded at temperature 0, so mock replay asks at 0 as well
// (the temperature is part of the fixture key).
constexpr double default_temperature(ProviderKind kind) {
    return kind == ProviderKind::Mock ? kRecordingTemperature : kCreativeTemperature;
}

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Mock;
    std::string endpoint_uri;
    // Defaults to endpoint_uri with its last path segment(s) replaced by "embeddings".
    std::string embedding_uri;
    std::string model = "gpt-3.5-turbo";
    std::string embedding_model = "text-embedding-3-small";
    std::string api_key_env_var = "PROVIDER_API_KEY";
    ApiStyle api_style = ApiStyle::Chat;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    std::optional<std::filesystem::path> fixture_dir;
    // Live only: every successful completion is also written here as a fixture.
    std::optional<std::filesystem::path> record_dir;
    std::size_t embedding_dim = kMockEmbeddingDim;

    // Live needs endpoint and key variable name; Mock needs a fixture directory.
    void validate() const;
};

struct CompletionRequest {
    std::string prompt;
    int max_tokens = 512;
    double temperature = kCreativeTemperature;

    // sha256 over the temperature's shortest decimal form and the prompt text.
    [[nodiscard]] std::string request_key() const;
};

struct CompletionResponse {
    std::string text;
    std::string provider_name;
    std::chrono::milliseconds latency{0};
    bool from_fixture = false;
    int attempts = 1;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::string source_text;
    bool unit_norm = false;

    [[nodiscard]] double norm() const;
};

// Returns a unit-length copy of `values`.
EmbeddingVector normalized(std::vector<double> values, std::string source_text);

// Deterministic stand-in embedding: components drawn uniformly from [-1, 1)
// by a splitmix64 stream seeded with the text's 64-bit FNV-1a hash, then
// L2-normalized. Equivalent to projecting the text's identity through a
// fixed pseudo-random matrix.
EmbeddingVector mock_embedding(std::string_view text, std::size_t dim = kMockEmbeddingDim);

struct HttpResult {
    int status = 0;
    std::string body;
};

class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& what, bool timed_out) : std::runtime_error(what), timed_out_(timed_out) {}
    [[nodiscard]] bool timed_out() const noexcept { return timed_out_; }

private:
    bool timed_out_;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws TransportError when no HTTP status was received.
    virtual HttpResult post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                            const std::string& body, std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport; supports http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_http_transport();

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

class Gateway : public Embedder {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit Gateway(ProviderConfig config, std::shared_ptr<HttpTransport> transport = nullptr,
                     Sleeper sleeper = nullptr, std::uint64_t jitter_seed = std::random_device{}());

    [[nodiscard]] const ProviderConfig& config() const { return config_; }

    /// Mock: returns the fixture `<fixture_dir>/<request_key>.txt` verbatim,
    /// or throws MissingFixture naming that file.
    ///
    /// Live: one POST per attempt. Timeouts, transport failures, 408, 429
    /// and 5xx are retried up to max_retries times with full-jitter
    /// exponential backoff (500 ms * 2^retry). Other statuses throw
    /// ProviderRejected. When retries run out: RetriesExhausted, or the
    /// underlying ProviderTimeout/ProviderUnavailable if no retries were
    /// allowed.
    CompletionResponse complete(const CompletionRequest& request);

    // One unit vector per input, in order. Inputs must be nonempty.
    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

    // Live completion whose reply is stored as `<out_dir>/<request_key>.txt`.
    // Throws UnwritableFixtureDir when the directory cannot be created or written.
    std::filesystem::path record_fixture(const CompletionRequest& request, const std::filesystem::path& out_dir);

    static std::filesystem::path fixture_path(const std::filesystem::path& dir, const CompletionRequest& request);

private:
    HttpResult post_with_retries(const std::string& url, const std::string& body, int& attempts);
    std::string api_key() const;
    std::chrono::milliseconds backoff_delay(int retry);

    ProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
    std::mutex rng_mu_;
    std::mt19937_64 rng_;
};

void write_fixture(const std::filesystem::path& dir, const CompletionRequest& request, std::string_view text);

} // namespace monologue
