#include "monologue/store.hpp"

#include "monologue/error.hpp"
#include "monologue/pipeline.hpp"
#include "monologue/report.hpp"
#include "monologue/text.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace monologue {

namespace {

// Exclusive flock held for the object's lifetime.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw Error(ErrorCode::StorageFailure, "cannot open lock " + path.string() + ": " + std::strerror(errno));
        while (::flock(fd_, LOCK_EX) != 0) {
            if (errno != EINTR) {
                ::close(fd_);
                throw Error(ErrorCode::StorageFailure, "cannot lock " + path.string());
            }
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    });
}

std::string random_id() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uniform_int_distribution<std::uint64_t> dist;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s-%016llx", static_cast<unsigned long long>(dist(rng)));
    return buf;
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void fsync_path(const std::filesystem::path& path, int flags) {
    int fd = ::open(path.c_str(), flags | O_CLOEXEC);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

std::string excerpt(const PipelineSession& s) {
    if (!s.topic) return {};
    const auto& t = s.topic->text;
    if (t.size() <= 80) return t;
    auto cut = t.substr(0, 77);
    // do not split a UTF-8 sequence
    while (!cut.empty() && (static_cast<unsigned char>(cut.back()) & 0xC0) == 0x80) cut.pop_back();
    if (!cut.empty() && (static_cast<unsigned char>(cut.back()) & 0x80)) cut.pop_back();
    return cut + "...";
}

} // namespace

SessionStore::SessionStore(std::filesystem::path data_dir) : data_dir_(std::move(data_dir)) {
    std::error_code ec;
    std::filesystem::create_directories(sessions_dir(), ec);
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot create " + sessions_dir().string() + ": " + ec.message());
}

std::filesystem::path SessionStore::document_path(const std::string& id) const {
    if (!valid_id(id)) throw Error(ErrorCode::NotFound, "no session with id \"" + id + "\"");
    return sessions_dir() / (id + ".json");
}

void SessionStore::write_document(const PipelineSession& session) const {
    static std::atomic<std::uint64_t> counter{0};
    const auto target = document_path(session.id);
    auto tmp = target;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));

    const auto doc = export_session(session);
    {
        int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
        if (fd < 0) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string() + ": " + std::strerror(errno));
        std::size_t written = 0;
        while (written < doc.size()) {
            auto n = ::write(fd, doc.data() + written, doc.size() - written);
            if (n < 0) {
                if (errno == EINTR) continue;
                ::close(fd);
                std::filesystem::remove(tmp);
                throw Error(ErrorCode::StorageFailure, "write failed for " + tmp.string());
            }
            written += static_cast<std::size_t>(n);
        }
        ::fsync(fd);
        ::close(fd);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::StorageFailure, "cannot publish " + target.string() + ": " + ec.message());
    }
    fsync_path(sessions_dir(), O_RDONLY | O_DIRECTORY);
}

PipelineSession SessionStore::create(const Article& article) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        auto id = random_id();
        auto path = document_path(id);
        auto lock_path = path;
        lock_path.replace_extension(".lock");
        FileLock lock(lock_path);
        if (std::filesystem::exists(path)) continue;
        auto session = new_session(article, id, text::utc_timestamp());
        write_document(session);
        return session;
    }
    throw Error(ErrorCode::StorageFailure, "could not allocate a session id");
}

PipelineSession SessionStore::get(const std::string& id) const {
    auto doc = read_file(document_path(id));
    if (!doc) throw Error(ErrorCode::NotFound, "no session with id \"" + id + "\"");
    try {
        return import_session(*doc);
    } catch (const Error& e) {
        throw Error(ErrorCode::StorageFailure, "stored session " + id + " is unreadable: " + e.what());
    }
}

PipelineSession SessionStore::update(const PipelineSession& session, std::uint64_t expected_version) {
    auto path = document_path(session.id);
    auto lock_path = path;
    lock_path.replace_extension(".lock");
    FileLock lock(lock_path);

    auto stored = get(session.id);
    if (stored.version != expected_version) {
        throw Error(ErrorCode::VersionConflict, "session " + session.id + " is at version " +
                                                    std::to_string(stored.version) + ", not " +
                                                    std::to_string(expected_version));
    }
    if (session.version <= expected_version) {
        throw Error(ErrorCode::InvariantViolation, "updated session must carry a version above " +
                                                       std::to_string(expected_version));
    }
    write_document(session);
    return session;
}

std::vector<SessionSummary> SessionStore::list(std::optional<Stage> filter) const {
    std::vector<SessionSummary> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(sessions_dir(), ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        auto doc = read_file(entry.path());
        if (!doc) continue;
        PipelineSession s;
        try {
            s = import_session(*doc);
        } catch (const Error&) {
            continue;
        }
        if (filter && s.stage != *filter) continue;
        out.push_back(SessionSummary{s.id, s.stage, excerpt(s), s.updated_at, s.version});
    }
    if (ec) throw Error(ErrorCode::StorageFailure, "cannot list " + sessions_dir().string() + ": " + ec.message());
    std::sort(out.begin(), out.end(), [](const SessionSummary& a, const SessionSummary& b) {
        if (a.updated_at != b.updated_at) return a.updated_at > b.updated_at;
        return a.id > b.id;
    });
    return out;
}

} // namespace monologue
