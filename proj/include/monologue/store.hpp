#pragma once

#include "monologue/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace monologue {

struct SessionSummary {
    std::string id;
    Stage stage = Stage::ArticleLoaded;
    std::string topic_excerpt;
    std::string updated_at;
    std::uint64_t version = 0;
};

/// One JSON document per session under `<data_dir>/sessions/<id>.json`.
///
/// Writes go to a temporary file that is fsynced and renamed over the
/// document, so readers always see a complete snapshot. Writers to the same
/// session are serialized by an flock on `<id>.lock`, which holds across
/// threads and processes; the version check runs under that lock.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path data_dir);

    [[nodiscard]] const std::filesystem::path& data_dir() const { return data_dir_; }
    [[nodiscard]] std::filesystem::path sessions_dir() const { return data_dir_ / "sessions"; }
    [[nodiscard]] std::filesystem::path fixtures_dir() const { return data_dir_ / "fixtures"; }

    // New session at ArticleLoaded, version 1, persisted before returning.
    PipelineSession create(const Article& article);

    // Throws NotFound.
    [[nodiscard]] PipelineSession get(const std::string& id) const;

    // Persists `session` iff the stored version equals `expected_version`.
    // Throws VersionConflict for a stale writer and NotFound for unknown ids.
    PipelineSession update(const PipelineSession& session, std::uint64_t expected_version);

    // Newest first by updatedAt.
    [[nodiscard]] std::vector<SessionSummary> list(std::optional<Stage> filter = std::nullopt) const;

private:
    [[nodiscard]] std::filesystem::path document_path(const std::string& id) const;
    void write_document(const PipelineSession& session) const;

    std::filesystem::path data_dir_;
};

} // namespace monologue
