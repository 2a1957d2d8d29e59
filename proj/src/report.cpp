#include "monologue/report.hpp"

#include "monologue/codec.hpp"
#include "monologue/error.hpp"
#include "monologue/pipeline.hpp"

#include <set>

namespace monologue {

namespace {

std::string in_quotes(std::string_view s) {
    std::string out = "\"";
    out.append(s).push_back('"');
    return out;
}

const ScoredCombination* marked_combination(const PipelineSession& s) {
    if (s.punchline && s.punchline->combination) return &*s.punchline->combination;
    if (s.combination) return &*s.combination;
    return nullptr;
}

} // namespace

std::string render_report(const PipelineSession& s) {
    if (!s.topic) throw Error(ErrorCode::SessionTooEarly, "session " + s.id + " has no topic yet");

    std::string out;
    out.append("Topic: ").append(in_quotes(s.topic->text)).append("\n");

    if (s.catalog) {
        std::set<Pick> marked;
        if (const auto* combo = marked_combination(s)) marked.insert(combo->picks.begin(), combo->picks.end());
        for (std::size_t h = 0; h < s.catalog->handles.size(); ++h) {
            out.append("\nAssociations for ").append(in_quotes(s.catalog->handles[h].text)).append(":\n");
            const auto& list = s.catalog->associations[h];
            for (std::size_t k = 0; k < list.size(); ++k) {
                out.append(marked.count(Pick{h, k}) ? "  * " : "  - ").append(in_quotes(list[k])).append("\n");
            }
        }
    }
    if (s.punchline) out.append("\nPunchline: ").append(in_quotes(s.punchline->text)).append("\n");
    if (s.angle) out.append("\nAngle: ").append(in_quotes(s.angle->text)).append("\n");
    if (s.joke) out.append("\nSummary: ").append(in_quotes(s.joke->assembled_text)).append("\n");
    return out;
}

std::string export_session(const PipelineSession& session) {
    json doc = session;
    doc["schemaVersion"] = kSchemaVersion;
    return doc.dump(2) + "\n";
}

PipelineSession import_session(std::string_view document) {
    auto doc = json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::InvalidDocument, "session document is not a JSON object");
    if (doc.value("schemaVersion", 0) != kSchemaVersion)
        throw Error(ErrorCode::InvalidDocument, "unsupported schemaVersion (expected " + std::to_string(kSchemaVersion) + ")");

    PipelineSession s;
    try {
        s = doc.get<PipelineSession>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidDocument, std::string("malformed session document: ") + e.what());
    }
    for (int i = 0; i < kStageCount; ++i) {
        const Stage st = stage_at(i);
        const bool should_have = i <= stage_index(s.stage);
        if (has_stage_value(s, st) != should_have) {
            throw Error(ErrorCode::InvalidDocument, "field for stage " + std::string(to_string(st)) +
                                                        (should_have ? " is missing" : " is set beyond the session stage"));
        }
    }
    return s;
}

} // namespace monologue
