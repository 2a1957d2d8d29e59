#pragma once

#include "monologue/types.hpp"

#include <string>
#include <string_view>

namespace monologue {

inline constexpr int kSchemaVersion = 1;

/// Plain-text report with labelled sections: Topic, one "Associations for"
/// block per handle (the associations the punchline uses, or else the
/// selected combination, are marked with "*"), Punchline, Angle and Summary.
/// Sections for stages the session has not reached are left out. Requires
/// a topic; throws SessionTooEarly otherwise.
std::string render_report(const PipelineSession& session);

// Session document: JSON, schemaVersion 1, sorted keys, two-space indent.
std::string export_session(const PipelineSession& session);
// Inverse of export_session. Throws InvalidDocument for malformed input,
// unknown schema versions, or stage fields inconsistent with the stage.
PipelineSession import_session(std::string_view document);

} // namespace monologue
