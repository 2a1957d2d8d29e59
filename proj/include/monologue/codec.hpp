#pragma once

#include "monologue/types.hpp"

#include <nlohmann/json.hpp>

// JSON mapping for the domain model. Field names are lowerCamelCase; absent
// optionals are omitted. nlohmann::json keeps object keys sorted, which
// gives a canonical, byte-stable key order.
namespace monologue {

using json = nlohmann::json;

void to_json(json& j, const Article& v);
void from_json(const json& j, Article& v);
void to_json(json& j, const TopicSentence& v);
void from_json(const json& j, TopicSentence& v);
void to_json(json& j, const Handle& v);
void from_json(const json& j, Handle& v);
void to_json(json& j, const AssociationCatalog& v);
void from_json(const json& j, AssociationCatalog& v);
void to_json(json& j, const Pick& v);
void from_json(const json& j, Pick& v);
void to_json(json& j, const ScoredCombination& v);
void from_json(const json& j, ScoredCombination& v);
void to_json(json& j, const Punchline& v);
void from_json(const json& j, Punchline& v);
void to_json(json& j, const Angle& v);
void from_json(const json& j, Angle& v);
void to_json(json& j, const MonologueJoke& v);
void from_json(const json& j, MonologueJoke& v);
void to_json(json& j, const AuditEntry& v);
void from_json(const json& j, AuditEntry& v);
void to_json(json& j, const PipelineSession& v);
void from_json(const json& j, PipelineSession& v);

json stage_output_to_json(const StageOutput& out);
// Decodes the replacement value for `stage`. Throws Error(InvalidDocument).
StageOutput stage_output_from_json(Stage stage, const json& j);

// Compact serialization of one stage's field, used for audit snapshots.
std::string snapshot_of(const PipelineSession& session, Stage stage);

} // namespace monologue
