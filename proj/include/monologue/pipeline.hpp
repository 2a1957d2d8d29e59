#pragma once

#include "monologue/types.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace monologue {

// Type invariants. Each throws Error(InvariantViolation) naming the broken rule.
bool is_single_sentence(std::string_view text);
void validate(const Article& article);
void validate(const TopicSentence& topic);
void validate(const AssociationCatalog& catalog);
void validate(const AssociationCatalog& catalog, const TopicSentence& topic);
void validate(const ScoredCombination& combination, const AssociationCatalog& catalog);
void validate(const Punchline& punchline, const AssociationCatalog& catalog);
void validate(const Angle& angle);

std::optional<Stage> next_stage(Stage s);
bool has_stage_value(const PipelineSession& session, Stage s);

PipelineSession new_session(Article article, std::string id, const std::string& now);

/// Moves the session one stage forward with the value for the next stage.
///
/// The input snapshot is left untouched; the returned snapshot has its
/// version incremented by one and one audit entry appended. A punchline
/// without an explicit combination inherits the session's selected one.
PipelineSession advance(const PipelineSession& session, StageOutput output, Actor actor, const std::string& now);
PipelineSession advance(const PipelineSession& session, StageOutput output, Actor actor);

/// Replaces the value of an already reached stage and clears every later
/// stage. The session stage resets to `stage`. Always audited as Human.
PipelineSession edit_intermediate(const PipelineSession& session, Stage stage, StageOutput replacement,
                                  const std::string& now);
PipelineSession edit_intermediate(const PipelineSession& session, Stage stage, StageOutput replacement);

// SpaceJoin: "{topic} {angle} {punchline}".
// DashJoin: "{topic} {angle minus final period} – {punchline, first letter lowercased}".
MonologueJoke assemble(const TopicSentence& topic, const Angle& angle, const Punchline& punchline,
                       JoinStyle style = JoinStyle::SpaceJoin);

} // namespace monologue
