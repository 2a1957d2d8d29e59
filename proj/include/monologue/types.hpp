#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace monologue {

enum class Sentiment { Negative, Positive };

// Machine states, in order. The four authoring steps (topic, handles and
// associations, punchline, angle) are bracketed by ingestion and assembly,
// and combination selection is its own state so it can be overridden.
enum class Stage {
    ArticleLoaded,
    TopicDrafted,
    CatalogBuilt,
    CombinationSelected,
    PunchlineWritten,
    AngleWritten,
    Assembled,
};

inline constexpr int kStageCount = 7;

constexpr int stage_index(Stage s) { return static_cast<int>(s); }
constexpr Stage stage_at(int index) { return static_cast<Stage>(index); }

enum class LengthClass { Short, Medium, Long };
enum class CombinationPolicy { MaxDistance, MinDistance, Manual };
enum class JoinStyle { SpaceJoin, DashJoin };
enum class Actor { Human, Provider, System };

struct Article {
    std::string id;
    std::string source_uri = "inline";
    std::optional<std::string> title;
    std::string body;
    std::size_t word_count = 0;
    LengthClass length_class = LengthClass::Short;

    bool operator==(const Article&) const = default;
};

struct TopicSentence {
    std::string text;
    std::string source_article_id;

    bool operator==(const TopicSentence&) const = default;
};

struct Handle {
    std::string text;
    std::size_t ordinal = 0;
    // Set when the handle does not occur verbatim in the topic sentence.
    bool non_literal = false;

    bool operator==(const Handle&) const = default;
};

struct AssociationCatalog {
    std::vector<Handle> handles;
    // associations[i] belongs to handles[i]
    std::vector<std::vector<std::string>> associations;

    bool operator==(const AssociationCatalog&) const = default;
};

struct Pick {
    std::size_t handle_ordinal = 0;
    std::size_t association_index = 0;

    auto operator<=>(const Pick&) const = default;
};

struct ScoredCombination {
    std::vector<Pick> picks; // one per handle, in handle order
    double distance = 0.0;
    CombinationPolicy policy = CombinationPolicy::MaxDistance;

    bool operator==(const ScoredCombination&) const = default;
};

struct Punchline {
    std::string text;
    // The associations the punchline was built from. Filled by the workflow
    // from the selected combination when the model reply is not annotated.
    std::optional<ScoredCombination> combination;
    Sentiment sentiment = Sentiment::Negative;

    bool operator==(const Punchline&) const = default;
};

struct Angle {
    std::string text;

    bool operator==(const Angle&) const = default;
};

struct MonologueJoke {
    TopicSentence topic;
    Angle angle;
    Punchline punchline;
    std::string assembled_text;
    JoinStyle style = JoinStyle::SpaceJoin;

    bool operator==(const MonologueJoke&) const = default;
};

struct AuditEntry {
    std::string timestamp;
    Actor actor = Actor::System;
    Stage stage = Stage::ArticleLoaded;
    std::string before; // serialized stage value, "null" when absent
    std::string after;

    bool operator==(const AuditEntry&) const = default;
};

// The value produced by one stage. The alternative index equals the stage index.
using StageOutput =
    std::variant<Article, TopicSentence, AssociationCatalog, ScoredCombination, Punchline, Angle, MonologueJoke>;

constexpr Stage stage_of(const StageOutput& out) { return stage_at(static_cast<int>(out.index())); }

struct PipelineSession {
    std::string id;
    Stage stage = Stage::ArticleLoaded;
    std::uint64_t version = 1;
    std::string created_at;
    std::string updated_at;
    Article article;
    std::optional<TopicSentence> topic;
    std::optional<AssociationCatalog> catalog;
    std::optional<ScoredCombination> combination;
    std::optional<Punchline> punchline;
    std::optional<Angle> angle;
    std::optional<MonologueJoke> joke;
    std::vector<AuditEntry> audit_log;

    bool operator==(const PipelineSession&) const = default;
};

std::string_view to_string(Sentiment s);
std::string_view to_string(Stage s);
std::string_view to_string(LengthClass c);
std::string_view to_string(CombinationPolicy p);
std::string_view to_string(JoinStyle s);
std::string_view to_string(Actor a);

// Parsers for the lowerCamelCase / kebab-case names used on the wire and the
// command line. Both spellings are accepted; std::nullopt on anything else.
std::optional<Sentiment> parse_sentiment(std::string_view s);
std::optional<Stage> parse_stage(std::string_view s);
std::optional<LengthClass> parse_length_class(std::string_view s);
std::optional<CombinationPolicy> parse_policy(std::string_view s);
std::optional<JoinStyle> parse_join_style(std::string_view s);
std::optional<Actor> parse_actor(std::string_view s);

} // namespace monologue
