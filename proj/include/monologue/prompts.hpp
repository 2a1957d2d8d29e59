#pragma once

#include "monologue/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace monologue {

enum class StageKey { Topic, HandlesAssociations, Punchline, Angle };

std::string_view to_string(StageKey key);
std::optional<StageKey> parse_stage_key(std::string_view s);

// Placeholder names recognised in templates, written as {{name}}.
inline constexpr std::string_view kPlaceholderArticleBody = "article_body";
inline constexpr std::string_view kPlaceholderTopic = "topic";
inline constexpr std::string_view kPlaceholderCatalogBlock = "catalog_block";
inline constexpr std::string_view kPlaceholderSentimentWord = "sentiment_word";
inline constexpr std::string_view kPlaceholderForcedAssociations = "forced_associations";
inline constexpr std::string_view kPlaceholderPunchline = "punchline";

struct PromptTemplate {
    StageKey stage_key = StageKey::Topic;
    std::string template_text;
    std::set<std::string> required_placeholders;
    bool reconstructed = false;
    std::string fingerprint; // sha256 of template_text

    /// Parses a template file: a front-matter block between two "---" lines
    /// holding `stage:`, `placeholders:` (comma separated) and optionally
    /// `reconstructed:`, followed by the template text. Lines starting with
    /// '#' inside the front matter are comments.
    ///
    /// Throws MissingPlaceholder when the declared placeholder set differs from
    /// the one used in the text, and InvalidDocument for a malformed header.
    static PromptTemplate parse(std::string_view file_text);
};

struct RenderedPrompt {
    StageKey stage_key = StageKey::Topic;
    std::string text;
    std::map<std::string, std::string> substitutions;
    std::string template_fingerprint;

    bool operator==(const RenderedPrompt&) const = default;
};

// Substitutes every placeholder. A "{{" inside a substituted value is written
// as "{ {" so the rendered text never carries a residual placeholder opener.
RenderedPrompt render(const PromptTemplate& tpl, const std::map<std::string, std::string>& values);

// One active template per stage key.
class TemplateSet {
public:
    // The templates shipped in templates/, compiled into the binary.
    static TemplateSet builtin();
    // Loads every *.prompt file in `dir`; each stage key must appear exactly once.
    static TemplateSet load_dir(const std::filesystem::path& dir);

    [[nodiscard]] const PromptTemplate& get(StageKey key) const;

private:
    std::map<StageKey, PromptTemplate> templates_;
};

// Canonical catalog block:
//   Handles: h1, h2[, h3]
//   Associations for h1: a1, a2, ...
// A list whose items contain a comma is written as "- item" lines instead.
std::string render_catalog_block(const AssociationCatalog& catalog);

RenderedPrompt render_topic_prompt(const TemplateSet& set, const Article& article);
RenderedPrompt render_handles_prompt(const TemplateSet& set, const TopicSentence& topic);
// Throws IndexOutOfRange when the forced combination does not fit the catalog.
RenderedPrompt render_punchline_prompt(const TemplateSet& set, const AssociationCatalog& catalog,
                                       Sentiment sentiment,
                                       const std::optional<ScoredCombination>& forced = std::nullopt);
RenderedPrompt render_angle_prompt(const TemplateSet& set, const TopicSentence& topic, const Punchline& punchline);

} // namespace monologue
