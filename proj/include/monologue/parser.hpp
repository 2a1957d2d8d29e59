#pragma once

#include "monologue/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Turns free-text provider replies into typed stage values. Parsers never
// throw; every input maps to exactly one outcome kind.
namespace monologue {

enum class ParseKind { Parsed, Rejected, Unparseable };

std::string_view to_string(ParseKind kind);

struct Diagnostic {
    std::size_t line = 0; // 1-based, 0 when not tied to a line
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

template <typename T>
struct ParseOutcome {
    ParseKind kind = ParseKind::Unparseable;
    std::optional<T> value;                    // present iff Parsed
    std::optional<std::string> rejection_reason; // present iff Rejected
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool parsed() const { return kind == ParseKind::Parsed; }
};

// First sentence of the reply. Replies mentioning "inappropriate" within
// their first two sentences are treated as the model declining the article.
ParseOutcome<TopicSentence> parse_topic(std::string_view raw, std::string_view article_id = {});

// Accepts the canonical block ("Handles: a, b" then "Associations for a: x, y, z")
// and the common variants: bullet lists (-, *, •, 1.), markdown bold, quoted
// items, and a missing Handles line. Duplicate associations are dropped with
// a diagnostic. Handles come back with non_literal = false.
ParseOutcome<AssociationCatalog> parse_catalog(std::string_view raw);

// Recognises "<assocA> + <assocB>[ + <assocC>]: <text>". Named associations
// are resolved case-insensitively against the catalog; the resulting picks
// carry distance 0 and policy Manual until the caller scores them. Without a
// (resolvable) annotation the punchline has no combination.
ParseOutcome<Punchline> parse_punchline(std::string_view raw, const AssociationCatalog& catalog,
                                        Sentiment sentiment = Sentiment::Negative);

// Single line; surrounding quotes and ellipses ("…", "...") are removed.
ParseOutcome<Angle> parse_angle(std::string_view raw);

} // namespace monologue
