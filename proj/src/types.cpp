#include "monologue/types.hpp"

#include "monologue/text.hpp"

#include <array>
#include <utility>

namespace monologue {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table, std::string_view s) {
    for (const auto& [name, value] : table) {
        if (text::iequals(name, s)) return value;
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Sentiment s) {
    return s == Sentiment::Negative ? "negative" : "positive";
}

std::string_view to_string(Stage s) {
    switch (s) {
    case Stage::ArticleLoaded: return "articleLoaded";
    case Stage::TopicDrafted: return "topicDrafted";
    case Stage::CatalogBuilt: return "catalogBuilt";
    case Stage::CombinationSelected: return "combinationSelected";
    case Stage::PunchlineWritten: return "punchlineWritten";
    case Stage::AngleWritten: return "angleWritten";
    case Stage::Assembled: return "assembled";
    }
    return "unknown";
}

std::string_view to_string(LengthClass c) {
    switch (c) {
    case LengthClass::Short: return "short";
    case LengthClass::Medium: return "medium";
    case LengthClass::Long: return "long";
    }
    return "unknown";
}

std::string_view to_string(CombinationPolicy p) {
    switch (p) {
    case CombinationPolicy::MaxDistance: return "maxDistance";
    case CombinationPolicy::MinDistance: return "minDistance";
    case CombinationPolicy::Manual: return "manual";
    }
    return "unknown";
}

std::string_view to_string(JoinStyle s) {
    return s == JoinStyle::SpaceJoin ? "spaceJoin" : "dashJoin";
}

std::string_view to_string(Actor a) {
    switch (a) {
    case Actor::Human: return "human";
    case Actor::Provider: return "provider";
    case Actor::System: return "system";
    }
    return "unknown";
}

std::optional<Sentiment> parse_sentiment(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Sentiment>, 2> table{{
        {"negative", Sentiment::Negative},
        {"positive", Sentiment::Positive},
    }};
    return lookup(table, s);
}

std::optional<Stage> parse_stage(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Stage>, 14> table{{
        {"articleLoaded", Stage::ArticleLoaded},
        {"topicDrafted", Stage::TopicDrafted},
        {"catalogBuilt", Stage::CatalogBuilt},
        {"combinationSelected", Stage::CombinationSelected},
        {"punchlineWritten", Stage::PunchlineWritten},
        {"angleWritten", Stage::AngleWritten},
        {"assembled", Stage::Assembled},
        {"article-loaded", Stage::ArticleLoaded},
        {"topic-drafted", Stage::TopicDrafted},
        {"catalog-built", Stage::CatalogBuilt},
        {"combination-selected", Stage::CombinationSelected},
        {"punchline-written", Stage::PunchlineWritten},
        {"angle-written", Stage::AngleWritten},
        {"assembled", Stage::Assembled},
    }};
    return lookup(table, s);
}

std::optional<LengthClass> parse_length_class(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, LengthClass>, 3> table{{
        {"short", LengthClass::Short},
        {"medium", LengthClass::Medium},
        {"long", LengthClass::Long},
    }};
    return lookup(table, s);
}

std::optional<CombinationPolicy> parse_policy(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, CombinationPolicy>, 5> table{{
        {"maxDistance", CombinationPolicy::MaxDistance},
        {"minDistance", CombinationPolicy::MinDistance},
        {"manual", CombinationPolicy::Manual},
        {"max-distance", CombinationPolicy::MaxDistance},
        {"min-distance", CombinationPolicy::MinDistance},
    }};
    return lookup(table, s);
}

std::optional<JoinStyle> parse_join_style(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, JoinStyle>, 4> table{{
        {"spaceJoin", JoinStyle::SpaceJoin},
        {"dashJoin", JoinStyle::DashJoin},
        {"space", JoinStyle::SpaceJoin},
        {"dash", JoinStyle::DashJoin},
    }};
    return lookup(table, s);
}

std::optional<Actor> parse_actor(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, Actor>, 3> table{{
        {"human", Actor::Human},
        {"provider", Actor::Provider},
        {"system", Actor::System},
    }};
    return lookup(table, s);
}

} // namespace monologue
