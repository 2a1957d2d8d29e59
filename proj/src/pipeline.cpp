#include "monologue/pipeline.hpp"

#include "monologue/codec.hpp"
#include "monologue/error.hpp"
#include "monologue/text.hpp"

#include <cctype>
#include <set>

namespace monologue {

namespace {

[[noreturn]] void violation(const std::string& message) {
    throw Error(ErrorCode::InvariantViolation, message);
}

bool is_terminal_mark(char c) {
    return c == '.' || c == '!' || c == '?';
}

void require_nonempty(std::string_view s, const char* what) {
    if (text::trim(s).empty()) violation(std::string(what) + " must be nonempty");
}

void clear_after(PipelineSession& s, Stage stage) {
    const int keep = stage_index(stage);
    if (keep < stage_index(Stage::TopicDrafted)) s.topic.reset();
    if (keep < stage_index(Stage::CatalogBuilt)) s.catalog.reset();
    if (keep < stage_index(Stage::CombinationSelected)) s.combination.reset();
    if (keep < stage_index(Stage::PunchlineWritten)) s.punchline.reset();
    if (keep < stage_index(Stage::AngleWritten)) s.angle.reset();
    if (keep < stage_index(Stage::Assembled)) s.joke.reset();
}

// Checks a stage value against the upstream values already in `s` and
// stores it. Fields for earlier stages must be present.
void store_value(PipelineSession& s, StageOutput value) {
    std::visit(
        [&s](auto&& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Article>) {
                validate(v);
                s.article = std::move(v);
            } else if constexpr (std::is_same_v<T, TopicSentence>) {
                validate(v);
                if (v.source_article_id.empty()) v.source_article_id = s.article.id;
                if (v.source_article_id != s.article.id) violation("topic refers to a different article");
                s.topic = std::move(v);
            } else if constexpr (std::is_same_v<T, AssociationCatalog>) {
                validate(v, *s.topic);
                s.catalog = std::move(v);
            } else if constexpr (std::is_same_v<T, ScoredCombination>) {
                validate(v, *s.catalog);
                s.combination = std::move(v);
            } else if constexpr (std::is_same_v<T, Punchline>) {
                if (!v.combination) v.combination = s.combination;
                validate(v, *s.catalog);
                s.punchline = std::move(v);
            } else if constexpr (std::is_same_v<T, Angle>) {
                validate(v);
                s.angle = std::move(v);
            } else if constexpr (std::is_same_v<T, MonologueJoke>) {
                if (v.topic != *s.topic || v.angle != *s.angle || v.punchline != *s.punchline)
                    violation("joke components differ from the session's topic, angle and punchline");
                if (assemble(v.topic, v.angle, v.punchline, v.style).assembled_text != v.assembled_text)
                    violation("assembledText is not the assembly of its components");
                s.joke = std::move(v);
            }
        },
        std::move(value));
}

} // namespace

bool is_single_sentence(std::string_view s) {
    s = text::trim(s);
    if (s.empty()) return false;
    if (!text::sentence_boundaries(s).empty()) return false;
    std::size_t trailing = 0;
    for (auto it = s.rbegin(); it != s.rend() && is_terminal_mark(*it); ++it) ++trailing;
    return trailing <= 1;
}

void validate(const Article& a) {
    if (text::count_words(a.body) == 0) violation("article body is empty");
    if (a.word_count != text::count_words(a.body)) violation("article wordCount does not match its body");
}

void validate(const TopicSentence& t) {
    require_nonempty(t.text, "topic");
    if (!is_single_sentence(t.text)) violation("topic must be exactly one sentence");
}

void validate(const AssociationCatalog& c) {
    if (c.handles.size() != 2 && c.handles.size() != 3) violation("expected 2 or 3 handles");
    if (c.associations.size() != c.handles.size()) violation("one association list per handle is required");
    for (std::size_t i = 0; i < c.handles.size(); ++i) {
        const auto& h = c.handles[i];
        require_nonempty(h.text, "handle");
        if (h.ordinal != i) violation("handle ordinals must be 0..n-1 in order");
        const auto& list = c.associations[i];
        if (list.size() < 3) violation("handle \"" + h.text + "\" needs at least 3 associations");
        std::set<std::string> seen;
        for (const auto& a : list) {
            require_nonempty(a, "association");
            if (!seen.insert(text::to_lower(a)).second)
                violation("duplicate association \"" + a + "\" for handle \"" + h.text + "\"");
        }
    }
}

void validate(const AssociationCatalog& c, const TopicSentence& topic) {
    validate(c);
    for (const auto& h : c.handles) {
        if (!h.non_literal && text::ifind(topic.text, h.text) == std::string_view::npos)
            violation("handle \"" + h.text + "\" does not occur in the topic and is not flagged nonLiteral");
    }
}

void validate(const ScoredCombination& combo, const AssociationCatalog& c) {
    if (combo.picks.size() != c.handles.size()) violation("combination needs exactly one pick per handle");
    for (std::size_t i = 0; i < combo.picks.size(); ++i) {
        const auto& p = combo.picks[i];
        if (p.handle_ordinal != i) violation("combination picks must follow handle order");
        if (p.association_index >= c.associations[i].size()) violation("combination pick index out of range");
    }
    if (!(combo.distance >= 0.0 && combo.distance <= 2.0)) violation("combination distance outside [0, 2]");
}

void validate(const Punchline& p, const AssociationCatalog& c) {
    require_nonempty(p.text, "punchline");
    if (p.combination) validate(*p.combination, c);
}

void validate(const Angle& a) {
    require_nonempty(a.text, "angle");
    if (a.text.find('\n') != std::string::npos) violation("angle must be a single line");
}

std::optional<Stage> next_stage(Stage s) {
    if (s == Stage::Assembled) return std::nullopt;
    return stage_at(stage_index(s) + 1);
}

bool has_stage_value(const PipelineSession& s, Stage stage) {
    switch (stage) {
    case Stage::ArticleLoaded: return true;
    case Stage::TopicDrafted: return s.topic.has_value();
    case Stage::CatalogBuilt: return s.catalog.has_value();
    case Stage::CombinationSelected: return s.combination.has_value();
    case Stage::PunchlineWritten: return s.punchline.has_value();
    case Stage::AngleWritten: return s.angle.has_value();
    case Stage::Assembled: return s.joke.has_value();
    }
    return false;
}

PipelineSession new_session(Article article, std::string id, const std::string& now) {
    validate(article);
    PipelineSession s;
    s.id = std::move(id);
    s.stage = Stage::ArticleLoaded;
    s.version = 1;
    s.created_at = now;
    s.updated_at = now;
    s.article = std::move(article);
    return s;
}

PipelineSession advance(const PipelineSession& session, StageOutput output, Actor actor, const std::string& now) {
    auto next = next_stage(session.stage);
    if (!next) throw Error(ErrorCode::SessionComplete, "session " + session.id + " is already assembled");
    const Stage target = stage_of(output);
    if (target != *next) {
        throw Error(ErrorCode::StageOrderViolation,
                    "session is at " + std::string(to_string(session.stage)) + "; expected a " +
                        std::string(to_string(*next)) + " value, got " + std::string(to_string(target)));
    }
    PipelineSession out = session;
    store_value(out, std::move(output));
    out.stage = target;
    out.version = session.version + 1;
    out.updated_at = now;
    out.audit_log.push_back(
        AuditEntry{now, actor, target, snapshot_of(session, target), snapshot_of(out, target)});
    return out;
}

PipelineSession advance(const PipelineSession& session, StageOutput output, Actor actor) {
    return advance(session, std::move(output), actor, text::utc_timestamp());
}

PipelineSession edit_intermediate(const PipelineSession& session, Stage stage, StageOutput replacement,
                                  const std::string& now) {
    if (stage_index(stage) > stage_index(session.stage)) {
        throw Error(ErrorCode::StageNotReached, "cannot edit " + std::string(to_string(stage)) + "; session is at " +
                                                    std::string(to_string(session.stage)));
    }
    if (stage_of(replacement) != stage) {
        throw Error(ErrorCode::InvariantViolation, "replacement is a " + std::string(to_string(stage_of(replacement))) +
                                                       " value, not " + std::string(to_string(stage)));
    }
    PipelineSession out = session;
    clear_after(out, stage);
    store_value(out, std::move(replacement));
    out.stage = stage;
    out.version = session.version + 1;
    out.updated_at = now;
    out.audit_log.push_back(
        AuditEntry{now, Actor::Human, stage, snapshot_of(session, stage), snapshot_of(out, stage)});
    return out;
}

PipelineSession edit_intermediate(const PipelineSession& session, Stage stage, StageOutput replacement) {
    return edit_intermediate(session, stage, std::move(replacement), text::utc_timestamp());
}

MonologueJoke assemble(const TopicSentence& topic, const Angle& angle, const Punchline& punchline, JoinStyle style) {
    auto t = text::trim(topic.text);
    auto a = text::trim(angle.text);
    auto p = text::trim(punchline.text);
    if (t.empty()) throw Error(ErrorCode::EmptyComponent, "topic is empty");
    if (a.empty()) throw Error(ErrorCode::EmptyComponent, "angle is empty");
    if (p.empty()) throw Error(ErrorCode::EmptyComponent, "punchline is empty");

    std::string assembled;
    if (style == JoinStyle::SpaceJoin) {
        assembled.append(t).append(" ").append(a).append(" ").append(p);
    } else {
        if (a.back() == '.') a.remove_suffix(1);
        a = text::trim(a);
        std::string tail(p);
        tail[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(tail[0])));
        assembled.append(t).append(" ").append(a).append(" \xE2\x80\x93 ").append(tail);
    }
    return MonologueJoke{topic, angle, punchline, std::move(assembled), style};
}

} // namespace monologue
