#include "monologue/workflow.hpp"

#include "monologue/pipeline.hpp"
#include "monologue/text.hpp"

namespace monologue {

namespace {

template <typename T>
T take_parsed(ParseOutcome<T> outcome, Stage stage, const std::string& raw) {
    if (outcome.parsed()) return std::move(*outcome.value);
    std::string message = "could not use the provider reply for " + std::string(to_string(stage));
    if (outcome.kind == ParseKind::Rejected) {
        message = "provider declined the article: " + outcome.rejection_reason.value_or("");
        throw StageParseError(ErrorCode::Rejected, message, stage, raw, std::move(outcome.diagnostics));
    }
    if (!outcome.diagnostics.empty()) message += ": " + outcome.diagnostics.back().message;
    throw StageParseError(ErrorCode::Unparseable, message, stage, raw, std::move(outcome.diagnostics));
}

} // namespace

AssociationCatalog mark_non_literal_handles(AssociationCatalog catalog, const TopicSentence& topic) {
    for (auto& h : catalog.handles) h.non_literal = text::ifind(topic.text, h.text) == std::string_view::npos;
    return catalog;
}

Workflow::Workflow(const TemplateSet& templates, Gateway& gateway, PromptObserver observer)
    : templates_(templates), gateway_(gateway), observer_(std::move(observer)) {}

std::string Workflow::ask(const RenderedPrompt& prompt, const StageOptions& options) {
    if (observer_) observer_(prompt);
    CompletionRequest request{prompt.text, options.max_tokens, options.temperature};
    return gateway_.complete(request).text;
}

DistanceMatrix Workflow::matrix_for(const PipelineSession& session) {
    if (!session.catalog)
        throw Error(ErrorCode::StageNotReached, "session " + session.id + " has no association catalog yet");
    return build_matrix(*session.catalog, gateway_);
}

std::vector<ScoredCombination> Workflow::rank(const PipelineSession& session, CombinationPolicy policy,
                                              Aggregate aggregate) {
    auto matrix = matrix_for(session);
    return rank_combinations(*session.catalog, matrix, policy, aggregate);
}

PipelineSession Workflow::choose_combination(const PipelineSession& session, CombinationPolicy policy,
                                             const std::optional<std::vector<Pick>>& manual_picks,
                                             Aggregate aggregate) {
    if (stage_index(session.stage) < stage_index(Stage::CatalogBuilt))
        throw Error(ErrorCode::StageNotReached, "session " + session.id + " has no association catalog yet");
    auto matrix = matrix_for(session);
    std::vector<ScoredCombination> ranked;
    if (policy != CombinationPolicy::Manual) ranked = rank_combinations(*session.catalog, matrix, policy, aggregate);
    auto chosen = select_combination(ranked, policy, manual_picks, *session.catalog, matrix, aggregate);

    if (session.stage == Stage::CatalogBuilt) {
        return advance(session, chosen, policy == CombinationPolicy::Manual ? Actor::Human : Actor::System);
    }
    return edit_intermediate(session, Stage::CombinationSelected, chosen);
}

PipelineSession Workflow::run_next(const PipelineSession& session, const StageOptions& options) {
    switch (session.stage) {
    case Stage::ArticleLoaded: {
        auto raw = ask(render_topic_prompt(templates_, session.article), options);
        auto topic = take_parsed(parse_topic(raw, session.article.id), Stage::TopicDrafted, raw);
        return advance(session, std::move(topic), Actor::Provider);
    }
    case Stage::TopicDrafted: {
        auto raw = ask(render_handles_prompt(templates_, *session.topic), options);
        auto catalog = take_parsed(parse_catalog(raw), Stage::CatalogBuilt, raw);
        return advance(session, mark_non_literal_handles(std::move(catalog), *session.topic), Actor::Provider);
    }
    case Stage::CatalogBuilt:
        return choose_combination(session, options.policy, options.manual_picks, options.aggregate);
    case Stage::CombinationSelected: {
        auto raw = ask(render_punchline_prompt(templates_, *session.catalog, options.sentiment, session.combination),
                       options);
        auto punchline = take_parsed(parse_punchline(raw, *session.catalog, options.sentiment),
                                     Stage::PunchlineWritten, raw);
        if (punchline.combination) {
            if (punchline.combination->picks == session.combination->picks) {
                punchline.combination = session.combination;
            } else {
                // The model built on other associations than requested; keep
                // what it used, scored like any manual choice.
                auto matrix = matrix_for(session);
                punchline.combination = select_combination({}, CombinationPolicy::Manual,
                                                           punchline.combination->picks, *session.catalog, matrix,
                                                           options.aggregate);
            }
        }
        return advance(session, std::move(punchline), Actor::Provider);
    }
    case Stage::PunchlineWritten: {
        auto raw = ask(render_angle_prompt(templates_, *session.topic, *session.punchline), options);
        auto angle = take_parsed(parse_angle(raw), Stage::AngleWritten, raw);
        return advance(session, std::move(angle), Actor::Provider);
    }
    case Stage::AngleWritten:
        return advance(session, assemble(*session.topic, *session.angle, *session.punchline, options.style),
                       Actor::System);
    case Stage::Assembled:
        break;
    }
    throw Error(ErrorCode::SessionComplete, "session " + session.id + " is already assembled");
}

PipelineSession Workflow::run_all(PipelineSession session, const StageOptions& options) {
    while (session.stage != Stage::Assembled) session = run_next(session, options);
    return session;
}

} // namespace monologue
