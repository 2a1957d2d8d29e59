#pragma once

#include "monologue/distance.hpp"
#include "monologue/error.hpp"
#include "monologue/gateway.hpp"
#include "monologue/parser.hpp"
#include "monologue/prompts.hpp"
#include "monologue/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace monologue {

struct StageOptions {
    Sentiment sentiment = Sentiment::Negative;
    CombinationPolicy policy = CombinationPolicy::MaxDistance;
    std::optional<std::vector<Pick>> manual_picks;
    JoinStyle style = JoinStyle::SpaceJoin;
    double temperature = kCreativeTemperature;
    int max_tokens = 512;
    Aggregate aggregate = Aggregate::Mean;
};

// A provider reply that did not parse (or declined the article). Carries the
// raw reply so a human can repair it.
class StageParseError : public Error {
public:
    StageParseError(ErrorCode code, const std::string& message, Stage stage, std::string raw_text,
                    std::vector<Diagnostic> diagnostics)
        : Error(code, message), stage_(stage), raw_text_(std::move(raw_text)), diagnostics_(std::move(diagnostics)) {}

    [[nodiscard]] Stage stage() const { return stage_; }
    [[nodiscard]] const std::string& raw_text() const { return raw_text_; }
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    Stage stage_;
    std::string raw_text_;
    std::vector<Diagnostic> diagnostics_;
};

class Workflow {
public:
    using PromptObserver = std::function<void(const RenderedPrompt&)>;

    Workflow(const TemplateSet& templates, Gateway& gateway, PromptObserver observer = {});

    /// Runs the stage after `session.stage`. Provider stages render their
    /// prompt, call the gateway and parse the reply; combination selection
    /// ranks the catalog by distance; assembly joins the parts with
    /// `options.style`. Throws StageParseError for Unparseable or Rejected
    /// replies and SessionComplete on an assembled session.
    PipelineSession run_next(const PipelineSession& session, const StageOptions& options);

    // Repeats run_next until the session is assembled.
    PipelineSession run_all(PipelineSession session, const StageOptions& options);

    [[nodiscard]] DistanceMatrix matrix_for(const PipelineSession& session);
    [[nodiscard]] std::vector<ScoredCombination> rank(const PipelineSession& session, CombinationPolicy policy,
                                                      Aggregate aggregate = Aggregate::Mean);

    // Selects at CatalogBuilt (advance), or replaces the selection on a later
    // session (edit, clearing punchline and beyond). At CatalogBuilt manual
    // picks are audited as Human and ranked picks as System; replacements are
    // edits and always Human.
    PipelineSession choose_combination(const PipelineSession& session, CombinationPolicy policy,
                                       const std::optional<std::vector<Pick>>& manual_picks,
                                       Aggregate aggregate = Aggregate::Mean);

private:
    std::string ask(const RenderedPrompt& prompt, const StageOptions& options);

    const TemplateSet& templates_;
    Gateway& gateway_;
    PromptObserver observer_;
};

// Flags handles that do not occur verbatim in the topic as non-literal.
AssociationCatalog mark_non_literal_handles(AssociationCatalog catalog, const TopicSentence& topic);

} // namespace monologue
