#include "test_support.hpp"

#include "monologue/workflow.hpp"

#include <doctest.h>

using namespace testing;

namespace {

ProviderConfig mock_config(const fs::path& dir) {
    ProviderConfig c;
    c.kind = ProviderKind::Mock;
    c.fixture_dir = dir;
    return c;
}

StageOptions mock_options(Sentiment sentiment, JoinStyle style) {
    StageOptions o;
    o.sentiment = sentiment;
    o.style = style;
    o.temperature = default_temperature(ProviderKind::Mock);
    return o;
}

PipelineSession fresh(const std::string& article) {
    return new_session(load_article_file(source_path("data/articles") / article), "s-workflow",
                       "2026-01-01T00:00:00.000Z");
}

} // namespace

TEST_CASE("mock replay reproduces the reference jokes") {
    auto templates = TemplateSet::builtin();
    Gateway gateway(mock_config(source_path("data/fixtures")));
    Workflow wf(templates, gateway);

    auto neg = wf.run_all(fresh("copilot_365.txt"), mock_options(Sentiment::Negative, JoinStyle::SpaceJoin));
    CHECK(neg.stage == Stage::Assembled);
    CHECK(neg.joke->assembled_text == golden::kCopilotFinalNegative);
    CHECK(neg.catalog->handles.size() == 2);
    CHECK(neg.audit_log.size() == 6);
    CHECK(neg.version == 7);

    auto pos = wf.run_all(fresh("copilot_365.txt"), mock_options(Sentiment::Positive, JoinStyle::SpaceJoin));
    CHECK(pos.joke->assembled_text == golden::kCopilotFinalPositive);
    CHECK(pos.punchline->sentiment == Sentiment::Positive);

    auto youtube = wf.run_all(fresh("youtube_1080p_premium.txt"), mock_options(Sentiment::Negative, JoinStyle::DashJoin));
    CHECK(youtube.joke->assembled_text == golden::kYoutubeSummary);
    CHECK(youtube.punchline->combination->picks == std::vector<Pick>{{0, 4}, {1, 4}});
    // the punchline's picks are rescored from the matrix
    CHECK(youtube.punchline->combination->distance > 0.0);

    CHECK_THROWS_AS((void)wf.run_next(youtube, mock_options(Sentiment::Negative, JoinStyle::DashJoin)), Error);
}

TEST_CASE("one stage at a time") {
    auto templates = TemplateSet::builtin();
    Gateway gateway(mock_config(source_path("data/fixtures")));
    std::vector<StageKey> seen;
    Workflow wf(templates, gateway, [&](const RenderedPrompt& p) { seen.push_back(p.stage_key); });
    auto options = mock_options(Sentiment::Negative, JoinStyle::SpaceJoin);
    auto s = fresh("copilot_365.txt");
    s = wf.run_next(s, options);
    CHECK(s.stage == Stage::TopicDrafted);
    CHECK(s.topic->text == golden::kCopilotTopic);
    s = wf.run_next(s, options);
    CHECK(s.stage == Stage::CatalogBuilt);
    for (std::size_t h = 0; h < 2; ++h)
        CHECK(std::set<std::string>(s.catalog->associations[h].begin(), s.catalog->associations[h].end()) ==
              std::set<std::string>(golden::kCopilotAssociations[h].begin(), golden::kCopilotAssociations[h].end()));
    s = wf.run_next(s, options);
    CHECK(s.stage == Stage::CombinationSelected);
    CHECK(s.combination->policy == CombinationPolicy::MaxDistance);
    CHECK(s.combination->picks == wf.rank(s, CombinationPolicy::MaxDistance).front().picks);
    CHECK(seen == std::vector<StageKey>{StageKey::Topic, StageKey::HandlesAssociations});
}

TEST_CASE("choose_combination advances or replaces") {
    auto templates = TemplateSet::builtin();
    Gateway gateway(mock_config(source_path("data/fixtures")));
    Workflow wf(templates, gateway);
    auto at_catalog = session_at(Stage::CatalogBuilt);
    auto picked = wf.choose_combination(at_catalog, CombinationPolicy::Manual, std::vector<Pick>{{0, 1}, {1, 2}});
    CHECK(picked.stage == Stage::CombinationSelected);
    CHECK(picked.combination->policy == CombinationPolicy::Manual);
    CHECK(picked.audit_log.back().actor == Actor::Human);
    CHECK(picked.combination->distance ==
          doctest::Approx(oracle_pair_distance("Clippy 2.0", "Revolutionary technology")).epsilon(1e-12));

    auto later = session_at(Stage::AngleWritten);
    auto replaced = wf.choose_combination(later, CombinationPolicy::MinDistance, std::nullopt);
    CHECK(replaced.stage == Stage::CombinationSelected);
    CHECK_FALSE(replaced.punchline.has_value());
    CHECK_FALSE(replaced.angle.has_value());
    CHECK(replaced.audit_log.back().actor == Actor::Human);
    CHECK(wf.choose_combination(at_catalog, CombinationPolicy::MaxDistance, std::nullopt).audit_log.back().actor ==
          Actor::System);
    CHECK(replaced.combination->picks == wf.rank(later, CombinationPolicy::MinDistance).front().picks);

    CHECK_THROWS_AS((void)wf.choose_combination(session_at(Stage::TopicDrafted), CombinationPolicy::MaxDistance,
                                                std::nullopt),
                    Error);
}

TEST_CASE("bad replies surface as StageParseError") {
    TempDir dir;
    for (const auto& e : fs::directory_iterator(source_path("data/fixtures"))) fs::copy_file(e.path(), dir / e.path().filename().string());
    auto templates = TemplateSet::builtin();
    Gateway gateway(mock_config(dir.path()));
    auto options = mock_options(Sentiment::Negative, JoinStyle::SpaceJoin);
    auto topic_prompt = render_topic_prompt(templates, fresh("copilot_365.txt").article);
    auto fixture = Gateway::fixture_path(dir.path(), CompletionRequest{topic_prompt.text, options.max_tokens, options.temperature});
    REQUIRE(fs::exists(fixture));
    Workflow wf(templates, gateway);

    write_text(fixture, "");
    try {
        (void)wf.run_next(fresh("copilot_365.txt"), options);
        FAIL("expected StageParseError");
    } catch (const StageParseError& e) {
        CHECK(e.code() == ErrorCode::Unparseable);
        CHECK(e.stage() == Stage::TopicDrafted);
        CHECK(e.raw_text().empty());
        CHECK_FALSE(e.diagnostics().empty());
    }

    write_text(fixture, "This article is inappropriate for a joke.");
    try {
        (void)wf.run_next(fresh("copilot_365.txt"), options);
        FAIL("expected StageParseError");
    } catch (const StageParseError& e) {
        CHECK(e.code() == ErrorCode::Rejected);
        CHECK(e.raw_text() == "This article is inappropriate for a joke.");
    }

    fs::remove(fixture);
    try {
        (void)wf.run_next(fresh("copilot_365.txt"), options);
        FAIL("expected MissingFixture");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingFixture);
    }
}

TEST_CASE("non-literal handles are flagged") {
    auto c = make_catalog({"Copilot", "the paperclip"}, {{"a", "b", "c"}, {"d", "e", "f"}});
    auto marked = mark_non_literal_handles(c, TopicSentence{golden::kCopilotTopic, "a"});
    CHECK_FALSE(marked.handles[0].non_literal);
    CHECK(marked.handles[1].non_literal);
}
