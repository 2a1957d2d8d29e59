#include "test_support.hpp"

#include "monologue/error.hpp"
#include "monologue/prompts.hpp"

#include <doctest.h>

using namespace testing;

namespace {

const TemplateSet& builtin() {
    static const TemplateSet set = TemplateSet::builtin();
    return set;
}

AssociationCatalog copilot() { return make_catalog(golden::kCopilotHandles, golden::kCopilotAssociations); }

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::StorageFailure;
}

} // namespace

TEST_CASE("topic prompt carries the instruction text") {
    auto article = load_article_text("X");
    auto p = render_topic_prompt(builtin(), article);
    CHECK(p.stage_key == StageKey::Topic);
    CHECK(p.text.find("It need not be intentionally funny but must be factually accurate") != std::string::npos);
    CHECK(p.text.find("We will generate Monologue joke topics") != std::string::npos);
    CHECK(p.substitutions.at("article_body") == "X");
    CHECK(p.text.find("{{") == std::string::npos);
}

TEST_CASE("handles prompt") {
    auto p = render_handles_prompt(builtin(), TopicSentence{golden::kCopilotTopic, "a"});
    CHECK(p.text.find("Brainstorm a list of associations for each handle") != std::string::npos);
    CHECK(p.text.find("Determine two handles in the topic") != std::string::npos);
    CHECK(p.substitutions.at("topic") == golden::kCopilotTopic);
    CHECK(p.text.find("{{") == std::string::npos);

    auto t = render_handles_prompt(builtin(), TopicSentence{"T", "a"});
    CHECK(t.substitutions.at("topic") == "T");
}

TEST_CASE("punchline prompt sentiment slot") {
    auto neg = render_punchline_prompt(builtin(), copilot(), Sentiment::Negative);
    auto pos = render_punchline_prompt(builtin(), copilot(), Sentiment::Positive);
    CHECK(neg.text.find("evoke a negative emotion towards the first major entity") != std::string::npos);
    CHECK(pos.text.find("evoke a positive emotion towards the first major entity") != std::string::npos);
    CHECK(neg.text.find("Pair an association from one list with an association from the other list") !=
          std::string::npos);
    auto diff = token_diff(neg.text, pos.text);
    REQUIRE(diff.has_value());
    REQUIRE(diff->size() == 1);
    CHECK(diff->front() == std::pair<std::string, std::string>{"negative", "positive"});
    CHECK(neg.template_fingerprint == pos.template_fingerprint);
}

TEST_CASE("forced combination appears in the punchline prompt") {
    ScoredCombination combo{{Pick{0, 6}, Pick{1, 4}}, 0.7, CombinationPolicy::MaxDistance};
    auto p = render_punchline_prompt(builtin(), copilot(), Sentiment::Negative, combo);
    CHECK(p.text.find("Automated tasks") != std::string::npos);
    CHECK(p.text.find("Annoying assistant") != std::string::npos);
    CHECK(p.substitutions.at("forced_associations").find("\"Automated tasks\" + \"Annoying assistant\"") !=
          std::string::npos);
    // sentiment isolation also holds with a forced combination
    auto q = render_punchline_prompt(builtin(), copilot(), Sentiment::Positive, combo);
    CHECK(token_diff(p.text, q.text)->size() == 1);

    ScoredCombination bad{{Pick{0, 60}, Pick{1, 4}}, 0.7, CombinationPolicy::Manual};
    CHECK(code_of([&] { (void)render_punchline_prompt(builtin(), copilot(), Sentiment::Negative, bad); }) ==
          ErrorCode::IndexOutOfRange);
    ScoredCombination short_combo{{Pick{0, 1}}, 0.7, CombinationPolicy::Manual};
    CHECK(code_of([&] { (void)render_punchline_prompt(builtin(), copilot(), Sentiment::Negative, short_combo); }) ==
          ErrorCode::IndexOutOfRange);
}

TEST_CASE("angle prompt") {
    Punchline p{"P", std::nullopt, Sentiment::Negative};
    auto a = render_angle_prompt(builtin(), TopicSentence{golden::kCopilotTopic, "a"}, p);
    CHECK(a.text.find("smoothly transition the audience from the topic to the punchline") != std::string::npos);
    CHECK(a.text.find("If you are using a USB port in a hotel lobby") != std::string::npos);
    CHECK(a.substitutions.at("punchline") == "P");
    auto b = render_angle_prompt(builtin(), TopicSentence{golden::kCopilotTopic, "a"}, p);
    CHECK(a == b);
    CHECK(builtin().get(StageKey::Angle).reconstructed);
    CHECK_FALSE(builtin().get(StageKey::Topic).reconstructed);
}

TEST_CASE("values containing braces never leave a placeholder opener") {
    auto p = render_handles_prompt(builtin(), TopicSentence{"A {{topic}} trap.", "a"});
    CHECK(p.text.find("{{") == std::string::npos);
}

TEST_CASE("catalog block") {
    auto block = render_catalog_block(make_catalog({"a", "b"}, {{"x", "y", "z"}, {"1", "2", "3"}}));
    CHECK(block == "Handles: a, b\nAssociations for a: x, y, z\nAssociations for b: 1, 2, 3");
    auto commas = render_catalog_block(make_catalog({"a", "b"}, {{"x, y", "z", "w"}, {"1", "2", "3"}}));
    CHECK(commas.find("Associations for a:\n- x, y\n- z\n- w") != std::string::npos);
}

TEST_CASE("template parsing") {
    auto tpl = PromptTemplate::parse("---\nstage: angle\nplaceholders: topic, punchline\n---\n{{topic}} / {{punchline}}");
    CHECK(tpl.stage_key == StageKey::Angle);
    CHECK(tpl.required_placeholders == std::set<std::string>{"topic", "punchline"});
    CHECK(tpl.template_text == "{{topic}} / {{punchline}}");
    CHECK(tpl.fingerprint.size() == 64);

    // fingerprint changes iff text changes
    auto same = PromptTemplate::parse("---\nstage: angle\nplaceholders: punchline, topic\n# note\n---\n{{topic}} / {{punchline}}");
    CHECK(same.fingerprint == tpl.fingerprint);
    auto other = PromptTemplate::parse("---\nstage: angle\nplaceholders: topic, punchline\n---\n{{topic}} - {{punchline}}");
    CHECK(other.fingerprint != tpl.fingerprint);

    CHECK(code_of([] { (void)PromptTemplate::parse("---\nstage: angle\nplaceholders: topic\n---\n{{topic}} {{punchline}}"); }) ==
          ErrorCode::MissingPlaceholder);
    CHECK(code_of([] { (void)PromptTemplate::parse("---\nstage: angle\nplaceholders: topic, punchline\n---\n{{topic}}"); }) ==
          ErrorCode::MissingPlaceholder);
    CHECK(code_of([] { (void)PromptTemplate::parse("---\nstage: angle\nplaceholders: topic\n---\n{{topic}} {{mystery}}"); }) ==
          ErrorCode::MissingPlaceholder);
    CHECK(code_of([] { (void)PromptTemplate::parse("no front matter"); }) == ErrorCode::InvalidDocument);
    CHECK(code_of([] { (void)PromptTemplate::parse("---\nstage: nowhere\nplaceholders: topic\n---\n{{topic}}"); }) ==
          ErrorCode::InvalidDocument);
}

TEST_CASE("render requires every value") {
    auto tpl = PromptTemplate::parse("---\nstage: angle\nplaceholders: topic, punchline\n---\n{{topic}} / {{punchline}}");
    CHECK(code_of([&] { (void)render(tpl, {{"topic", "t"}}); }) == ErrorCode::MissingPlaceholder);
    auto r = render(tpl, {{"topic", "t"}, {"punchline", "p"}});
    CHECK(r.text == "t / p");
    CHECK(r.template_fingerprint == tpl.fingerprint);
}

TEST_CASE("shipped template files match the built-in set") {
    auto set = TemplateSet::load_dir(source_path("templates"));
    for (auto key : {StageKey::Topic, StageKey::HandlesAssociations, StageKey::Punchline, StageKey::Angle})
        CHECK(set.get(key).fingerprint == builtin().get(key).fingerprint);
}

TEST_CASE("template directory errors") {
    TempDir dir;
    CHECK(code_of([&] { (void)TemplateSet::load_dir(dir.path()); }) == ErrorCode::ConfigInvalid);
    for (auto name : {"topic", "handles", "punchline", "angle"})
        fs::copy_file(source_path("templates") / (std::string(name) + ".prompt"), dir / (std::string(name) + ".prompt"));
    CHECK_NOTHROW((void)TemplateSet::load_dir(dir.path()));
    fs::copy_file(source_path("templates/angle.prompt"), dir / "angle2.prompt");
    CHECK(code_of([&] { (void)TemplateSet::load_dir(dir.path()); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([&] { (void)TemplateSet::load_dir(dir / "missing"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("overridden templates change the rendered prompt") {
    TempDir dir;
    for (auto name : {"topic", "handles", "punchline"})
        fs::copy_file(source_path("templates") / (std::string(name) + ".prompt"), dir / (std::string(name) + ".prompt"));
    write_text(dir / "angle.prompt", "---\nstage: angle\nplaceholders: topic, punchline\n---\nBridge {{topic}} to {{punchline}}.");
    auto set = TemplateSet::load_dir(dir.path());
    auto p = render_angle_prompt(set, TopicSentence{"T.", "a"}, Punchline{"P.", std::nullopt, Sentiment::Negative});
    CHECK(p.text == "Bridge T. to P..");
}
