#include "properties.hpp"

#include <doctest.h>

using namespace testing;

namespace {

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

TEST_CASE("advance moves to the next stage and bumps the version") {
    auto s = session_at(Stage::ArticleLoaded);
    CHECK(s.version == 1);
    auto t = advance(s, TopicSentence{golden::kCopilotTopic, s.article.id}, Actor::Provider);
    CHECK(t.stage == Stage::TopicDrafted);
    CHECK(t.version == 2);
    CHECK(t.audit_log.size() == 1);
    CHECK(t.audit_log[0].actor == Actor::Provider);
    CHECK(t.audit_log[0].before == "null");
    // input snapshot untouched
    CHECK(s.stage == Stage::ArticleLoaded);
    CHECK_FALSE(s.topic.has_value());
}

TEST_CASE("skipping stages is a StageOrderViolation") {
    auto s = session_at(Stage::ArticleLoaded);
    CHECK(code_of([&] { (void)advance(s, Punchline{"p.", std::nullopt, Sentiment::Negative}, Actor::Provider); }) ==
          ErrorCode::StageOrderViolation);
    auto done = session_at(Stage::Assembled);
    CHECK(code_of([&] { (void)advance(done, Angle{"x"}, Actor::Provider); }) == ErrorCode::SessionComplete);
}

TEST_CASE("assembled session has all seven fields") {
    auto s = session_at(Stage::Assembled);
    CHECK(s.stage == Stage::Assembled);
    for (int i = 0; i < kStageCount; ++i) CHECK(has_stage_value(s, stage_at(i)));
    CHECK(s.version == 7);
    CHECK(s.audit_log.size() == 6);
    CHECK(s.joke->assembled_text == golden::kCopilotFinalNegative);
}

TEST_CASE("punchline without a combination inherits the selection") {
    auto s = session_at(Stage::PunchlineWritten);
    REQUIRE(s.punchline->combination.has_value());
    CHECK(*s.punchline->combination == *s.combination);
}

TEST_CASE("edit catalog on an assembled session clears downstream") {
    auto s = session_at(Stage::Assembled);
    auto c = make_catalog(golden::kCopilotHandles, {{"a", "b", "c"}, {"d", "e", "f"}});
    auto e = edit_intermediate(s, Stage::CatalogBuilt, c);
    CHECK(e.stage == Stage::CatalogBuilt);
    CHECK(e.catalog == c);
    CHECK(e.topic == s.topic);
    CHECK_FALSE(e.combination.has_value());
    CHECK_FALSE(e.punchline.has_value());
    CHECK_FALSE(e.angle.has_value());
    CHECK_FALSE(e.joke.has_value());
    CHECK(e.audit_log.back().actor == Actor::Human);
    CHECK(e.audit_log.back().stage == Stage::CatalogBuilt);
    CHECK(e.version == s.version + 1);
}

TEST_CASE("edit topic with two sentences is an InvariantViolation") {
    auto s = session_at(Stage::CatalogBuilt);
    CHECK(code_of([&] {
              (void)edit_intermediate(s, Stage::TopicDrafted, TopicSentence{"One thing. Another thing.", s.article.id});
          }) == ErrorCode::InvariantViolation);
}

TEST_CASE("edit topic then advance with a new catalog: version +2, two audit entries") {
    auto s = session_at(Stage::CatalogBuilt);
    const auto v0 = s.version;
    const auto a0 = s.audit_log.size();
    auto e = edit_intermediate(s, Stage::TopicDrafted, TopicSentence{"Acme ships a Widget.", s.article.id});
    CHECK(e.stage == Stage::TopicDrafted);
    CHECK_FALSE(e.catalog.has_value());
    auto c = make_catalog({"Acme", "Widget"}, {{"a", "b", "c"}, {"d", "e", "f"}});
    auto f = advance(e, c, Actor::Provider);
    CHECK(f.version == v0 + 2);
    CHECK(f.audit_log.size() == a0 + 2);
}

TEST_CASE("edit errors") {
    auto s = session_at(Stage::TopicDrafted);
    CHECK(code_of([&] { (void)edit_intermediate(s, Stage::AngleWritten, Angle{"x"}); }) == ErrorCode::StageNotReached);
    CHECK(code_of([&] { (void)edit_intermediate(s, Stage::TopicDrafted, Angle{"x"}); }) ==
          ErrorCode::InvariantViolation);
}

TEST_CASE("assembly: Copilot negative under SpaceJoin") {
    // The stored punchline is the post-normalization continuation.
    auto joke = assemble(TopicSentence{golden::kCopilotTopic, "a"}, Angle{golden::kCopilotAngleNegative},
                         Punchline{"now it can automatically annoy you with its help.", std::nullopt,
                                   Sentiment::Negative});
    CHECK(joke.assembled_text == golden::kCopilotFinalNegative);
    CHECK(joke.style == JoinStyle::SpaceJoin);
}

TEST_CASE("assembly: Copilot positive under SpaceJoin") {
    auto joke = assemble(TopicSentence{golden::kCopilotTopic, "a"}, Angle{golden::kCopilotAnglePositive},
                         Punchline{golden::kCopilotPunchlinePositive, std::nullopt, Sentiment::Positive});
    CHECK(joke.assembled_text == golden::kCopilotFinalPositive);
}

TEST_CASE("assembly: 1080p Premium under DashJoin") {
    auto joke = assemble(TopicSentence{golden::kYoutubeTopic, "a"}, Angle{golden::kYoutubeAngle},
                         Punchline{golden::kYoutubePunchline, std::nullopt, Sentiment::Negative}, JoinStyle::DashJoin);
    CHECK(joke.assembled_text == golden::kYoutubeSummary);
}

TEST_CASE("assembly: moon landing angle fragment") {
    auto joke = assemble(TopicSentence{golden::kMoonTopic, "a"}, Angle{"In a cosmic twist,"},
                         Punchline{"Neil Armstrong's famous quote is updated.", std::nullopt, Sentiment::Negative});
    CHECK(joke.assembled_text == golden::kMoonTopic + " In a cosmic twist, Neil Armstrong's famous quote is updated.");
}

TEST_CASE("assembly errors and idempotence") {
    TopicSentence t{"T.", "a"};
    Punchline p{"p.", std::nullopt, Sentiment::Negative};
    CHECK(code_of([&] { (void)assemble(t, Angle{""}, p); }) == ErrorCode::EmptyComponent);
    CHECK(code_of([&] { (void)assemble(t, Angle{"a"}, Punchline{" ", std::nullopt, Sentiment::Negative}); }) ==
          ErrorCode::EmptyComponent);
    CHECK(code_of([&] { (void)assemble(TopicSentence{}, Angle{"a"}, p); }) == ErrorCode::EmptyComponent);
    for (auto style : {JoinStyle::SpaceJoin, JoinStyle::DashJoin})
        CHECK(assemble(t, Angle{"An angle."}, p, style) == assemble(t, Angle{"An angle."}, p, style));
}

TEST_CASE("DashJoin details") {
    TopicSentence t{"Topic here.", "a"};
    auto j = assemble(t, Angle{"No period"}, Punchline{"Done.", std::nullopt, Sentiment::Negative}, JoinStyle::DashJoin);
    CHECK(j.assembled_text == "Topic here. No period \xE2\x80\x93 done.");
    // non-letter first character stays as is
    auto k = assemble(t, Angle{"Angle."}, Punchline{"\"Quote\" ends.", std::nullopt, Sentiment::Negative},
                      JoinStyle::DashJoin);
    CHECK(k.assembled_text == "Topic here. Angle \xE2\x80\x93 \"Quote\" ends.");
}

TEST_CASE("topic invariant") {
    CHECK(is_single_sentence(golden::kCopilotTopic));
    CHECK(is_single_sentence(golden::kYoutubeTopic));
    CHECK(is_single_sentence(golden::kMoonTopic));
    CHECK(is_single_sentence("No terminal mark"));
    CHECK_FALSE(is_single_sentence("One. Two."));
    CHECK_FALSE(is_single_sentence("Really?!"));
    CHECK_FALSE(is_single_sentence("   "));
}

TEST_CASE("catalog invariants") {
    auto ok = make_catalog(golden::kMoonHandles, golden::kMoonAssociations);
    CHECK_NOTHROW(validate(ok));
    CHECK_NOTHROW(validate(ok, TopicSentence{golden::kMoonTopic, "a"}));
    CHECK_THROWS(validate(make_catalog({"a"}, {{"x", "y", "z"}})));
    CHECK_THROWS(validate(make_catalog({"a", "b", "c", "d"}, {{"1", "2", "3"}, {"1", "2", "3"}, {"1", "2", "3"}, {"1", "2", "3"}})));
    CHECK_THROWS(validate(make_catalog({"a", "b"}, {{"x", "y"}, {"1", "2", "3"}})));
    CHECK_THROWS(validate(make_catalog({"a", "b"}, {{"x", "X", "y"}, {"1", "2", "3"}})));
    // a handle missing from the topic must be flagged
    auto c = make_catalog({"Clippy", "paperclip"}, {{"x", "y", "z"}, {"1", "2", "3"}});
    TopicSentence t{"Clippy returns.", "a"};
    CHECK_THROWS(validate(c, t));
    c.handles[1].non_literal = true;
    CHECK_NOTHROW(validate(c, t));
}

TEST_CASE("property: random advance/edit sequences keep the state machine invariants") {
    auto r = pipeline_random_sequences(20261015, 500);
    INFO(r.message);
    CHECK(r.ok);
    CHECK(r.cases == 500);
}
