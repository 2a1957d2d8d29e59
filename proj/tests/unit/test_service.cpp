#include "test_support.hpp"

#include "monologue/error.hpp"
#include "monologue/service.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

using namespace testing;
using nlohmann::json;

namespace {

// A service on an ephemeral loopback port, stopped on destruction.
class Running {
public:
    Running(const fs::path& data_dir, const fs::path& fixtures) {
        ServiceConfig cfg;
        cfg.data_dir = data_dir;
        cfg.provider.kind = ProviderKind::Mock;
        cfg.provider.fixture_dir = fixtures;
        cfg.defaults.temperature = default_temperature(ProviderKind::Mock);
        service_ = std::make_unique<Service>(cfg);
        port_ = service_->bind_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { service_->listen_after_bind(); });
        service_->wait_until_ready();
    }
    ~Running() {
        service_->stop();
        thread_.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(10, 0);
        return c;
    }

private:
    std::unique_ptr<Service> service_;
    int port_ = -1;
    std::thread thread_;
};

httplib::Headers if_match(std::uint64_t version) { return {{"If-Match", "\"" + std::to_string(version) + "\""}}; }

json body_of(const httplib::Result& r) { return json::parse(r->body); }

json create(httplib::Client& c, const json& body) {
    auto r = c.Post("/sessions", body.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 201);
    return body_of(r);
}

json advance(httplib::Client& c, const std::string& id, std::uint64_t version, const json& body = json::object()) {
    auto r = c.Post("/sessions/" + id + "/advance", if_match(version), body.dump(), "application/json");
    REQUIRE(r);
    INFO(r->body);
    REQUIRE(r->status == 200);
    CHECK(r->get_header_value("ETag") == "\"" + std::to_string(version + 1) + "\"");
    return body_of(r);
}

} // namespace

TEST_CASE("create returns the document with its length band") {
    TempDir data;
    Running svc(data.path(), source_path("data/fixtures"));
    auto c = svc.client();
    auto r = c.Post("/sessions", json{{"articleText", article_of(650)}}.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 201);
    CHECK(r->get_header_value("ETag") == "\"1\"");
    CHECK_FALSE(r->has_header("X-Length-Warning"));
    auto doc = body_of(r);
    CHECK(doc.at("stage") == "articleLoaded");
    CHECK(doc.at("version") == 1);
    CHECK(doc.at("article").at("lengthClass") == "medium");
    CHECK(doc.at("article").at("wordCount") == 650);

    auto shorter = c.Post("/sessions", json{{"articleText", article_of(100)}}.dump(), "application/json");
    CHECK(shorter->has_header("X-Length-Warning"));

    auto empty = c.Post("/sessions", json{{"articleText", "  "}}.dump(), "application/json");
    CHECK(empty->status == 422);
    CHECK(body_of(empty).at("error").at("code") == "EmptyBody");
    auto neither = c.Post("/sessions", "{}", "application/json");
    CHECK(neither->status == 400);
    auto garbage = c.Post("/sessions", "not json", "application/json");
    CHECK(garbage->status == 400);
}

TEST_CASE("full sequence over HTTP matches the golden report") {
    TempDir data;
    Running svc(data.path(), source_path("data/fixtures"));
    auto c = svc.client();
    auto doc = create(c, json{{"articlePath", source_path("data/articles/youtube_1080p_premium.txt").string()}});
    const std::string id = doc.at("id");
    const char* expected[] = {"topicDrafted", "catalogBuilt", "combinationSelected", "punchlineWritten",
                              "angleWritten", "assembled"};
    std::uint64_t version = 1;
    for (auto stage : expected) {
        doc = advance(c, id, version++, json{{"stage", stage}, {"style", "dash"}});
        CHECK(doc.at("stage") == stage);
    }
    CHECK(doc.at("joke").at("assembledText") == golden::kYoutubeSummary);
    auto report = c.Get("/sessions/" + id + "/report");
    REQUIRE(report);
    CHECK(report->status == 200);
    CHECK(report->body == read_text(source_path("tests/golden/youtube_dash_report.txt")));

    auto done = c.Post("/sessions/" + id + "/advance", if_match(7), "{}", "application/json");
    CHECK(done->status == 409);
    CHECK(body_of(done).at("error").at("code") == "SessionComplete");

    auto list = c.Get("/sessions?stage=assembled");
    REQUIRE(list);
    auto summaries = body_of(list);
    REQUIRE(summaries.size() == 1);
    CHECK(summaries[0].at("id") == id);
    CHECK(summaries[0].at("version") == 7);
    CHECK(body_of(c.Get("/sessions?stage=topicDrafted")).empty());
}

TEST_CASE("versioning headers") {
    TempDir data;
    Running svc(data.path(), source_path("data/fixtures"));
    auto c = svc.client();
    auto doc = create(c, json{{"articlePath", source_path("data/articles/copilot_365.txt").string()}});
    const std::string id = doc.at("id");

    auto missing = c.Post("/sessions/" + id + "/advance", "{}", "application/json");
    CHECK(missing->status == 428);
    advance(c, id, 1);
    auto stale = c.Post("/sessions/" + id + "/advance", if_match(1), "{}", "application/json");
    CHECK(stale->status == 409);
    CHECK(body_of(stale).at("error").at("code") == "VersionConflict");
    auto plain = c.Post("/sessions/" + id + "/advance", {{"If-Match", "2"}}, "{}", "application/json");
    CHECK(plain->status == 200);
    CHECK(c.Get("/sessions/" + id)->get_header_value("ETag") == "\"3\"");

    auto skip = c.Post("/sessions/" + id + "/advance", if_match(3), json{{"stage", "assembled"}}.dump(),
                       "application/json");
    CHECK(skip->status == 409);
    CHECK(body_of(skip).at("error").at("code") == "StageOrderViolation");

    auto unknown = c.Get("/sessions/s-0000000000000000");
    CHECK(unknown->status == 404);
    CHECK(body_of(unknown).at("error").at("code") == "NotFound");
    CHECK(c.Get("/sessions/s-0000000000000000/report")->status == 404);
}

TEST_CASE("editing") {
    TempDir data;
    Running svc(data.path(), source_path("data/fixtures"));
    auto c = svc.client();
    auto doc = create(c, json{{"articlePath", source_path("data/articles/copilot_365.txt").string()}});
    const std::string id = doc.at("id");

    auto early = c.Patch("/sessions/" + id + "/stages/punchlineWritten", if_match(1),
                         json{{"replacement", {{"text", "x"}}}}.dump(), "application/json");
    CHECK(early->status == 409);
    CHECK(body_of(early).at("error").at("code") == "StageNotReached");

    for (std::uint64_t v = 1; v <= 6; ++v) doc = advance(c, id, v);
    CHECK(doc.at("joke").at("assembledText") == golden::kCopilotFinalNegative);

    // topic edit at the end clears everything downstream
    auto edit = c.Patch("/sessions/" + id + "/stages/topicDrafted", if_match(7),
                        json{{"replacement", {{"text", "Clippy returns from retirement."}}}}.dump(),
                        "application/json");
    REQUIRE(edit);
    INFO(edit->body);
    CHECK(edit->status == 200);
    auto got = body_of(c.Get("/sessions/" + id));
    CHECK(got.at("stage") == "topicDrafted");
    CHECK(got.at("version") == 8);
    CHECK_FALSE(got.contains("catalog"));
    CHECK_FALSE(got.contains("joke"));
    CHECK(got.at("auditLog").back().at("actor") == "human");

    auto bad = c.Patch("/sessions/" + id + "/stages/topicDrafted", if_match(8),
                       json{{"replacement", {{"text", ""}}}}.dump(), "application/json");
    CHECK(bad->status == 422);
    CHECK(body_of(c.Get("/sessions/" + id)).at("version") == 8);

    auto catalog = c.Patch("/sessions/" + id + "/stages/catalogBuilt", if_match(8),
                           json{{"replacement", {{"handles", {"Clippy", "retirement"}},
                                                 {"associations", {{"paperclip", "pop-up", "Office"},
                                                                   {"golf", "pension", "Florida"}}}}}}
                               .dump(),
                           "application/json");
    REQUIRE(catalog);
    INFO(catalog->body);
    CHECK(catalog->status == 409); // catalog is beyond topicDrafted
}

TEST_CASE("combinations and manual picks") {
    TempDir data;
    Running svc(data.path(), source_path("data/fixtures"));
    auto c = svc.client();
    auto doc = create(c, json{{"articlePath", source_path("data/articles/youtube_1080p_premium.txt").string()}});
    const std::string id = doc.at("id");
    advance(c, id, 1);
    advance(c, id, 2);

    auto ranked = body_of(c.Get("/sessions/" + id + "/combinations?policy=minDistance"));
    CHECK(ranked.at("policy") == "minDistance");
    const auto& list = ranked.at("combinations");
    REQUIRE(list.size() == 42);
    CHECK(list[0].at("rank") == 1);
    for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i - 1].at("distance") <= list[i].at("distance"));
    CHECK(list[0].at("associations").size() == 2);
    CHECK(c.Get("/sessions/" + id + "/combinations?policy=manual")->status == 400);

    json picks = json::array({json{{"handleOrdinal", 0}, {"associationIndex", 4}},
                              json{{"handleOrdinal", 1}, {"associationIndex", 4}}});
    auto chosen = c.Post("/sessions/" + id + "/combination", if_match(3), json{{"picks", picks}}.dump(),
                         "application/json");
    REQUIRE(chosen);
    CHECK(chosen->status == 200);
    auto combo = body_of(chosen).at("combination");
    CHECK(combo.at("policy") == "manual");
    CHECK(combo.at("picks") == picks);

    json bad = json::array({json{{"handleOrdinal", 0}, {"associationIndex", 40}},
                            json{{"handleOrdinal", 1}, {"associationIndex", 4}}});
    auto out_of_range = c.Post("/sessions/" + id + "/combination", if_match(4), json{{"picks", bad}}.dump(),
                               "application/json");
    CHECK(out_of_range->status == 422);
    CHECK(body_of(out_of_range).at("error").at("code") == "InvalidManualPick");
}

TEST_CASE("unparseable replies come back with the raw text") {
    TempDir data;
    TempDir fixtures;
    for (const auto& e : fs::directory_iterator(source_path("data/fixtures")))
        fs::copy_file(e.path(), fixtures / e.path().filename().string());
    auto article = load_article_file(source_path("data/articles/copilot_365.txt"));
    auto prompt = render_topic_prompt(TemplateSet::builtin(), article);
    write_text(Gateway::fixture_path(fixtures.path(), CompletionRequest{prompt.text, 512, 0.0}),
               "Sorry, this article is inappropriate for jokes.");

    Running svc(data.path(), fixtures.path());
    auto c = svc.client();
    auto doc = create(c, json{{"articlePath", source_path("data/articles/copilot_365.txt").string()}});
    auto r = c.Post("/sessions/" + doc.at("id").get<std::string>() + "/advance", if_match(1), "{}", "application/json");
    REQUIRE(r);
    CHECK(r->status == 422);
    auto err = body_of(r).at("error");
    CHECK(err.at("code") == "Rejected");
    CHECK(err.at("stage") == "topicDrafted");
    CHECK(err.at("rawText") == "Sorry, this article is inappropriate for jokes.");
}

TEST_CASE("state survives a restart") {
    TempDir data;
    std::string id;
    std::string before;
    {
        Running svc(data.path(), source_path("data/fixtures"));
        auto c = svc.client();
        auto doc = create(c, json{{"articlePath", source_path("data/articles/copilot_365.txt").string()}});
        id = doc.at("id");
        advance(c, id, 1);
        before = c.Get("/sessions/" + id)->body;
    }
    Running again(data.path(), source_path("data/fixtures"));
    auto c = again.client();
    auto r = c.Get("/sessions/" + id);
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->body == before);
    advance(c, id, 2);
}

TEST_CASE("listen address parsing") {
    CHECK(parse_listen_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
    CHECK(parse_listen_address(":9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
    CHECK_THROWS_AS(parse_listen_address("nohost"), Error);
    CHECK_THROWS_AS(parse_listen_address("h:notaport"), Error);
    CHECK_THROWS_AS(parse_listen_address("h:70000"), Error);
}
