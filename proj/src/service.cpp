#include "monologue/service.hpp"

#include "monologue/codec.hpp"
#include "monologue/ingestion.hpp"
#include "monologue/pipeline.hpp"
#include "monologue/report.hpp"
#include "monologue/store.hpp"

#include <httplib.h>

#include <charconv>

namespace monologue {

namespace {

// Mutation without an If-Match header.
class MissingIfMatch : public Error {
public:
    MissingIfMatch() : Error(ErrorCode::VersionConflict, "If-Match header with the session version is required") {}
};

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::VersionConflict:
    case ErrorCode::StageNotReached:
    case ErrorCode::StageOrderViolation:
    case ErrorCode::SessionComplete:
    case ErrorCode::SessionTooEarly: return 409;
    case ErrorCode::Unparseable:
    case ErrorCode::Rejected:
    case ErrorCode::InvariantViolation:
    case ErrorCode::EmptyComponent:
    case ErrorCode::InvalidManualPick:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::EmptyBody: return 422;
    case ErrorCode::UnreadableSource:
    case ErrorCode::InvalidDocument: return 400;
    default: break;
    }
    return family_of(code) == ErrorFamily::Provider ? 502 : 500;
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, const Error& e) {
    json err{{"code", to_string(e.code())}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const StageParseError*>(&e)) {
        err["stage"] = to_string(pe->stage());
        err["rawText"] = pe->raw_text();
        json diags = json::array();
        for (const auto& d : pe->diagnostics()) diags.push_back(json{{"line", d.line}, {"message", d.message}});
        err["diagnostics"] = std::move(diags);
    }
    const int status = dynamic_cast<const MissingIfMatch*>(&e) ? 428 : status_for(e.code());
    send_json(res, status, json{{"error", std::move(err)}});
}

void send_session(httplib::Response& res, int status, const PipelineSession& s) {
    res.status = status;
    res.set_header("ETag", "\"" + std::to_string(s.version) + "\"");
    res.set_content(export_session(s), "application/json; charset=utf-8");
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidDocument, "request body must be a JSON object");
    return j;
}

std::uint64_t require_if_match(const httplib::Request& req) {
    if (!req.has_header("If-Match")) throw MissingIfMatch();
    auto v = req.get_header_value("If-Match");
    std::string_view sv = v;
    if (sv.size() >= 2 && sv.front() == '"' && sv.back() == '"') sv = sv.substr(1, sv.size() - 2);
    std::uint64_t version = 0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), version);
    if (ec != std::errc() || ptr != sv.data() + sv.size())
        throw Error(ErrorCode::InvalidDocument, "If-Match must carry an integer session version");
    return version;
}

template <typename T>
T enum_from(const json& body, const char* key, T fallback, std::optional<T> (*parse)(std::string_view)) {
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_string()) throw Error(ErrorCode::InvalidDocument, std::string(key) + " must be a string");
    auto v = parse(it->get<std::string>());
    if (!v) throw Error(ErrorCode::InvalidDocument, "unknown " + std::string(key) + ": " + it->get<std::string>());
    return *v;
}

std::optional<std::vector<Pick>> picks_from(const json& body) {
    auto it = body.find("picks");
    if (it == body.end() || it->is_null()) return std::nullopt;
    try {
        return it->get<std::vector<Pick>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidDocument, std::string("malformed picks: ") + e.what());
    }
}

json summaries_json(const std::vector<SessionSummary>& list) {
    json out = json::array();
    for (const auto& s : list) {
        out.push_back(json{{"id", s.id},
                           {"stage", to_string(s.stage)},
                           {"topicExcerpt", s.topic_excerpt},
                           {"updatedAt", s.updated_at},
                           {"version", s.version}});
    }
    return out;
}

} // namespace

struct Service::Impl {
    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)),
          store(config.data_dir),
          templates(config.templates_dir ? TemplateSet::load_dir(*config.templates_dir) : TemplateSet::builtin()),
          gateway(with_fixture_default(config.provider, store)) {
        routes();
    }

    static ProviderConfig with_fixture_default(ProviderConfig p, const SessionStore& store) {
        if (p.kind == ProviderKind::Mock && !p.fixture_dir) p.fixture_dir = store.fixtures_dir();
        return p;
    }

    StageOptions options_from(const json& body) const {
        StageOptions o = config.defaults;
        o.sentiment = enum_from(body, "sentiment", o.sentiment, parse_sentiment);
        o.policy = enum_from(body, "policy", o.policy, parse_policy);
        o.style = enum_from(body, "style", o.style, parse_join_style);
        if (auto picks = picks_from(body)) {
            o.manual_picks = std::move(picks);
            o.policy = CombinationPolicy::Manual;
        }
        return o;
    }

    // Loads the session, checks If-Match, runs `mutate`, stores the result.
    template <typename Fn>
    void mutate(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        const auto expected = require_if_match(req);
        auto session = store.get(req.matches[1]);
        if (session.version != expected) {
            throw Error(ErrorCode::VersionConflict, "session " + session.id + " is at version " +
                                                        std::to_string(session.version) + ", not " +
                                                        std::to_string(expected));
        }
        auto updated = fn(session);
        send_session(res, 200, store.update(updated, expected));
    }

    template <typename Fn>
    httplib::Server::Handler guarded(Fn fn) {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send_error(res, Error(ErrorCode::StorageFailure, std::string("internal error: ") + e.what()));
            }
        };
    }

    void routes() {
        server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req);
            Article article;
            if (auto t = body.find("articleText"); t != body.end() && t->is_string()) {
                article = load_article_text(t->get<std::string>());
            } else if (auto p = body.find("articlePath"); p != body.end() && p->is_string()) {
                article = load_article_file(p->get<std::string>());
            } else {
                throw Error(ErrorCode::InvalidDocument, "body needs articleText or articlePath");
            }
            if (auto w = length_warning(article)) res.set_header("X-Length-Warning", *w);
            send_session(res, 201, store.create(article));
        }));

        server.Get("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::optional<Stage> filter;
            if (req.has_param("stage")) {
                filter = parse_stage(req.get_param_value("stage"));
                if (!filter) throw Error(ErrorCode::InvalidDocument, "unknown stage filter");
            }
            send_json(res, 200, summaries_json(store.list(filter)));
        }));

        server.Get(R"(/sessions/([A-Za-z0-9_-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_session(res, 200, store.get(req.matches[1]));
        }));

        server.Get(R"(/sessions/([A-Za-z0-9_-]+)/report)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       res.set_content(render_report(store.get(req.matches[1])), "text/plain; charset=utf-8");
                   }));

        server.Post(R"(/sessions/([A-Za-z0-9_-]+)/advance)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        auto options = options_from(body);
                        mutate(req, res, [&](const PipelineSession& s) {
                            if (auto it = body.find("stage"); it != body.end() && it->is_string()) {
                                auto want = parse_stage(it->get<std::string>());
                                auto next = next_stage(s.stage);
                                if (!want) throw Error(ErrorCode::InvalidDocument, "unknown stage");
                                if (!next || *want != *next)
                                    throw Error(ErrorCode::StageOrderViolation,
                                                "next stage is " + std::string(next ? to_string(*next) : "none") +
                                                    ", not " + std::string(to_string(*want)));
                            }
                            Workflow wf(templates, gateway);
                            return wf.run_next(s, options);
                        });
                    }));

        server.Get(R"(/sessions/([A-Za-z0-9_-]+)/combinations)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto session = store.get(req.matches[1]);
                       auto policy = CombinationPolicy::MaxDistance;
                       if (req.has_param("policy")) {
                           auto p = parse_policy(req.get_param_value("policy"));
                           if (!p || *p == CombinationPolicy::Manual)
                               throw Error(ErrorCode::InvalidDocument, "policy must be maxDistance or minDistance");
                           policy = *p;
                       }
                       Workflow wf(templates, gateway);
                       auto ranked = wf.rank(session, policy, config.defaults.aggregate);
                       json list = json::array();
                       for (std::size_t i = 0; i < ranked.size(); ++i) {
                           json names = json::array();
                           for (const auto& p : ranked[i].picks)
                               names.push_back(session.catalog->associations[p.handle_ordinal][p.association_index]);
                           list.push_back(json{{"rank", i + 1},
                                               {"picks", ranked[i].picks},
                                               {"associations", std::move(names)},
                                               {"distance", ranked[i].distance}});
                       }
                       send_json(res, 200, json{{"policy", to_string(policy)}, {"combinations", std::move(list)}});
                   }));

        server.Post(R"(/sessions/([A-Za-z0-9_-]+)/combination)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        auto options = options_from(body);
                        if (!body.contains("picks") && !body.contains("policy"))
                            throw Error(ErrorCode::InvalidDocument, "body needs picks or policy");
                        mutate(req, res, [&](const PipelineSession& s) {
                            Workflow wf(templates, gateway);
                            return wf.choose_combination(s, options.policy, options.manual_picks, options.aggregate);
                        });
                    }));

        server.Patch(R"(/sessions/([A-Za-z0-9_-]+)/stages/([A-Za-z-]+))",
                     guarded([this](const httplib::Request& req, httplib::Response& res) {
                         auto stage = parse_stage(req.matches[2].str());
                         if (!stage) throw Error(ErrorCode::NotFound, "unknown stage " + req.matches[2].str());
                         auto body = parse_body(req);
                         auto it = body.find("replacement");
                         if (it == body.end() || !it->is_object())
                             throw Error(ErrorCode::InvalidDocument, "body needs a replacement object");
                         const json replacement = *it;
                         mutate(req, res, [&](const PipelineSession& s) { return apply_edit(s, *stage, replacement); });
                     }));
    }

    PipelineSession apply_edit(const PipelineSession& s, Stage stage, const json& replacement) {
        if (stage_index(stage) > stage_index(s.stage))
            throw Error(ErrorCode::StageNotReached, "cannot edit " + std::string(to_string(stage)) +
                                                        "; session is at " + std::string(to_string(s.stage)));
        Workflow wf(templates, gateway);
        switch (stage) {
        case Stage::ArticleLoaded: {
            if (auto t = replacement.find("body"); t != replacement.end() && t->is_string()) {
                auto article = load_article_text(t->get<std::string>(), replacement.value("sourceUri", "inline"));
                if (auto title = replacement.find("title"); title != replacement.end() && title->is_string())
                    article.title = title->get<std::string>();
                return edit_intermediate(s, stage, article);
            }
            break;
        }
        case Stage::TopicDrafted: {
            auto topic = std::get<TopicSentence>(stage_output_from_json(stage, replacement));
            if (topic.source_article_id.empty()) topic.source_article_id = s.article.id;
            return edit_intermediate(s, stage, std::move(topic));
        }
        case Stage::CatalogBuilt: {
            auto catalog = std::get<AssociationCatalog>(stage_output_from_json(stage, with_ordinals(replacement)));
            return edit_intermediate(s, stage, mark_non_literal_handles(std::move(catalog), *s.topic));
        }
        case Stage::CombinationSelected: {
            auto combo = std::get<ScoredCombination>(stage_output_from_json(stage, replacement));
            return wf.choose_combination(s, CombinationPolicy::Manual, combo.picks, config.defaults.aggregate);
        }
        case Stage::PunchlineWritten: {
            auto p = std::get<Punchline>(stage_output_from_json(stage, replacement));
            if (p.combination) {
                auto matrix = wf.matrix_for(s);
                p.combination = select_combination({}, CombinationPolicy::Manual, p.combination->picks, *s.catalog,
                                                   matrix, config.defaults.aggregate);
            }
            return edit_intermediate(s, stage, std::move(p));
        }
        case Stage::Assembled: {
            if (!replacement.contains("assembledText")) {
                auto style = enum_from(replacement, "style", JoinStyle::SpaceJoin, parse_join_style);
                return edit_intermediate(s, stage, assemble(*s.topic, *s.angle, *s.punchline, style));
            }
            break;
        }
        default: break;
        }
        return edit_intermediate(s, stage, stage_output_from_json(stage, replacement));
    }

    // Humans editing a catalog may send handles as plain strings.
    static json with_ordinals(json catalog) {
        if (auto it = catalog.find("handles"); it != catalog.end() && it->is_array()) {
            for (std::size_t i = 0; i < it->size(); ++i) {
                auto& h = (*it)[i];
                if (h.is_string()) h = json{{"text", h.get<std::string>()}};
                if (h.is_object()) h["ordinal"] = i;
            }
        }
        return catalog;
    }

    ServiceConfig config;
    SessionStore store;
    TemplateSet templates;
    Gateway gateway;
    httplib::Server server;
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

int Service::bind_any_port(const std::string& host) {
    return impl_->server.bind_to_any_port(host);
}

bool Service::bind(const std::string& host, int port) {
    return impl_->server.bind_to_port(host, port);
}

void Service::listen_after_bind() {
    impl_->server.listen_after_bind();
}

void Service::stop() {
    impl_->server.stop();
}

void Service::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

std::pair<std::string, int> parse_listen_address(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "listen address must be host:port");
    std::string host = addr.substr(0, colon);
    if (host.empty()) host = "0.0.0.0";
    int port = 0;
    auto port_text = std::string_view(addr).substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535)
        throw Error(ErrorCode::ConfigInvalid, "bad port in listen address " + addr);
    return {host, port};
}

} // namespace monologue
