// monologue: command line front end.

#include "monologue/codec.hpp"
#include "monologue/ingestion.hpp"
#include "monologue/pipeline.hpp"
#include "monologue/report.hpp"
#include "monologue/service.hpp"
#include "monologue/store.hpp"
#include "monologue/text.hpp"
#include "monologue/workflow.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace monologue;
namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code) {
    switch (family_of(code)) {
    case ErrorFamily::Input: return 2;
    case ErrorFamily::Provider: return 3;
    case ErrorFamily::Parse: return 4;
    default: return 1;
    }
}

struct ProviderFlags {
    std::string provider = "mock";
    std::string data_dir = "data";
    std::string fixtures;
    std::string templates;
    std::string endpoint;
    std::string model;
    std::string api_style = "chat";
    int timeout_ms = 30000;
    int max_retries = 3;
};

void add_provider_flags(CLI::App* cmd, ProviderFlags& f) {
    cmd->add_option("--provider", f.provider, "live or mock")->check(CLI::IsMember({"live", "mock"}));
    cmd->add_option("--data-dir", f.data_dir, "session and fixture root")->envname("MONOLOGUE_DATA_DIR");
    cmd->add_option("--fixtures", f.fixtures, "mock fixture directory (default <data-dir>/fixtures)");
    cmd->add_option("--templates", f.templates, "directory of *.prompt files overriding the built-in templates");
    cmd->add_option("--endpoint", f.endpoint, "live completion endpoint")->envname("PROVIDER_ENDPOINT");
    cmd->add_option("--model", f.model, "live model name")->envname("PROVIDER_MODEL");
    cmd->add_option("--api-style", f.api_style, "chat or completion")->check(CLI::IsMember({"chat", "completion"}));
    cmd->add_option("--timeout-ms", f.timeout_ms, "live request timeout");
    cmd->add_option("--max-retries", f.max_retries, "live retries on transient failure");
}

ProviderConfig provider_config(const ProviderFlags& f) {
    ProviderConfig p;
    p.kind = f.provider == "live" ? ProviderKind::Live : ProviderKind::Mock;
    p.endpoint_uri = f.endpoint;
    if (!f.model.empty()) p.model = f.model;
    p.api_style = f.api_style == "completion" ? ApiStyle::Completion : ApiStyle::Chat;
    p.timeout = std::chrono::milliseconds(f.timeout_ms);
    p.max_retries = f.max_retries;
    if (p.kind == ProviderKind::Mock)
        p.fixture_dir = f.fixtures.empty() ? fs::path(f.data_dir) / "fixtures" : fs::path(f.fixtures);
    p.validate();
    return p;
}

TemplateSet templates_for(const ProviderFlags& f) {
    return f.templates.empty() ? TemplateSet::builtin() : TemplateSet::load_dir(f.templates);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Article load_checked(const std::string& path) {
    auto article = load_article_file(path);
    if (auto w = length_warning(article)) std::cerr << "warning: " << *w << "\n";
    return article;
}

// Appends every rendered prompt to a file, in order.
class PromptDump {
public:
    explicit PromptDump(const std::string& path) {
        if (path.empty()) return;
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw Error(ErrorCode::UnreadableSource, "cannot write " + path);
    }
    void operator()(const RenderedPrompt& p) {
        if (!out_.is_open()) return;
        out_ << "=== " << to_string(p.stage_key) << " " << p.template_fingerprint << " ===\n" << p.text << "\n";
        out_.flush();
    }

private:
    std::ofstream out_;
};

StageOptions stage_options(const std::string& sentiment, const std::string& policy, const std::string& style,
                           ProviderKind kind) {
    StageOptions o;
    o.sentiment = *parse_sentiment(sentiment);
    o.policy = *parse_policy(policy);
    o.style = *parse_join_style(style);
    o.temperature = default_temperature(kind);
    return o;
}

// Runs every remaining stage, persisting after each one.
PipelineSession drive(SessionStore& store, Workflow& wf, PipelineSession session, const StageOptions& options) {
    while (session.stage != Stage::Assembled) {
        auto next = wf.run_next(session, options);
        session = store.update(next, session.version);
    }
    return session;
}

void print_parse_failure(const StageParseError& e) {
    std::cerr << "stage: " << to_string(e.stage()) << "\n";
    for (const auto& d : e.diagnostics()) std::cerr << "diagnostic: line " << d.line << ": " << d.message << "\n";
    std::cerr << "raw reply:\n" << e.raw_text() << "\n";
}

std::string format_distance(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", d);
    return buf;
}

Service* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monologue joke pipeline"};
    app.require_subcommand(1);

    // generate
    ProviderFlags gen_flags;
    std::string gen_article, gen_sentiment = "negative", gen_policy = "max-distance", gen_style = "space", gen_dump;
    auto* generate = app.add_subcommand("generate", "run every stage on an article and print the report");
    generate->add_option("--article", gen_article, "article text file")->required();
    generate->add_option("--sentiment", gen_sentiment)->check(CLI::IsMember({"negative", "positive"}));
    generate->add_option("--policy", gen_policy)->check(CLI::IsMember({"max-distance", "min-distance"}));
    generate->add_option("--style", gen_style)->check(CLI::IsMember({"space", "dash"}));
    generate->add_option("--dump-prompts", gen_dump, "write every rendered prompt to this file");
    add_provider_flags(generate, gen_flags);

    // serve
    ProviderFlags serve_flags;
    std::string listen = "127.0.0.1:8080";
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--listen", listen, "host:port");
    add_provider_flags(serve, serve_flags);

    // sessions
    std::string sessions_dir = "data", session_id, stage_filter;
    auto* sessions = app.add_subcommand("sessions", "inspect stored sessions");
    sessions->require_subcommand(1);
    sessions->add_option("--data-dir", sessions_dir)->envname("MONOLOGUE_DATA_DIR");
    auto* s_list = sessions->add_subcommand("list", "one line per session, newest first");
    s_list->add_option("--stage", stage_filter, "only sessions at this stage");
    auto* s_show = sessions->add_subcommand("show", "print the session document");
    s_show->add_option("id", session_id)->required();
    auto* s_report = sessions->add_subcommand("report", "print the session report");
    s_report->add_option("id", session_id)->required();

    // fixtures
    ProviderFlags fx_flags;
    std::string fx_article, fx_out, fx_replies, fx_sentiment = "negative", fx_policy = "max-distance";
    auto* fixtures = app.add_subcommand("fixtures", "record or seed mock fixtures");
    fixtures->require_subcommand(1);
    auto* fx_record = fixtures->add_subcommand("record", "drive the live provider once and store its replies");
    fx_record->add_option("--article", fx_article)->required();
    fx_record->add_option("--out", fx_out, "fixture directory (default <data-dir>/fixtures)");
    fx_record->add_option("--sentiment", fx_sentiment)->check(CLI::IsMember({"negative", "positive"}));
    fx_record->add_option("--policy", fx_policy)->check(CLI::IsMember({"max-distance", "min-distance"}));
    add_provider_flags(fx_record, fx_flags);
    auto* fx_seed = fixtures->add_subcommand("seed", "store hand-written replies as fixtures for an article");
    fx_seed->add_option("--article", fx_article)->required();
    fx_seed->add_option("--replies", fx_replies, "JSON object: topic, handles, punchline, angle")->required();
    fx_seed->add_option("--out", fx_out, "fixture directory (default <data-dir>/fixtures)");
    fx_seed->add_option("--sentiment", fx_sentiment)->check(CLI::IsMember({"negative", "positive"}));
    fx_seed->add_option("--policy", fx_policy)->check(CLI::IsMember({"max-distance", "min-distance"}));
    fx_seed->add_option("--data-dir", fx_flags.data_dir);
    fx_seed->add_option("--templates", fx_flags.templates);

    // distances
    ProviderFlags dist_flags;
    std::string dist_policy = "max-distance";
    bool dist_csv = false;
    auto* distances = app.add_subcommand("distances", "print the ranked combination table for a session");
    distances->add_option("id", session_id)->required();
    distances->add_option("--policy", dist_policy)->check(CLI::IsMember({"max-distance", "min-distance"}));
    distances->add_flag("--matrix", dist_csv, "print the pairwise distance matrix as CSV instead");
    add_provider_flags(distances, dist_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*generate) {
            auto provider = provider_config(gen_flags);
            auto article = load_checked(gen_article);
            auto templates = templates_for(gen_flags);
            Gateway gateway(provider);
            PromptDump dump(gen_dump);
            Workflow wf(templates, gateway, [&](const RenderedPrompt& p) { dump(p); });
            SessionStore store(gen_flags.data_dir);
            auto session = store.create(article);
            std::cerr << "session: " << session.id << "\n";
            auto options = stage_options(gen_sentiment, gen_policy, gen_style, provider.kind);
            session = drive(store, wf, session, options);
            std::cout << render_report(session);
            return 0;
        }

        if (*serve) {
            auto [host, port] = parse_listen_address(listen);
            ServiceConfig cfg;
            cfg.data_dir = serve_flags.data_dir;
            cfg.provider = provider_config(serve_flags);
            if (!serve_flags.templates.empty()) cfg.templates_dir = serve_flags.templates;
            cfg.defaults.temperature = default_temperature(cfg.provider.kind);
            Service service(cfg);
            if (port == 0) {
                port = service.bind_any_port(host);
                if (port < 0) throw Error(ErrorCode::ConfigInvalid, "cannot bind " + host);
            } else if (!service.bind(host, port)) {
                throw Error(ErrorCode::ConfigInvalid, "cannot bind " + listen);
            }
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            service.listen_after_bind();
            g_service = nullptr;
            return 0;
        }

        if (*sessions) {
            SessionStore store(sessions_dir);
            if (*s_list) {
                std::optional<Stage> filter;
                if (!stage_filter.empty()) {
                    filter = parse_stage(stage_filter);
                    if (!filter) throw Error(ErrorCode::InvalidDocument, "unknown stage " + stage_filter);
                }
                for (const auto& s : store.list(filter)) {
                    std::cout << s.id << "\t" << to_string(s.stage) << "\tv" << s.version << "\t" << s.updated_at
                              << "\t" << s.topic_excerpt << "\n";
                }
            } else if (*s_show) {
                std::cout << export_session(store.get(session_id));
            } else {
                std::cout << render_report(store.get(session_id));
            }
            return 0;
        }

        if (*fixtures) {
            auto out_dir = fx_out.empty() ? fs::path(fx_flags.data_dir) / "fixtures" : fs::path(fx_out);
            auto article = load_checked(fx_article);
            auto templates = templates_for(fx_flags);
            auto options = stage_options(fx_sentiment, fx_policy, "space", ProviderKind::Mock);
            options.temperature = kRecordingTemperature;

            if (*fx_record) {
                auto provider = provider_config(fx_flags);
                if (provider.kind != ProviderKind::Live)
                    throw Error(ErrorCode::ConfigInvalid, "fixtures record needs --provider live");
                provider.record_dir = out_dir;
                Gateway gateway(provider);
                Workflow wf(templates, gateway);
                auto session = wf.run_all(new_session(article, "s-recording", text::utc_timestamp()), options);
                std::cout << render_report(session);
                return 0;
            }

            auto replies = json::parse(read_file(fx_replies), nullptr, false);
            if (replies.is_discarded() || !replies.is_object())
                throw Error(ErrorCode::InvalidDocument, fx_replies + " is not a JSON object");
            ProviderConfig mock;
            mock.fixture_dir = out_dir;
            Gateway gateway(mock);
            std::size_t written = 0;
            Workflow wf(templates, gateway, [&](const RenderedPrompt& p) {
                auto key = std::string(to_string(p.stage_key));
                auto it = replies.find(key);
                if (it == replies.end() || !it->is_string())
                    throw Error(ErrorCode::InvalidDocument, fx_replies + " has no string reply for " + key);
                write_fixture(out_dir, CompletionRequest{p.text, options.max_tokens, options.temperature},
                              it->get<std::string>());
                ++written;
            });
            auto session = wf.run_all(new_session(article, "s-seeding", text::utc_timestamp()), options);
            std::cerr << "wrote " << written << " fixtures to " << out_dir.string() << "\n";
            std::cout << render_report(session);
            return 0;
        }

        if (*distances) {
            auto provider = provider_config(dist_flags);
            SessionStore store(dist_flags.data_dir);
            auto session = store.get(session_id);
            auto templates = templates_for(dist_flags);
            Gateway gateway(provider);
            Workflow wf(templates, gateway);
            if (dist_csv) {
                std::cout << wf.matrix_for(session).to_csv();
                return 0;
            }
            auto ranked = wf.rank(session, *parse_policy(dist_policy));
            std::cout << "rank\tdistance\tassociations\n";
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                std::cout << i + 1 << "\t" << format_distance(ranked[i].distance) << "\t";
                for (std::size_t k = 0; k < ranked[i].picks.size(); ++k) {
                    const auto& p = ranked[i].picks[k];
                    if (k) std::cout << " + ";
                    std::cout << session.catalog->associations[p.handle_ordinal][p.association_index];
                }
                std::cout << "\n";
            }
            return 0;
        }
    } catch (const StageParseError& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        print_parse_failure(e);
        return exit_code_for(e.code());
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
