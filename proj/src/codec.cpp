#include "monologue/codec.hpp"

#include "monologue/error.hpp"

namespace monologue {

namespace {

template <typename Enum>
Enum enum_field(const json& j, const char* key, std::optional<Enum> (*parse)(std::string_view)) {
    auto name = j.at(key).get<std::string>();
    auto value = parse(name);
    if (!value) throw Error(ErrorCode::InvalidDocument, std::string("unknown value for ") + key + ": " + name);
    return *value;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        v = it->template get<T>();
    } else {
        v.reset();
    }
}

} // namespace

void to_json(json& j, const Article& v) {
    j = json{{"id", v.id},
             {"sourceUri", v.source_uri},
             {"body", v.body},
             {"wordCount", v.word_count},
             {"lengthClass", to_string(v.length_class)}};
    put_optional(j, "title", v.title);
}

void from_json(const json& j, Article& v) {
    v.id = j.at("id").get<std::string>();
    v.source_uri = j.at("sourceUri").get<std::string>();
    get_optional(j, "title", v.title);
    v.body = j.at("body").get<std::string>();
    v.word_count = j.at("wordCount").get<std::size_t>();
    v.length_class = enum_field<LengthClass>(j, "lengthClass", parse_length_class);
}

void to_json(json& j, const TopicSentence& v) {
    j = json{{"text", v.text}, {"sourceArticleId", v.source_article_id}};
}

void from_json(const json& j, TopicSentence& v) {
    v.text = j.at("text").get<std::string>();
    v.source_article_id = j.value("sourceArticleId", std::string{});
}

void to_json(json& j, const Handle& v) {
    j = json{{"text", v.text}, {"ordinal", v.ordinal}, {"nonLiteral", v.non_literal}};
}

void from_json(const json& j, Handle& v) {
    v.text = j.at("text").get<std::string>();
    v.ordinal = j.at("ordinal").get<std::size_t>();
    v.non_literal = j.value("nonLiteral", false);
}

void to_json(json& j, const AssociationCatalog& v) {
    j = json{{"handles", v.handles}, {"associations", v.associations}};
}

void from_json(const json& j, AssociationCatalog& v) {
    v.handles = j.at("handles").get<std::vector<Handle>>();
    v.associations = j.at("associations").get<std::vector<std::vector<std::string>>>();
}

void to_json(json& j, const Pick& v) {
    j = json{{"handleOrdinal", v.handle_ordinal}, {"associationIndex", v.association_index}};
}

void from_json(const json& j, Pick& v) {
    v.handle_ordinal = j.at("handleOrdinal").get<std::size_t>();
    v.association_index = j.at("associationIndex").get<std::size_t>();
}

void to_json(json& j, const ScoredCombination& v) {
    j = json{{"picks", v.picks}, {"distance", v.distance}, {"policy", to_string(v.policy)}};
}

void from_json(const json& j, ScoredCombination& v) {
    v.picks = j.at("picks").get<std::vector<Pick>>();
    v.distance = j.value("distance", 0.0);
    v.policy = j.contains("policy") ? enum_field<CombinationPolicy>(j, "policy", parse_policy)
                                    : CombinationPolicy::Manual;
}

void to_json(json& j, const Punchline& v) {
    j = json{{"text", v.text}, {"sentiment", to_string(v.sentiment)}};
    put_optional(j, "combination", v.combination);
}

void from_json(const json& j, Punchline& v) {
    v.text = j.at("text").get<std::string>();
    get_optional(j, "combination", v.combination);
    v.sentiment = j.contains("sentiment") ? enum_field<Sentiment>(j, "sentiment", parse_sentiment)
                                          : Sentiment::Negative;
}

void to_json(json& j, const Angle& v) {
    j = json{{"text", v.text}};
}

void from_json(const json& j, Angle& v) {
    v.text = j.at("text").get<std::string>();
}

void to_json(json& j, const MonologueJoke& v) {
    j = json{{"topic", v.topic},
             {"angle", v.angle},
             {"punchline", v.punchline},
             {"assembledText", v.assembled_text},
             {"style", to_string(v.style)}};
}

void from_json(const json& j, MonologueJoke& v) {
    v.topic = j.at("topic").get<TopicSentence>();
    v.angle = j.at("angle").get<Angle>();
    v.punchline = j.at("punchline").get<Punchline>();
    v.assembled_text = j.at("assembledText").get<std::string>();
    v.style = enum_field<JoinStyle>(j, "style", parse_join_style);
}

void to_json(json& j, const AuditEntry& v) {
    j = json{{"timestamp", v.timestamp},
             {"actor", to_string(v.actor)},
             {"stage", to_string(v.stage)},
             {"before", v.before},
             {"after", v.after}};
}

void from_json(const json& j, AuditEntry& v) {
    v.timestamp = j.at("timestamp").get<std::string>();
    v.actor = enum_field<Actor>(j, "actor", parse_actor);
    v.stage = enum_field<Stage>(j, "stage", parse_stage);
    v.before = j.at("before").get<std::string>();
    v.after = j.at("after").get<std::string>();
}

void to_json(json& j, const PipelineSession& v) {
    j = json{{"id", v.id},
             {"stage", to_string(v.stage)},
             {"version", v.version},
             {"createdAt", v.created_at},
             {"updatedAt", v.updated_at},
             {"article", v.article},
             {"auditLog", v.audit_log}};
    put_optional(j, "topic", v.topic);
    put_optional(j, "catalog", v.catalog);
    put_optional(j, "combination", v.combination);
    put_optional(j, "punchline", v.punchline);
    put_optional(j, "angle", v.angle);
    put_optional(j, "joke", v.joke);
}

void from_json(const json& j, PipelineSession& v) {
    v.id = j.at("id").get<std::string>();
    v.stage = enum_field<Stage>(j, "stage", parse_stage);
    v.version = j.at("version").get<std::uint64_t>();
    v.created_at = j.value("createdAt", std::string{});
    v.updated_at = j.value("updatedAt", std::string{});
    v.article = j.at("article").get<Article>();
    get_optional(j, "topic", v.topic);
    get_optional(j, "catalog", v.catalog);
    get_optional(j, "combination", v.combination);
    get_optional(j, "punchline", v.punchline);
    get_optional(j, "angle", v.angle);
    get_optional(j, "joke", v.joke);
    v.audit_log = j.value("auditLog", std::vector<AuditEntry>{});
}

json stage_output_to_json(const StageOutput& out) {
    return std::visit([](const auto& v) { return json(v); }, out);
}

StageOutput stage_output_from_json(Stage stage, const json& j) {
    try {
        switch (stage) {
        case Stage::ArticleLoaded: return j.get<Article>();
        case Stage::TopicDrafted: return j.get<TopicSentence>();
        case Stage::CatalogBuilt: return j.get<AssociationCatalog>();
        case Stage::CombinationSelected: return j.get<ScoredCombination>();
        case Stage::PunchlineWritten: return j.get<Punchline>();
        case Stage::AngleWritten: return j.get<Angle>();
        case Stage::Assembled: return j.get<MonologueJoke>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidDocument, std::string("malformed ") + std::string(to_string(stage)) +
                                                    " value: " + e.what());
    }
    throw Error(ErrorCode::InvalidDocument, "unknown stage");
}

std::string snapshot_of(const PipelineSession& s, Stage stage) {
    json j;
    switch (stage) {
    case Stage::ArticleLoaded: j = s.article; break;
    case Stage::TopicDrafted: if (s.topic) j = *s.topic; break;
    case Stage::CatalogBuilt: if (s.catalog) j = *s.catalog; break;
    case Stage::CombinationSelected: if (s.combination) j = *s.combination; break;
    case Stage::PunchlineWritten: if (s.punchline) j = *s.punchline; break;
    case Stage::AngleWritten: if (s.angle) j = *s.angle; break;
    case Stage::Assembled: if (s.joke) j = *s.joke; break;
    }
    return j.dump();
}

} // namespace monologue
