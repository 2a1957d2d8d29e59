#include "monologue/prompts.hpp"

#include "monologue/error.hpp"
#include "monologue/text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace monologue {

// Generated from templates/*.prompt at configure time.
namespace builtin_templates {
extern const std::array<std::string_view, 4> kFiles;
}

namespace {

constexpr std::array<std::string_view, 6> kKnownPlaceholders{
    kPlaceholderArticleBody,    kPlaceholderTopic,          kPlaceholderCatalogBlock,
    kPlaceholderSentimentWord, kPlaceholderForcedAssociations, kPlaceholderPunchline,
};

struct Token {
    std::size_t begin;
    std::size_t end;
    std::string name;
};

// Every "{{" must open a well-formed {{name}} token.
std::vector<Token> scan_placeholders(std::string_view s) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    while ((pos = s.find("{{", pos)) != std::string_view::npos) {
        auto close = s.find("}}", pos + 2);
        if (close == std::string_view::npos)
            throw Error(ErrorCode::MissingPlaceholder, "unterminated placeholder at offset " + std::to_string(pos));
        std::string name(text::trim(s.substr(pos + 2, close - pos - 2)));
        const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || c == '_';
        });
        if (!ok) throw Error(ErrorCode::MissingPlaceholder, "malformed placeholder {{" + name + "}}");
        tokens.push_back({pos, close + 2, std::move(name)});
        pos = close + 2;
    }
    return tokens;
}

std::string escape_value(std::string_view v) {
    std::string out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
        if (v[i] == '{' && i + 1 < v.size() && v[i + 1] == '{') out.push_back(' ');
    }
    return out;
}

bool needs_bullets(const std::vector<std::string>& items) {
    return std::any_of(items.begin(), items.end(), [](const std::string& s) { return s.find(',') != std::string::npos; });
}

void append_list(std::string& out, const std::vector<std::string>& items) {
    if (needs_bullets(items)) {
        for (const auto& item : items) out.append("\n- ").append(item);
        return;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        out.append(i == 0 ? " " : ", ").append(items[i]);
    }
}

} // namespace

std::string_view to_string(StageKey key) {
    switch (key) {
    case StageKey::Topic: return "topic";
    case StageKey::HandlesAssociations: return "handles";
    case StageKey::Punchline: return "punchline";
    case StageKey::Angle: return "angle";
    }
    return "unknown";
}

std::optional<StageKey> parse_stage_key(std::string_view s) {
    if (text::iequals(s, "topic")) return StageKey::Topic;
    if (text::iequals(s, "handles") || text::iequals(s, "handlesAssociations")) return StageKey::HandlesAssociations;
    if (text::iequals(s, "punchline")) return StageKey::Punchline;
    if (text::iequals(s, "angle")) return StageKey::Angle;
    return std::nullopt;
}

PromptTemplate PromptTemplate::parse(std::string_view file_text) {
    auto lines = text::split_lines(file_text);
    if (lines.empty() || text::trim(lines[0]) != "---")
        throw Error(ErrorCode::InvalidDocument, "template must start with a --- front-matter line");

    PromptTemplate tpl;
    std::optional<StageKey> key;
    std::optional<std::set<std::string>> declared;
    std::size_t i = 1;
    for (; i < lines.size(); ++i) {
        auto line = text::trim(lines[i]);
        if (line == "---") break;
        if (line.empty() || line.front() == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw Error(ErrorCode::InvalidDocument, "front-matter line without ':': " + std::string(line));
        auto name = text::trim(line.substr(0, colon));
        auto value = text::trim(line.substr(colon + 1));
        if (name == "stage") {
            key = parse_stage_key(value);
            if (!key) throw Error(ErrorCode::InvalidDocument, "unknown stage key: " + std::string(value));
        } else if (name == "placeholders") {
            auto names = text::split_list(value, ',');
            declared = std::set<std::string>(names.begin(), names.end());
        } else if (name == "reconstructed") {
            tpl.reconstructed = text::iequals(value, "true");
        }
    }
    if (i >= lines.size()) throw Error(ErrorCode::InvalidDocument, "front matter is not closed by ---");
    if (!key) throw Error(ErrorCode::InvalidDocument, "front matter lacks a stage key");
    if (!declared) throw Error(ErrorCode::InvalidDocument, "front matter lacks a placeholders list");

    std::string body;
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
        body.append(lines[k]);
        if (k + 1 < lines.size()) body.push_back('\n');
    }
    while (!body.empty() && body.back() == '\n') body.pop_back();

    std::set<std::string> used;
    for (auto& t : scan_placeholders(body)) used.insert(t.name);
    for (const auto& name : used) {
        if (std::find(kKnownPlaceholders.begin(), kKnownPlaceholders.end(), name) == kKnownPlaceholders.end())
            throw Error(ErrorCode::MissingPlaceholder, "unknown placeholder {{" + name + "}}");
        if (!declared->count(name))
            throw Error(ErrorCode::MissingPlaceholder, "placeholder {{" + name + "}} is used but not declared");
    }
    for (const auto& name : *declared) {
        if (!used.count(name))
            throw Error(ErrorCode::MissingPlaceholder, "placeholder {{" + name + "}} is declared but not used");
    }

    tpl.stage_key = *key;
    tpl.template_text = std::move(body);
    tpl.required_placeholders = std::move(used);
    tpl.fingerprint = text::sha256_hex(tpl.template_text);
    return tpl;
}

RenderedPrompt render(const PromptTemplate& tpl, const std::map<std::string, std::string>& values) {
    RenderedPrompt out;
    out.stage_key = tpl.stage_key;
    out.template_fingerprint = tpl.fingerprint;
    for (const auto& name : tpl.required_placeholders) {
        auto it = values.find(name);
        if (it == values.end())
            throw Error(ErrorCode::MissingPlaceholder, "no value for placeholder {{" + name + "}}");
        out.substitutions[name] = it->second;
    }
    std::string_view src = tpl.template_text;
    std::size_t last = 0;
    for (const auto& t : scan_placeholders(src)) {
        out.text.append(src.substr(last, t.begin - last));
        out.text.append(escape_value(out.substitutions.at(t.name)));
        last = t.end;
    }
    out.text.append(src.substr(last));
    return out;
}

TemplateSet TemplateSet::builtin() {
    TemplateSet set;
    for (auto file : builtin_templates::kFiles) {
        auto tpl = PromptTemplate::parse(file);
        set.templates_[tpl.stage_key] = std::move(tpl);
    }
    return set;
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec))
        throw Error(ErrorCode::ConfigInvalid, "template directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".prompt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    TemplateSet set;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        auto tpl = PromptTemplate::parse(buf.str());
        auto key = tpl.stage_key;
        if (!set.templates_.emplace(key, std::move(tpl)).second)
            throw Error(ErrorCode::ConfigInvalid, "more than one template for stage " + std::string(to_string(key)));
    }
    for (auto key : {StageKey::Topic, StageKey::HandlesAssociations, StageKey::Punchline, StageKey::Angle}) {
        if (!set.templates_.count(key))
            throw Error(ErrorCode::ConfigInvalid, "no template for stage " + std::string(to_string(key)) + " in " +
                                                      dir.string());
    }
    return set;
}

const PromptTemplate& TemplateSet::get(StageKey key) const {
    auto it = templates_.find(key);
    if (it == templates_.end())
        throw Error(ErrorCode::ConfigInvalid, "no template for stage " + std::string(to_string(key)));
    return it->second;
}

std::string render_catalog_block(const AssociationCatalog& catalog) {
    std::string out = "Handles:";
    std::vector<std::string> handles;
    for (const auto& h : catalog.handles) handles.push_back(h.text);
    append_list(out, handles);
    for (std::size_t i = 0; i < catalog.handles.size(); ++i) {
        out.append("\nAssociations for ").append(catalog.handles[i].text).append(":");
        append_list(out, catalog.associations[i]);
    }
    return out;
}

RenderedPrompt render_topic_prompt(const TemplateSet& set, const Article& article) {
    return render(set.get(StageKey::Topic), {{std::string(kPlaceholderArticleBody), article.body}});
}

RenderedPrompt render_handles_prompt(const TemplateSet& set, const TopicSentence& topic) {
    return render(set.get(StageKey::HandlesAssociations), {{std::string(kPlaceholderTopic), topic.text}});
}

RenderedPrompt render_punchline_prompt(const TemplateSet& set, const AssociationCatalog& catalog, Sentiment sentiment,
                                       const std::optional<ScoredCombination>& forced) {
    std::string forced_text;
    if (forced) {
        if (forced->picks.size() != catalog.handles.size())
            throw Error(ErrorCode::IndexOutOfRange, "forced combination needs one pick per handle");
        std::string names;
        for (std::size_t i = 0; i < forced->picks.size(); ++i) {
            const auto& p = forced->picks[i];
            if (p.handle_ordinal >= catalog.associations.size() ||
                p.association_index >= catalog.associations[p.handle_ordinal].size())
                throw Error(ErrorCode::IndexOutOfRange, "forced pick (" + std::to_string(p.handle_ordinal) + ", " +
                                                            std::to_string(p.association_index) + ") is out of range");
            if (i) names.append(" + ");
            names.append("\"").append(catalog.associations[p.handle_ordinal][p.association_index]).append("\"");
        }
        forced_text = "Use exactly this combination of associations for the punchline: " + names + ".";
    }
    return render(set.get(StageKey::Punchline), {
                                                    {std::string(kPlaceholderCatalogBlock), render_catalog_block(catalog)},
                                                    {std::string(kPlaceholderSentimentWord), std::string(to_string(sentiment))},
                                                    {std::string(kPlaceholderForcedAssociations), forced_text},
                                                });
}

RenderedPrompt render_angle_prompt(const TemplateSet& set, const TopicSentence& topic, const Punchline& punchline) {
    return render(set.get(StageKey::Angle), {
                                                {std::string(kPlaceholderTopic), topic.text},
                                                {std::string(kPlaceholderPunchline), punchline.text},
                                            });
}

} // namespace monologue
