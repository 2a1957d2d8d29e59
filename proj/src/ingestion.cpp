#include "monologue/ingestion.hpp"

#include "monologue/error.hpp"
#include "monologue/text.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace monologue {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return buf.str();
}

} // namespace

LengthClass classify_length(std::size_t word_count) {
    if (word_count < kMediumMinWords) return LengthClass::Short;
    if (word_count <= kMediumMaxWords) return LengthClass::Medium;
    return LengthClass::Long;
}

std::string normalize_body(std::string_view raw) {
    std::string unified;
    unified.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\r') {
            unified.push_back('\n');
            if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
            continue;
        }
        auto u = static_cast<unsigned char>(c);
        if ((u < 0x20 && c != '\n' && c != '\t') || u == 0x7F) continue;
        unified.push_back(c);
    }

    std::string out;
    out.reserve(unified.size());
    bool previous_blank = true; // drops leading blank lines
    for (const auto& line : text::split_lines(unified)) {
        const bool blank = text::trim(line).empty();
        if (blank) {
            if (!previous_blank) out.push_back('\n');
        } else {
            out.append(line).push_back('\n');
        }
        previous_blank = blank;
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

Article load_article_text(std::string_view raw, std::string source_uri) {
    if (!text::is_valid_utf8(raw)) throw Error(ErrorCode::UnreadableSource, "source is not valid UTF-8 text");
    Article a;
    a.body = normalize_body(raw);
    a.word_count = text::count_words(a.body);
    if (a.word_count == 0) throw Error(ErrorCode::EmptyBody, "article has no words after normalization");
    a.length_class = classify_length(a.word_count);
    a.id = "a-" + text::sha256_hex(a.body).substr(0, 16);
    a.source_uri = std::move(source_uri);
    return a;
}

Article load_article_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());
    auto raw = read_file(path);
    if (!raw) throw Error(ErrorCode::UnreadableSource, "cannot read " + path.string());

    Article a = load_article_text(*raw, path.string());

    auto meta_path = path;
    meta_path += ".meta.json";
    if (auto meta = read_file(meta_path)) {
        auto j = nlohmann::json::parse(*meta, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw Error(ErrorCode::UnreadableSource, "malformed metadata file " + meta_path.string());
        if (auto it = j.find("title"); it != j.end() && it->is_string()) a.title = it->get<std::string>();
        if (auto it = j.find("sourceUri"); it != j.end() && it->is_string()) a.source_uri = it->get<std::string>();
    }
    return a;
}

std::optional<std::string> length_warning(const Article& a) {
    if (a.length_class == LengthClass::Medium) return std::nullopt;
    std::ostringstream msg;
    msg << "article has " << a.word_count << " words; " << kMediumMinWords << "-" << kMediumMaxWords
        << " words tends to work best"
        << (a.length_class == LengthClass::Short ? " (short articles may lack context)"
                                                 : " (long articles may dilute the comedic focus)");
    return msg.str();
}

} // namespace monologue
