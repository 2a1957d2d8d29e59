#include "monologue/parser.hpp"

#include "monologue/pipeline.hpp"
#include "monologue/text.hpp"

#include <cctype>
#include <set>

namespace monologue {

namespace {

constexpr std::string_view kEllipsis = "\xE2\x80\xA6"; // …
constexpr std::string_view kBullet = "\xE2\x80\xA2";   // •

template <typename T>
ParseOutcome<T> unparseable(std::vector<Diagnostic> diags, std::size_t line, std::string message) {
    diags.push_back({line, std::move(message)});
    return ParseOutcome<T>{ParseKind::Unparseable, std::nullopt, std::nullopt, std::move(diags)};
}

std::string remove_all(std::string s, std::string_view what) {
    std::size_t pos;
    while ((pos = s.find(what)) != std::string::npos) s.erase(pos, what.size());
    return s;
}

std::string strip_markup(std::string_view s) {
    return std::string(text::trim(remove_all(remove_all(std::string(s), "**"), "__")));
}

// "- x", "* x", "• x", "1. x", "1) x" -> "x"
std::optional<std::string> bullet_item(std::string_view line) {
    line = text::trim(line);
    if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') return std::string(text::trim(line.substr(2)));
    if (line.substr(0, kBullet.size()) == kBullet) return std::string(text::trim(line.substr(kBullet.size())));
    std::size_t digits = 0;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > 0 && digits + 1 < line.size() && (line[digits] == '.' || line[digits] == ')') && line[digits + 1] == ' ')
        return std::string(text::trim(line.substr(digits + 2)));
    return std::nullopt;
}

std::string clean_item(std::string_view s) {
    auto out = text::strip_quotes(strip_markup(s));
    // single-star emphasis: *Upselling*
    if (out.size() >= 2 && out.front() == '*' && out.back() == '*') out = text::strip_quotes(out.substr(1, out.size() - 2));
    return out;
}

// Drops a "Label:" prefix (optionally bold or with a parenthetical, e.g.
// "Punchline (Negative):") when the line starts with `label`.
std::string_view strip_label(std::string_view line, std::string_view label) {
    auto t = text::trim(line);
    if (!text::istarts_with(t, label)) return t;
    auto colon = t.find(':');
    if (colon == std::string_view::npos || colon > label.size() + 24) return t;
    return text::trim(t.substr(colon + 1));
}

std::string strip_ellipses(std::string_view s) {
    bool changed = true;
    while (changed) {
        changed = false;
        s = text::trim(s);
        for (std::string_view e : {kEllipsis, std::string_view("...")}) {
            if (s.size() >= e.size() && s.substr(0, e.size()) == e) {
                s.remove_prefix(e.size());
                changed = true;
            }
            if (s.size() >= e.size() && s.substr(s.size() - e.size()) == e) {
                s.remove_suffix(e.size());
                changed = true;
            }
        }
    }
    return std::string(s);
}

struct Line {
    std::size_t number;
    std::string text; // trimmed, markup kept
};

std::vector<Line> numbered_lines(std::string_view raw) {
    std::vector<Line> out;
    std::size_t n = 0;
    for (auto& l : text::split_lines(raw)) {
        ++n;
        out.push_back({n, std::string(text::trim(l))});
    }
    return out;
}

std::optional<std::string> first_nonempty(const std::vector<Line>& lines, std::vector<Diagnostic>& diags,
                                          const char* what) {
    std::optional<std::string> first;
    for (const auto& l : lines) {
        if (l.text.empty()) continue;
        if (!first) {
            first = l.text;
        } else {
            diags.push_back({l.number, std::string("ignored text after the ") + what + " line"});
            break;
        }
    }
    return first;
}

bool is_handles_header(std::string_view cleaned) {
    return text::istarts_with(cleaned, "handles:") || text::istarts_with(cleaned, "handle:");
}

bool is_associations_header(std::string_view cleaned) {
    return text::istarts_with(cleaned, "associations for ");
}

// Splits "Associations for <h>: rest" into (h, rest), preferring a known handle name.
std::pair<std::string, std::string> split_association_header(std::string_view cleaned,
                                                              const std::vector<std::string>& known) {
    auto rest = cleaned.substr(std::string_view("associations for ").size());
    for (const auto& h : known) {
        for (std::string_view quote : {"", "\"", "'", "\xE2\x80\x9C"}) {
            std::string_view r = rest;
            if (!quote.empty()) {
                if (r.substr(0, quote.size()) != quote) continue;
                r.remove_prefix(quote.size());
            }
            if (!text::istarts_with(r, h)) continue;
            auto tail = r.substr(h.size());
            // closing quote, if any, then the colon
            for (std::string_view close : {"\"", "'", "\xE2\x80\x9D"}) {
                if (tail.substr(0, close.size()) == close) {
                    tail.remove_prefix(close.size());
                    break;
                }
            }
            tail = text::trim(tail);
            if (!tail.empty() && tail.front() == ':') return {h, std::string(text::trim(tail.substr(1)))};
        }
    }
    auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) return {clean_item(rest), ""};
    return {clean_item(rest.substr(0, colon)), std::string(text::trim(rest.substr(colon + 1)))};
}

// Items either inline after the colon (comma separated) or on the bullet
// lines that follow. Advances `i` past consumed bullet lines.
std::vector<std::string> collect_items(const std::string& inline_rest, const std::vector<Line>& lines, std::size_t& i) {
    std::vector<std::string> items;
    if (!text::trim(inline_rest).empty()) {
        for (auto& piece : text::split_list(inline_rest, ',')) {
            auto item = clean_item(piece);
            if (!item.empty()) items.push_back(std::move(item));
        }
        return items;
    }
    while (i + 1 < lines.size()) {
        const auto& next = lines[i + 1].text;
        if (next.empty()) {
            ++i;
            continue;
        }
        auto b = bullet_item(next);
        if (!b) break;
        auto item = clean_item(*b);
        if (!item.empty()) items.push_back(std::move(item));
        ++i;
    }
    return items;
}

} // namespace

std::string_view to_string(ParseKind kind) {
    switch (kind) {
    case ParseKind::Parsed: return "parsed";
    case ParseKind::Rejected: return "rejected";
    case ParseKind::Unparseable: return "unparseable";
    }
    return "unknown";
}

ParseOutcome<TopicSentence> parse_topic(std::string_view raw, std::string_view article_id) {
    std::vector<Diagnostic> diags;
    auto whole = text::strip_quotes(strip_label(strip_markup(raw), "topic"));
    if (whole.empty()) return unparseable<TopicSentence>(std::move(diags), 0, "empty reply");

    auto opening = text::leading_sentences(whole, 2);
    if (text::ifind(opening, "inappropriate") != std::string_view::npos) {
        return ParseOutcome<TopicSentence>{ParseKind::Rejected, std::nullopt, opening, std::move(diags)};
    }

    auto lines = numbered_lines(whole);
    auto line = first_nonempty(lines, diags, "topic");
    auto sentence = text::strip_quotes(text::first_sentence(text::strip_quotes(*line)));
    if (sentence.size() < text::trim(*line).size()) diags.push_back({1, "kept only the first sentence"});

    // "Wow!!" -> "Wow!"
    while (sentence.size() >= 2 && std::string_view(".!?").find(sentence.back()) != std::string_view::npos &&
           std::string_view(".!?").find(sentence[sentence.size() - 2]) != std::string_view::npos) {
        sentence.erase(sentence.size() - 2, 1);
    }
    if (sentence.empty() || !is_single_sentence(sentence))
        return unparseable<TopicSentence>(std::move(diags), 1, "no single topic sentence found");

    TopicSentence topic{sentence, std::string(article_id)};
    return ParseOutcome<TopicSentence>{ParseKind::Parsed, std::move(topic), std::nullopt, std::move(diags)};
}

ParseOutcome<AssociationCatalog> parse_catalog(std::string_view raw) {
    std::vector<Diagnostic> diags;
    auto lines = numbered_lines(raw);

    std::vector<std::string> handles;
    bool saw_handles_line = false;
    std::size_t handles_line = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto item = bullet_item(lines[i].text);
        auto cleaned = strip_markup(item ? *item : lines[i].text);
        if (!is_handles_header(cleaned)) continue;
        saw_handles_line = true;
        handles_line = lines[i].number;
        auto rest = cleaned.substr(cleaned.find(':') + 1);
        handles = collect_items(rest, lines, i);
        break;
    }

    struct Block {
        std::string handle;
        std::size_t line;
        std::vector<std::string> items;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto item = bullet_item(lines[i].text);
        auto cleaned = strip_markup(item ? *item : lines[i].text);
        if (!is_associations_header(cleaned)) continue;
        auto [name, rest] = split_association_header(cleaned, handles);
        const auto line_no = lines[i].number;
        blocks.push_back({name, line_no, collect_items(rest, lines, i)});
    }

    if (!saw_handles_line) {
        for (const auto& b : blocks) handles.push_back(b.handle);
        if (!handles.empty()) diags.push_back({0, "no Handles line; handles taken from the association headers"});
    }
    if (handles.size() != 2 && handles.size() != 3) {
        return unparseable<AssociationCatalog>(std::move(diags), handles_line,
                                               "expected 2 or 3 handles, found " + std::to_string(handles.size()));
    }
    for (std::size_t a = 0; a < handles.size(); ++a) {
        for (std::size_t b = a + 1; b < handles.size(); ++b) {
            if (text::iequals(handles[a], handles[b]))
                return unparseable<AssociationCatalog>(std::move(diags), handles_line, "duplicate handle \"" + handles[a] + "\"");
        }
    }

    AssociationCatalog catalog;
    catalog.associations.resize(handles.size());
    std::vector<bool> filled(handles.size(), false);
    for (const auto& b : blocks) {
        std::size_t idx = handles.size();
        for (std::size_t h = 0; h < handles.size(); ++h) {
            if (text::iequals(handles[h], b.handle)) idx = h;
        }
        if (idx == handles.size()) {
            diags.push_back({b.line, "associations for unknown handle \"" + b.handle + "\" ignored"});
            continue;
        }
        if (filled[idx]) {
            diags.push_back({b.line, "second association block for \"" + handles[idx] + "\" ignored"});
            continue;
        }
        filled[idx] = true;
        std::set<std::string> seen;
        for (const auto& item : b.items) {
            if (!seen.insert(text::to_lower(item)).second) {
                diags.push_back({b.line, "duplicate association \"" + item + "\" for \"" + handles[idx] + "\" dropped"});
                continue;
            }
            catalog.associations[idx].push_back(item);
        }
    }

    for (std::size_t h = 0; h < handles.size(); ++h) {
        if (!filled[h])
            return unparseable<AssociationCatalog>(std::move(diags), 0, "no associations for handle \"" + handles[h] + "\"");
        if (catalog.associations[h].size() < 3)
            return unparseable<AssociationCatalog>(std::move(diags), 0,
                                                   "handle \"" + handles[h] + "\" has fewer than 3 associations");
        catalog.handles.push_back(Handle{handles[h], h, false});
    }
    return ParseOutcome<AssociationCatalog>{ParseKind::Parsed, std::move(catalog), std::nullopt, std::move(diags)};
}

ParseOutcome<Punchline> parse_punchline(std::string_view raw, const AssociationCatalog& catalog, Sentiment sentiment) {
    std::vector<Diagnostic> diags;
    auto lines = numbered_lines(raw);
    auto first = first_nonempty(lines, diags, "punchline");
    if (!first) return unparseable<Punchline>(std::move(diags), 0, "empty reply");

    std::string line = text::strip_quotes(strip_label(*first, "punchline"));
    std::string body = line;
    std::optional<ScoredCombination> combination;

    auto colon = line.find(':');
    const bool annotated = colon != std::string::npos && line.substr(0, colon).find('+') != std::string::npos;
    if (annotated) {
        body = text::strip_quotes(text::trim(std::string_view(line).substr(colon + 1)));
        std::vector<std::string> names;
        for (auto& piece : text::split_list(std::string_view(line).substr(0, colon), '+')) names.push_back(clean_item(piece));

        const std::size_t n = catalog.handles.size();
        std::vector<std::optional<std::size_t>> assigned(n);
        auto find_in = [&](std::size_t h, const std::string& name) -> std::optional<std::size_t> {
            const auto& list = catalog.associations[h];
            for (std::size_t k = 0; k < list.size(); ++k) {
                if (text::iequals(list[k], name)) return k;
            }
            return std::nullopt;
        };
        bool resolved = names.size() == n;
        std::vector<bool> name_done(names.size(), false);
        if (resolved) {
            // positional first, then any handle still open
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (auto k = find_in(i, names[i])) {
                    assigned[i] = *k;
                    name_done[i] = true;
                }
            }
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (name_done[i]) continue;
                for (std::size_t h = 0; h < n && !name_done[i]; ++h) {
                    if (assigned[h]) continue;
                    if (auto k = find_in(h, names[i])) {
                        assigned[h] = *k;
                        name_done[i] = true;
                    }
                }
            }
            for (bool done : name_done) resolved = resolved && done;
        }
        if (resolved) {
            ScoredCombination combo;
            combo.policy = CombinationPolicy::Manual;
            for (std::size_t h = 0; h < n; ++h) combo.picks.push_back(Pick{h, *assigned[h]});
            combination = std::move(combo);
        } else {
            diags.push_back({1, "annotation \"" + line.substr(0, colon) +
                                    "\" does not name one catalog association per handle; combination left unset"});
        }
    } else {
        diags.push_back({1, "no association annotation; combination left unset"});
    }

    if (body.empty()) return unparseable<Punchline>(std::move(diags), 1, "punchline text is empty");
    Punchline p{std::move(body), std::move(combination), sentiment};
    return ParseOutcome<Punchline>{ParseKind::Parsed, std::move(p), std::nullopt, std::move(diags)};
}

ParseOutcome<Angle> parse_angle(std::string_view raw) {
    std::vector<Diagnostic> diags;
    auto lines = numbered_lines(raw);
    auto first = first_nonempty(lines, diags, "angle");
    if (!first) return unparseable<Angle>(std::move(diags), 0, "empty reply");
    auto angle = text::strip_quotes(strip_ellipses(text::strip_quotes(strip_label(strip_markup(*first), "angle"))));
    angle = text::strip_quotes(strip_ellipses(angle));
    if (angle.empty()) return unparseable<Angle>(std::move(diags), 1, "angle text is empty");
    return ParseOutcome<Angle>{ParseKind::Parsed, Angle{std::move(angle)}, std::nullopt, std::move(diags)};
}

} // namespace monologue
