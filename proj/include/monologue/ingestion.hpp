#pragma once

#include "monologue/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace monologue {

inline constexpr std::size_t kMediumMinWords = 500;
inline constexpr std::size_t kMediumMaxWords = 800;

// Short below 500 words, Medium for 500..800 inclusive, Long above 800.
LengthClass classify_length(std::size_t word_count);

// Unifies line endings to \n, drops control characters other than \n and \t,
// blanks whitespace-only lines and collapses runs of blank lines to one.
// Leading and trailing blank lines are removed.
std::string normalize_body(std::string_view raw);

// Throws UnreadableSource for undecodable input and EmptyBody when no words remain.
Article load_article_text(std::string_view raw, std::string source_uri = "inline");

// Reads a UTF-8 text file. A sidecar `<path>.meta.json` may supply "title"
// and "sourceUri"; it is optional.
Article load_article_file(const std::filesystem::path& path);

// Human-readable warning for articles outside the 500-800 word band.
std::optional<std::string> length_warning(const Article& article);

} // namespace monologue
