#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the parsers, templates and ingestion.
// All case handling is ASCII-only.
namespace monologue::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
// Position of needle in haystack ignoring ASCII case, or npos.
std::size_t ifind(std::string_view haystack, std::string_view needle);

std::vector<std::string> split_lines(std::string_view s);
// Splits on `sep`, trims every piece and drops empty pieces.
std::vector<std::string> split_list(std::string_view s, char sep);

// Removes one pair of matching surrounding quotes ("..", '..', “..”, ‘..’), repeatedly.
std::string strip_quotes(std::string_view s);

// Sentence boundaries: a mark in {., !, ?} followed by whitespace and an
// uppercase ASCII letter. Returns the offset just past each boundary mark.
std::vector<std::size_t> sentence_boundaries(std::string_view s);
// Text up to and including the first boundary mark (whole text if none).
std::string first_sentence(std::string_view s);
// First `count` sentences joined back (verbatim slice of the input).
std::string leading_sentences(std::string_view s, std::size_t count);

// Counts maximal runs of non-whitespace characters.
std::size_t count_words(std::string_view s);

bool is_valid_utf8(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);
// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view s);

// UTC, millisecond precision, e.g. 2026-10-15T08:30:00.125Z. Strictly
// increasing within one process.
std::string utc_timestamp();

} // namespace monologue::text
