#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace capcot::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string strip_terminal_punct(std::string_view s);

/// Whitespace-separated tokens.
std::vector<std::string> tokenize(std::string_view s);

/// Lowercase word tokens with punctuation stripped.
std::vector<std::string> word_tokens(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split_sentences(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

/// Jaccard similarity of the two strings' word-token sets.
double token_jaccard(std::string_view a, std::string_view b);

std::size_t count_whitespace_tokens(std::string_view s);

/// FNV-1a 64-bit, printed as fixed-width hex. Stable across runs and platforms.
std::string stable_hash_hex(std::string_view s);

} // namespace capcot::text
