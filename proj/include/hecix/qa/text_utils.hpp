#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hecix::qa {

// Lower-cased alphanumeric runs.
std::vector<std::string> words(std::string_view text);
std::set<std::string> word_set(std::string_view text);

// Splits at '.', '!' or '?' followed by whitespace or the end of text, and
// at newlines. Pieces are trimmed, end punctuation removed, empties dropped.
std::vector<std::string> split_sentences(std::string_view text);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);

}  // namespace hecix::qa
