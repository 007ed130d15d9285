#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reqintel {

/// Lowercases, strips URLs ("scheme://..." up to the next whitespace) and
/// @-mentions, splits on non-alphanumeric boundaries and drops tokens
/// shorter than two characters. Order and duplicates are preserved.
///
/// Non-ASCII letters (UTF-8) count as alphanumeric, so "stürzt" stays one
/// token; Unicode punctuation, symbols and emoji act as separators.
std::vector<std::string> tokenize(std::string_view text);

/// ASCII and Latin-1 lowercase; other code points pass through.
std::string to_lower(std::string_view text);

std::string trim(std::string_view text);

/// Truncates to at most `max_chars` code points without splitting one.
std::string utf8_prefix(std::string_view text, std::size_t max_chars);

}  // namespace reqintel
