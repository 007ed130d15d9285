#include "reqintel/text.hpp"

#include <cstdint>

namespace reqintel {

namespace {

constexpr char32_t kInvalid = 0xFFFD;

// Decodes one code point at `pos` and advances past it. Malformed input
// yields U+FFFD and consumes a single byte.
char32_t next_code_point(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

bool is_ascii_alnum(char32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

bool is_word(char32_t cp) {
  if (cp < 0x80) return is_ascii_alnum(cp);
  if (cp == kInvalid || cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE00 && cp <= 0xFE0F) return false;  // variation selectors
  if (cp >= 0x1F000) return false;                  // emoji and pictographs
  return true;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200A);
}

bool is_scheme_char(char32_t cp) {
  return is_ascii_alnum(cp) || cp == '+' || cp == '.' || cp == '-';
}

bool is_mention_char(char32_t cp) { return is_ascii_alnum(cp) || cp == '_'; }

std::vector<char32_t> decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) out.push_back(next_code_point(s, pos));
  return out;
}

// Blanks out URL runs and @-mentions so the splitter never sees them.
void strip_urls_and_mentions(std::vector<char32_t>& cps) {
  const std::size_t n = cps.size();
  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (cps[i] != ':' || cps[i + 1] != '/' || cps[i + 2] != '/') continue;
    std::size_t start = i;
    while (start > 0 && is_scheme_char(cps[start - 1])) --start;
    if (start == i) continue;  // "://" without a scheme is just punctuation
    std::size_t end = i;
    while (end < n && !is_space(cps[end])) ++end;
    for (std::size_t k = start; k < end; ++k) cps[k] = ' ';
    i = end;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cps[i] != '@') continue;
    if (i > 0 && is_word(cps[i - 1])) continue;
    std::size_t end = i + 1;
    while (end < n && is_mention_char(cps[end])) ++end;
    if (end == i + 1) continue;
    for (std::size_t k = i; k < end; ++k) cps[k] = ' ';
    i = end - 1;
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<char32_t> cps = decode(text);
  strip_urls_and_mentions(cps);

  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;
  auto flush = [&] {
    if (current_len >= 2) tokens.push_back(current);
    current.clear();
    current_len = 0;
  };
  for (char32_t cp : cps) {
    if (is_word(cp)) {
      append_utf8(current, lower(cp));
      ++current_len;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t before = pos;
    const char32_t cp = next_code_point(text, pos);
    if (cp == kInvalid) {
      out.append(text.substr(before, pos - before));
    } else {
      append_utf8(out, lower(cp));
    }
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto ws = " \t\n\r\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return std::string(text.substr(first, last - first + 1));
}

std::string utf8_prefix(std::string_view text, std::size_t max_chars) {
  std::size_t pos = 0;
  std::size_t count = 0;
  while (pos < text.size() && count < max_chars) {
    next_code_point(text, pos);
    ++count;
  }
  return std::string(text.substr(0, pos));
}

}  // namespace reqintel
