#include "reqintel/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "reqintel/core.hpp"
#include "reqintel/text.hpp"

namespace reqintel {

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
  }
  return "neutral";
}

const std::set<std::string>& SentimentLexicon::default_negators() {
  static const std::set<std::string> negators{"not", "no", "never", "cannot"};
  return negators;
}

SentimentLexicon::SentimentLexicon() : negators_(default_negators()) {}

SentimentLexicon::SentimentLexicon(std::unordered_map<std::string, double> entries,
                                   std::set<std::string> negators)
    : entries_(std::move(entries)), negators_(std::move(negators)) {
  for (const auto& [token, v] : entries_) {
    if (!(v >= -1.0 && v <= 1.0) || v == 0.0) {
      throw Error(ErrorCode::bad_config, "valence for '" + token + "' must be nonzero in [-1, 1]");
    }
    if (negators_.count(token)) {
      throw Error(ErrorCode::bad_config, "'" + token + "' is both a valence entry and a negator");
    }
  }
}

SentimentLexicon SentimentLexicon::parse(std::string_view contents) {
  std::unordered_map<std::string, double> entries;
  std::set<std::string> negators;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::bad_config, "lexicon line " + std::to_string(lineno) + ": missing tab");
    }
    const std::string token = to_lower(trim(line.substr(0, tab)));
    const std::string value = trim(line.substr(tab + 1));
    if (token.empty()) {
      throw Error(ErrorCode::bad_config, "lexicon line " + std::to_string(lineno) + ": empty token");
    }
    if (value == "NEG") {
      negators.insert(token);
      continue;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::bad_config,
                  "lexicon line " + std::to_string(lineno) + ": bad valence '" + value + "'");
    }
    entries[token] = v;
  }
  if (negators.empty()) negators = default_negators();
  return SentimentLexicon(std::move(entries), std::move(negators));
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::bad_config, "cannot read lexicon " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<double> SentimentLexicon::valence(const std::string& token) const {
  auto it = entries_.find(token);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SentimentLexicon SentimentLexicon::negated() const {
  auto flipped = entries_;
  for (auto& [token, v] : flipped) v = -v;
  return SentimentLexicon(std::move(flipped), negators_);
}

Polarity polarity_of(double value) {
  if (value < -kNeutralBand) return Polarity::negative;
  if (value > kNeutralBand) return Polarity::positive;
  return Polarity::neutral;
}

SentimentScore score_sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
  double sum = 0.0;
  int hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto v = lexicon.valence(tokens[i]);
    if (!v) continue;
    bool negated = false;
    const std::size_t lo = i >= kNegationWindow ? i - kNegationWindow : 0;
    for (std::size_t j = lo; j < i && !negated; ++j) negated = lexicon.is_negator(tokens[j]);
    sum += negated ? -*v : *v;
    ++hits;
  }
  if (hits == 0) return {};
  SentimentScore s;
  s.hits = hits;
  s.value = std::clamp(sum / hits, -1.0, 1.0);
  s.polarity = polarity_of(s.value);
  return s;
}

std::optional<double> average_sentiment(std::span<const SentimentScore> scores) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : scores) {
    if (s.hits <= 0) continue;
    sum += s.value;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace reqintel
