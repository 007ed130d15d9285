#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace reqintel {

enum class Polarity { negative, neutral, positive };

std::string_view to_string(Polarity p);

struct SentimentScore {
  double value = 0.0;
  Polarity polarity = Polarity::neutral;
  int hits = 0;

  bool operator==(const SentimentScore&) const = default;
};

inline constexpr double kNeutralBand = 0.05;
inline constexpr std::size_t kNegationWindow = 3;

class SentimentLexicon {
 public:
  static const std::set<std::string>& default_negators();

  SentimentLexicon();  // empty entries, default negators

  /// Throws Error(bad_config) when a valence is zero or outside [-1, 1], or
  /// a token is both a valence entry and a negator.
  SentimentLexicon(std::unordered_map<std::string, double> entries, std::set<std::string> negators);

  /// `token<TAB>valence` and `token<TAB>NEG` lines; blank lines and lines
  /// starting with '#' are skipped. A file without NEG lines keeps the
  /// default negators.
  static SentimentLexicon load(const std::filesystem::path& path);
  static SentimentLexicon parse(std::string_view contents);

  std::optional<double> valence(const std::string& token) const;
  bool is_negator(const std::string& token) const { return negators_.count(token) > 0; }

  const std::unordered_map<std::string, double>& entries() const { return entries_; }
  const std::set<std::string>& negators() const { return negators_; }

  /// Same negators, every valence sign-flipped.
  SentimentLexicon negated() const;

 private:
  std::unordered_map<std::string, double> entries_;
  std::set<std::string> negators_;
};

Polarity polarity_of(double value);

SentimentScore score_sentiment(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

/// Mean value over scores with hits > 0; nullopt when there are none.
std::optional<double> average_sentiment(std::span<const SentimentScore> scores);

}  // namespace reqintel
