#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reqintel/core.hpp"

namespace reqintel {

/// One connector record before validation. Payload values are kept as
/// text; numbers in the wire format are rendered to their decimal form.
struct RawRecord {
  Source source_kind = Source::custom;
  std::map<std::string, std::string> payload;
};

struct FeedbackItem {
  std::string id;
  Source source = Source::custom;
  std::string text;
  std::string language = "und";
  Timestamp created_at{};
  std::optional<int> rating;
  std::optional<std::string> author_ref;
  Timestamp ingested_at{};

  /// Store-wide identity, "<source>:<id>".
  std::string key() const;

  bool operator==(const FeedbackItem&) const = default;
};

std::string make_item_key(Source source, std::string_view id);

using ItemIdentity = std::pair<Source, std::string>;

/// Parses one line of the connector format (a flat JSON object). Throws
/// Error(bad_record) when the line is not an object of scalar values.
RawRecord parse_record_line(std::string_view line, Source kind);

/// Salted one-way pseudonym for author handles.
class Pseudonymizer {
 public:
  explicit Pseudonymizer(std::string salt) : salt_(std::move(salt)) {}

  /// Empty author yields nullopt; otherwise "u_" + 32 hex chars of
  /// SHA-256(salt || 0x00 || author).
  std::optional<std::string> pseudonym(std::string_view author) const;

 private:
  std::string salt_;
};

/// Maps a validated raw record onto a FeedbackItem.
///
/// Errors: MissingField (id/text/created_at absent or blank), BadTimestamp
/// (unparseable, or later than `ingested_at`), BadRating (app-store rating
/// not an integer in 1..5). Ratings on other sources are dropped.
FeedbackItem normalize_record(const RawRecord& record, const Pseudonymizer& pseudonymizer,
                              Timestamp ingested_at);

inline constexpr double kLanguageMinOverlap = 0.05;
inline constexpr std::size_t kLanguageMinTokens = 3;

/// Stopword-profile language guess ("en", "de" or "und").
std::string detect_language(std::string_view text);

/// Overlap ratio |distinct tokens in profile| / |distinct tokens| for a
/// shipped profile; exposed for diagnostics and tests.
double stopword_overlap(std::string_view text, std::string_view language);

const std::set<std::string>& stopword_profile(std::string_view language);

/// Drops candidates already in `known` and repeats within the batch,
/// keeping input order and the first occurrence.
std::vector<FeedbackItem> deduplicate(std::span<const FeedbackItem> candidates,
                                      const std::set<ItemIdentity>& known);

}  // namespace reqintel
