#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reqintel {

using Timestamp = std::chrono::sys_seconds;

inline Timestamp from_unix(std::int64_t secs) { return Timestamp{std::chrono::seconds{secs}}; }
inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

enum class Label : std::uint8_t { problem_report = 0, inquiry = 1, irrelevant = 2 };

inline constexpr std::size_t kLabelCount = 3;

/// Fixed label order; also the tie-break order for predictions.
inline constexpr std::array<Label, kLabelCount> kLabels{Label::problem_report, Label::inquiry,
                                                        Label::irrelevant};

inline constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);
std::optional<Label> parse_label(std::string_view s);

enum class Source : std::uint8_t { app_store = 0, microblog = 1, custom = 2 };

std::string_view to_string(Source s);
std::optional<Source> parse_source(std::string_view s);

enum class ErrorCode {
  missing_field,
  bad_timestamp,
  bad_rating,
  bad_record,
  empty_corpus,
  untrained_model,
  bad_distribution,
  not_found,
  not_uncertain,
  already_labeled,
  duplicate_label,
  unknown_label,
  empty_update,
  bad_range,
  too_many_buckets,
  storage_unavailable,
  bad_page,
  bad_interval,
  connector_failure,
  bad_config,
  bad_request,
  unauthorized,
  no_route,
};

std::string_view to_string(ErrorCode c);

/// Every module reports failures through this one exception type; the code
/// is what callers branch on, the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reqintel
