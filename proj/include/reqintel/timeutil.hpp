#pragma once

#include <string>
#include <string_view>

#include <absl/time/time.h>

#include "reqintel/core.hpp"

namespace reqintel {

/// Parses an RFC 3339 date-time ("2019-03-01T10:00:00Z", "...+02:00",
/// optional fractional seconds, which are truncated). Throws
/// Error(bad_timestamp) on anything malformed or out of range.
Timestamp parse_rfc3339(std::string_view text);

/// Always emits UTC with a trailing "Z" and whole seconds.
std::string format_rfc3339(Timestamp t);

enum class Bucket { hour, day, week };

std::string_view to_string(Bucket b);
std::optional<Bucket> parse_bucket(std::string_view s);

/// Nominal bucket length; local DST transitions can make a real bucket
/// shorter or longer.
std::chrono::seconds nominal_length(Bucket b);

/// The display timezone used by every analytics aggregation.
class DisplayZone {
 public:
  DisplayZone();  // UTC

  /// Throws Error(bad_config) for an unknown IANA name.
  static DisplayZone load(const std::string& iana_name);

  const std::string& name() const { return name_; }

  /// 0 = Monday .. 6 = Sunday, in local time.
  int weekday(Timestamp t) const;
  int hour(Timestamp t) const;

  /// Start of the local bucket containing t (weeks start on Monday).
  Timestamp bucket_floor(Timestamp t, Bucket b) const;
  /// Start of the local bucket after the one starting at `start`.
  Timestamp bucket_next(Timestamp start, Bucket b) const;

 private:
  std::string name_;
  absl::TimeZone zone_;
};

}  // namespace reqintel
