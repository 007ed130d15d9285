#include "reqintel/timeutil.hpp"

#include <absl/time/civil_time.h>

#include <cctype>
#include <cstdio>

namespace reqintel {

namespace {

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::bad_timestamp, "unparseable timestamp '" + std::string(text) + "'");
}

// Reads exactly `width` digits at `pos`.
int digits(std::string_view s, std::size_t& pos, std::size_t width, std::string_view whole) {
  if (pos + width > s.size()) bad(whole);
  int v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) bad(whole);
    v = v * 10 + (c - '0');
  }
  pos += width;
  return v;
}

void expect(std::string_view s, std::size_t& pos, char c, std::string_view whole) {
  if (pos >= s.size() || s[pos] != c) bad(whole);
  ++pos;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
  std::size_t pos = 0;
  const int year = digits(text, pos, 4, text);
  expect(text, pos, '-', text);
  const int month = digits(text, pos, 2, text);
  expect(text, pos, '-', text);
  const int day = digits(text, pos, 2, text);
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) bad(text);
  ++pos;
  const int hour = digits(text, pos, 2, text);
  expect(text, pos, ':', text);
  const int minute = digits(text, pos, 2, text);
  expect(text, pos, ':', text);
  const int second = digits(text, pos, 2, text);
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) bad(text);
  }
  if (pos >= text.size()) bad(text);

  int offset_minutes = 0;
  const char zone = text[pos++];
  if (zone == 'Z' || zone == 'z') {
    // UTC
  } else if (zone == '+' || zone == '-') {
    const int oh = digits(text, pos, 2, text);
    expect(text, pos, ':', text);
    const int om = digits(text, pos, 2, text);
    if (oh > 23 || om > 59) bad(text);
    offset_minutes = (zone == '+' ? 1 : -1) * (oh * 60 + om);
  } else {
    bad(text);
  }
  if (pos != text.size()) bad(text);

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) bad(text);

  const auto local = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
  return time_point_cast<seconds>(local - minutes{offset_minutes});
}

std::string format_rfc3339(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::hour: return "hour";
    case Bucket::day: return "day";
    case Bucket::week: return "week";
  }
  return "unknown";
}

std::optional<Bucket> parse_bucket(std::string_view s) {
  for (Bucket b : {Bucket::hour, Bucket::day, Bucket::week}) {
    if (to_string(b) == s) return b;
  }
  return std::nullopt;
}

std::chrono::seconds nominal_length(Bucket b) {
  using namespace std::chrono;
  switch (b) {
    case Bucket::hour: return hours{1};
    case Bucket::day: return hours{24};
    case Bucket::week: return hours{24 * 7};
  }
  return hours{1};
}

DisplayZone::DisplayZone() : name_("UTC"), zone_(absl::UTCTimeZone()) {}

DisplayZone DisplayZone::load(const std::string& iana_name) {
  DisplayZone z;
  if (!absl::LoadTimeZone(iana_name, &z.zone_)) {
    throw Error(ErrorCode::bad_config, "unknown timezone '" + iana_name + "'");
  }
  z.name_ = iana_name;
  return z;
}

namespace {

absl::Time to_absl(Timestamp t) { return absl::FromUnixSeconds(to_unix(t)); }
Timestamp from_absl(absl::Time t) { return from_unix(absl::ToUnixSeconds(t)); }

int weekday_index(absl::Weekday w) {
  switch (w) {
    case absl::Weekday::monday: return 0;
    case absl::Weekday::tuesday: return 1;
    case absl::Weekday::wednesday: return 2;
    case absl::Weekday::thursday: return 3;
    case absl::Weekday::friday: return 4;
    case absl::Weekday::saturday: return 5;
    case absl::Weekday::sunday: return 6;
  }
  return 0;
}

}  // namespace

int DisplayZone::weekday(Timestamp t) const {
  return weekday_index(absl::GetWeekday(absl::ToCivilDay(to_absl(t), zone_)));
}

int DisplayZone::hour(Timestamp t) const { return absl::ToCivilHour(to_absl(t), zone_).hour(); }

namespace {

// Latest instant <= at whose local wall time is `cs`; for a skipped wall
// time the transition instant stands in.
template <typename Civil>
absl::Time resolve_start(const absl::TimeZone& zone, Civil cs, absl::Time at) {
  const auto info = zone.At(cs);
  switch (info.kind) {
    case absl::TimeZone::TimeInfo::UNIQUE: return info.pre;
    case absl::TimeZone::TimeInfo::SKIPPED: return info.trans;
    case absl::TimeZone::TimeInfo::REPEATED: return info.post <= at ? info.post : info.pre;
  }
  return info.pre;
}

}  // namespace

Timestamp DisplayZone::bucket_floor(Timestamp t, Bucket b) const {
  const absl::Time at = to_absl(t);
  switch (b) {
    case Bucket::hour:
      return from_absl(resolve_start(zone_, absl::ToCivilHour(at, zone_), at));
    case Bucket::day:
      return from_absl(resolve_start(zone_, absl::ToCivilDay(at, zone_), at));
    case Bucket::week: {
      absl::CivilDay d = absl::ToCivilDay(at, zone_);
      d -= weekday_index(absl::GetWeekday(d));
      return from_absl(resolve_start(zone_, d, at));
    }
  }
  return t;
}

Timestamp DisplayZone::bucket_next(Timestamp start, Bucket b) const {
  using std::chrono::hours;
  // Local days and weeks stretch by at most an hour across DST, so a probe
  // one hour past the nominal end always lands in the following bucket.
  const hours probe = b == Bucket::hour ? hours{1} : std::chrono::duration_cast<hours>(nominal_length(b)) + hours{1};
  const Timestamp next = bucket_floor(start + probe, b);
  return next > start ? next : start + nominal_length(b);
}

}  // namespace reqintel
