#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "reqintel/records.hpp"
#include "reqintel/timeutil.hpp"

namespace reqintel {

/// Filters and orders records newest first (ties by item key). Items
/// still awaiting classification only pass when no label restriction
/// applies. Throws BadRange for an inverted time range.
std::vector<JoinedRecord> apply_filter(std::span<const JoinedRecord> records,
                                       const FocusFilter& filter);

bool matches(const JoinedRecord& record, const FocusFilter& filter);

struct HeatmapGrid {
  /// [weekday Monday..Sunday][hour 0..23] in the display timezone.
  std::array<std::array<std::int64_t, 24>, 7> cells{};
  std::int64_t total = 0;
};

HeatmapGrid heatmap(std::span<const JoinedRecord> records, const FocusFilter& filter,
                    const DisplayZone& zone);

enum class TrendWindow { day, week, month };

std::string_view to_string(TrendWindow w);
std::optional<TrendWindow> parse_trend_window(std::string_view s);
std::chrono::seconds window_length(TrendWindow w);

struct WindowBounds {
  Timestamp from;
  Timestamp to;
};

/// Current = [now - W, now), previous = [now - 2W, now - W).
std::pair<WindowBounds, WindowBounds> trend_windows(TrendWindow window, Timestamp now);

struct TrendReport {
  TrendWindow window = TrendWindow::day;
  Timestamp now{};
  WindowBounds current{};
  WindowBounds previous{};
  std::int64_t problem_count = 0;
  std::int64_t inquiry_count = 0;
  std::optional<double> avg_sentiment;
  std::int64_t previous_problem_count = 0;
  std::int64_t previous_inquiry_count = 0;
  std::optional<double> previous_avg_sentiment;
  std::int64_t problem_delta = 0;
  std::int64_t inquiry_delta = 0;
  /// Undefined when either window has no sentiment-bearing items.
  std::optional<double> sentiment_delta;
};

/// The filter's own time bounds are intersected with each window.
TrendReport trend_report(std::span<const JoinedRecord> records, TrendWindow window, Timestamp now,
                         const FocusFilter& filter);

inline constexpr std::int64_t kMaxSeriesPoints = 10'000;

struct SeriesPoint {
  Timestamp bucket_start{};
  std::int64_t problem_count = 0;
  std::int64_t inquiry_count = 0;
  std::int64_t irrelevant_count = 0;
  /// Items stored before any model existed.
  std::int64_t pending_count = 0;
  std::optional<double> avg_sentiment;

  std::int64_t total() const { return problem_count + inquiry_count + irrelevant_count + pending_count; }
};

struct TimeSeries {
  Bucket bucket = Bucket::day;
  Timestamp from{};
  Timestamp to{};
  std::vector<SeriesPoint> points;
};

/// Contiguous, zero-filled buckets aligned in the display timezone and
/// covering [from, to); the first bucket may start before `from`, but only
/// items inside [from, to) are counted. Throws BadRange or TooManyBuckets.
TimeSeries time_series(std::span<const JoinedRecord> records, Timestamp from, Timestamp to,
                       Bucket bucket, const FocusFilter& filter, const DisplayZone& zone);

}  // namespace reqintel
