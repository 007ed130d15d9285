#include "reqintel/analytics.hpp"

#include <algorithm>

#include "reqintel/text.hpp"

namespace reqintel {

std::string_view to_string(LabelAction a) { return a == LabelAction::agree ? "agree" : "relabel"; }

std::optional<Label> JoinedRecord::effective_label() const {
  if (label_event) return label_event->assigned_label;
  if (classification) return classification->label;
  return std::nullopt;
}

void FocusFilter::validate() const {
  if (from && to && *from >= *to) throw Error(ErrorCode::bad_range, "'from' must precede 'to'");
}

std::optional<std::set<Label>> FocusFilter::effective_labels() const {
  if (!relevant_only) return labels;
  std::set<Label> relevant{Label::problem_report, Label::inquiry};
  if (!labels) return relevant;
  std::set<Label> out;
  for (Label l : *labels) {
    if (relevant.count(l)) out.insert(l);
  }
  return out;
}

namespace {

// Case-insensitive substring test; the needle is already lowercased.
bool contains_folded(std::string_view haystack, std::string_view needle_lower) {
  if (needle_lower.empty()) return true;
  return to_lower(haystack).find(needle_lower) != std::string::npos;
}

bool matches_prepared(const JoinedRecord& r, const FocusFilter& f,
                      const std::optional<std::set<Label>>& labels,
                      const std::optional<std::string>& keyword) {
  if (f.sources && !f.sources->count(r.item.source)) return false;
  if (f.languages && !f.languages->count(r.item.language)) return false;
  if (f.from && r.item.created_at < *f.from) return false;
  if (f.to && r.item.created_at >= *f.to) return false;
  if (labels) {
    const auto label = r.effective_label();
    if (!label || !labels->count(*label)) return false;
  }
  if (keyword && !contains_folded(r.item.text, *keyword)) return false;
  return true;
}

std::optional<std::string> folded_keyword(const FocusFilter& f) {
  if (!f.keyword) return std::nullopt;
  return to_lower(*f.keyword);
}

template <typename Fn>
void for_each_match(std::span<const JoinedRecord> records, const FocusFilter& filter, Fn&& fn) {
  filter.validate();
  const auto labels = filter.effective_labels();
  const auto keyword = folded_keyword(filter);
  for (const auto& r : records) {
    if (matches_prepared(r, filter, labels, keyword)) fn(r);
  }
}

}  // namespace

bool matches(const JoinedRecord& record, const FocusFilter& filter) {
  return matches_prepared(record, filter, filter.effective_labels(), folded_keyword(filter));
}

std::vector<JoinedRecord> apply_filter(std::span<const JoinedRecord> records,
                                       const FocusFilter& filter) {
  std::vector<JoinedRecord> out;
  for_each_match(records, filter, [&](const JoinedRecord& r) { out.push_back(r); });
  std::sort(out.begin(), out.end(), [](const JoinedRecord& a, const JoinedRecord& b) {
    if (a.item.created_at != b.item.created_at) return a.item.created_at > b.item.created_at;
    return a.item.key() < b.item.key();
  });
  return out;
}

HeatmapGrid heatmap(std::span<const JoinedRecord> records, const FocusFilter& filter,
                    const DisplayZone& zone) {
  HeatmapGrid grid;
  for_each_match(records, filter, [&](const JoinedRecord& r) {
    ++grid.cells[zone.weekday(r.item.created_at)][zone.hour(r.item.created_at)];
    ++grid.total;
  });
  return grid;
}

std::string_view to_string(TrendWindow w) {
  switch (w) {
    case TrendWindow::day: return "day";
    case TrendWindow::week: return "week";
    case TrendWindow::month: return "month";
  }
  return "day";
}

std::optional<TrendWindow> parse_trend_window(std::string_view s) {
  for (TrendWindow w : {TrendWindow::day, TrendWindow::week, TrendWindow::month}) {
    if (to_string(w) == s) return w;
  }
  return std::nullopt;
}

std::chrono::seconds window_length(TrendWindow w) {
  using std::chrono::hours;
  switch (w) {
    case TrendWindow::day: return hours{24};
    case TrendWindow::week: return hours{24 * 7};
    case TrendWindow::month: return hours{24 * 30};
  }
  return hours{24};
}

std::pair<WindowBounds, WindowBounds> trend_windows(TrendWindow window, Timestamp now) {
  const auto w = window_length(window);
  return {WindowBounds{now - w, now}, WindowBounds{now - 2 * w, now - w}};
}

namespace {

struct WindowTally {
  std::int64_t problems = 0;
  std::int64_t inquiries = 0;
  std::vector<SentimentScore> sentiments;
};

// Narrows the filter's own bounds to the window; nullopt if they do not meet.
std::optional<FocusFilter> restrict_to(const FocusFilter& filter, Timestamp from, Timestamp to) {
  FocusFilter f = filter;
  f.from = filter.from ? std::max(*filter.from, from) : from;
  f.to = filter.to ? std::min(*filter.to, to) : to;
  if (*f.from >= *f.to) return std::nullopt;
  return f;
}

WindowTally tally(std::span<const JoinedRecord> records, const FocusFilter& filter,
                  WindowBounds bounds) {
  WindowTally t;
  const auto f = restrict_to(filter, bounds.from, bounds.to);
  if (!f) return t;
  for_each_match(records, *f, [&](const JoinedRecord& r) {
    const auto label = r.effective_label();
    if (label == Label::problem_report) ++t.problems;
    if (label == Label::inquiry) ++t.inquiries;
    if (r.sentiment) t.sentiments.push_back(*r.sentiment);
  });
  return t;
}

}  // namespace

TrendReport trend_report(std::span<const JoinedRecord> records, TrendWindow window, Timestamp now,
                         const FocusFilter& filter) {
  filter.validate();
  TrendReport report;
  report.window = window;
  report.now = now;
  std::tie(report.current, report.previous) = trend_windows(window, now);

  const auto cur = tally(records, filter, report.current);
  const auto prev = tally(records, filter, report.previous);
  report.problem_count = cur.problems;
  report.inquiry_count = cur.inquiries;
  report.avg_sentiment = average_sentiment(cur.sentiments);
  report.previous_problem_count = prev.problems;
  report.previous_inquiry_count = prev.inquiries;
  report.previous_avg_sentiment = average_sentiment(prev.sentiments);
  report.problem_delta = cur.problems - prev.problems;
  report.inquiry_delta = cur.inquiries - prev.inquiries;
  if (report.avg_sentiment && report.previous_avg_sentiment) {
    report.sentiment_delta = *report.avg_sentiment - *report.previous_avg_sentiment;
  }
  return report;
}

TimeSeries time_series(std::span<const JoinedRecord> records, Timestamp from, Timestamp to,
                       Bucket bucket, const FocusFilter& filter, const DisplayZone& zone) {
  if (from >= to) throw Error(ErrorCode::bad_range, "'from' must precede 'to'");
  filter.validate();

  TimeSeries series;
  series.bucket = bucket;
  series.from = from;
  series.to = to;

  const Timestamp first = zone.bucket_floor(from, bucket);
  if ((to - first) / nominal_length(bucket) > kMaxSeriesPoints) {
    throw Error(ErrorCode::too_many_buckets,
                "range spans more than " + std::to_string(kMaxSeriesPoints) + " buckets");
  }
  for (Timestamp t = first; t < to; t = zone.bucket_next(t, bucket)) {
    if (static_cast<std::int64_t>(series.points.size()) >= kMaxSeriesPoints) {
      throw Error(ErrorCode::too_many_buckets,
                  "range spans more than " + std::to_string(kMaxSeriesPoints) + " buckets");
    }
    SeriesPoint point;
    point.bucket_start = t;
    series.points.push_back(point);
  }

  std::vector<std::vector<SentimentScore>> sentiments(series.points.size());
  const auto f = restrict_to(filter, from, to);
  if (f) {
    for_each_match(records, *f, [&](const JoinedRecord& r) {
      const Timestamp start = zone.bucket_floor(r.item.created_at, bucket);
      auto it = std::lower_bound(series.points.begin(), series.points.end(), start,
                                 [](const SeriesPoint& p, Timestamp s) { return p.bucket_start < s; });
      // Floors always land on a generated boundary; a miss means the zone
      // produced an irregular bucket, so fall back to the containing one.
      if (it == series.points.end() || it->bucket_start != start) {
        it = std::upper_bound(series.points.begin(), series.points.end(), r.item.created_at,
                              [](Timestamp s, const SeriesPoint& p) { return s < p.bucket_start; });
        --it;
      }
      SeriesPoint& p = *it;
      const auto label = r.effective_label();
      if (!label) {
        ++p.pending_count;
      } else if (*label == Label::problem_report) {
        ++p.problem_count;
      } else if (*label == Label::inquiry) {
        ++p.inquiry_count;
      } else {
        ++p.irrelevant_count;
      }
      if (r.sentiment) sentiments[static_cast<std::size_t>(it - series.points.begin())].push_back(*r.sentiment);
    });
  }
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    series.points[i].avg_sentiment = average_sentiment(sentiments[i]);
  }
  return series;
}

}  // namespace reqintel
