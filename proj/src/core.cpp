#include "reqintel/core.hpp"

namespace reqintel {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::problem_report: return "problem_report";
    case Label::inquiry: return "inquiry";
    case Label::irrelevant: return "irrelevant";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view s) {
  for (Label l : kLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::app_store: return "app_store";
    case Source::microblog: return "microblog";
    case Source::custom: return "custom";
  }
  return "unknown";
}

std::optional<Source> parse_source(std::string_view s) {
  for (Source src : {Source::app_store, Source::microblog, Source::custom}) {
    if (to_string(src) == s) return src;
  }
  return std::nullopt;
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::missing_field: return "MissingField";
    case ErrorCode::bad_timestamp: return "BadTimestamp";
    case ErrorCode::bad_rating: return "BadRating";
    case ErrorCode::bad_record: return "BadRecord";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::untrained_model: return "UntrainedModel";
    case ErrorCode::bad_distribution: return "BadDistribution";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::not_uncertain: return "NotUncertain";
    case ErrorCode::already_labeled: return "AlreadyLabeled";
    case ErrorCode::duplicate_label: return "DuplicateLabel";
    case ErrorCode::unknown_label: return "UnknownLabel";
    case ErrorCode::empty_update: return "EmptyUpdate";
    case ErrorCode::bad_range: return "BadRange";
    case ErrorCode::too_many_buckets: return "TooManyBuckets";
    case ErrorCode::storage_unavailable: return "StorageUnavailable";
    case ErrorCode::bad_page: return "BadPage";
    case ErrorCode::bad_interval: return "BadInterval";
    case ErrorCode::connector_failure: return "ConnectorFailure";
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::bad_request: return "BadRequest";
    case ErrorCode::unauthorized: return "Unauthorized";
    case ErrorCode::no_route: return "NoRoute";
  }
  return "Unknown";
}

}  // namespace reqintel
