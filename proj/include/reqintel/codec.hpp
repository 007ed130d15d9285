#pragma once

#include <nlohmann/json.hpp>

#include "reqintel/analytics.hpp"
#include "reqintel/classifier.hpp"
#include "reqintel/ingestion.hpp"
#include "reqintel/orchestrator.hpp"
#include "reqintel/records.hpp"
#include "reqintel/sentiment.hpp"

// JSON mapping shared by the store log and the HTTP API. Store records
// keep timestamps as integer seconds; API views (joined records, dashboard
// aggregates, reports) render RFC 3339. Undefined averages are null.
namespace reqintel {

using nlohmann::json;

json to_json(const FeedbackItem& item);
FeedbackItem feedback_item_from_json(const json& j);

json to_json(const ClassProbabilities& p);
json to_json(const Classification& c);
Classification classification_from_json(const json& j);

json to_json(const SentimentScore& s);
SentimentScore sentiment_from_json(const json& j);

json to_json(const LabelEvent& e);
LabelEvent label_event_from_json(const json& j);

json to_json(const ModelSnapshot& m);
ModelSnapshot model_from_json(const json& j);

json to_json(const JoinedRecord& r);
json to_json(const HeatmapGrid& g);
json to_json(const TrendReport& t);
json to_json(const TimeSeries& s);

json to_json(const ConnectorReport& r);
json to_json(const PipelineReport& r);

json optional_number(const std::optional<double>& v);

}  // namespace reqintel
