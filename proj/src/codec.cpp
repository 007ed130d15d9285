#include "reqintel/codec.hpp"

#include "reqintel/timeutil.hpp"

namespace reqintel {

namespace {

Label label_field(const json& j, const char* key) {
  const auto l = parse_label(j.at(key).get<std::string>());
  if (!l) throw Error(ErrorCode::bad_record, std::string("bad label in field ") + key);
  return *l;
}

Timestamp time_field(const json& j, const char* key) { return from_unix(j.at(key).get<std::int64_t>()); }

}  // namespace

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Store-side encodings keep timestamps as integer seconds; the API view
// (to_json(JoinedRecord) and the dashboard types) renders RFC 3339.

json to_json(const FeedbackItem& item) {
  json j{{"id", item.id},
         {"source", to_string(item.source)},
         {"text", item.text},
         {"language", item.language},
         {"created_at", to_unix(item.created_at)},
         {"ingested_at", to_unix(item.ingested_at)}};
  j["rating"] = item.rating ? json(*item.rating) : json(nullptr);
  j["author_ref"] = item.author_ref ? json(*item.author_ref) : json(nullptr);
  return j;
}

FeedbackItem feedback_item_from_json(const json& j) {
  FeedbackItem item;
  item.id = j.at("id").get<std::string>();
  const auto src = parse_source(j.at("source").get<std::string>());
  if (!src) throw Error(ErrorCode::bad_record, "bad source");
  item.source = *src;
  item.text = j.at("text").get<std::string>();
  item.language = j.at("language").get<std::string>();
  item.created_at = time_field(j, "created_at");
  item.ingested_at = time_field(j, "ingested_at");
  if (j.contains("rating") && !j["rating"].is_null()) item.rating = j["rating"].get<int>();
  if (j.contains("author_ref") && !j["author_ref"].is_null()) {
    item.author_ref = j["author_ref"].get<std::string>();
  }
  return item;
}

json to_json(const ClassProbabilities& p) {
  json j = json::object();
  for (Label l : kLabels) j[std::string(to_string(l))] = p[index_of(l)];
  return j;
}

json to_json(const Classification& c) {
  return json{{"item_id", c.item_id},
              {"label", to_string(c.label)},
              {"probabilities", to_json(c.probabilities)},
              {"margin", c.margin},
              {"uncertain", c.uncertain},
              {"model_version", c.model_version},
              {"ground_truth", c.ground_truth}};
}

Classification classification_from_json(const json& j) {
  Classification c;
  c.item_id = j.at("item_id").get<std::string>();
  c.label = label_field(j, "label");
  for (Label l : kLabels) c.probabilities[index_of(l)] = j.at("probabilities").at(std::string(to_string(l))).get<double>();
  c.margin = j.at("margin").get<double>();
  c.uncertain = j.at("uncertain").get<bool>();
  c.model_version = j.at("model_version").get<std::int64_t>();
  c.ground_truth = j.value("ground_truth", false);
  return c;
}

json to_json(const SentimentScore& s) {
  return json{{"value", s.value}, {"polarity", to_string(s.polarity)}, {"hits", s.hits}};
}

SentimentScore sentiment_from_json(const json& j) {
  SentimentScore s;
  s.value = j.at("value").get<double>();
  s.hits = j.at("hits").get<int>();
  s.polarity = polarity_of(s.value);
  if (s.hits == 0) s.polarity = Polarity::neutral;
  return s;
}

json to_json(const LabelEvent& e) {
  return json{{"item_id", e.item_id},
              {"assigned_label", to_string(e.assigned_label)},
              {"action", to_string(e.action)},
              {"prior_label", to_string(e.prior_label)},
              {"actor", e.actor},
              {"decided_at", to_unix(e.decided_at)},
              {"model_version_at_decision", e.model_version_at_decision}};
}

LabelEvent label_event_from_json(const json& j) {
  LabelEvent e;
  e.item_id = j.at("item_id").get<std::string>();
  e.assigned_label = label_field(j, "assigned_label");
  e.prior_label = label_field(j, "prior_label");
  e.action = j.at("action").get<std::string>() == "agree" ? LabelAction::agree : LabelAction::relabel;
  e.actor = j.at("actor").get<std::string>();
  e.decided_at = time_field(j, "decided_at");
  e.model_version_at_decision = j.at("model_version_at_decision").get<std::int64_t>();
  return e;
}

json to_json(const ModelSnapshot& m) {
  json classes = json::object();
  for (Label l : kLabels) {
    const std::size_t c = index_of(l);
    classes[std::string(to_string(l))] = json{{"doc_count", m.class_doc_counts[c]},
                                              {"token_total", m.class_token_totals[c]},
                                              {"token_counts", m.class_token_counts[c]}};
  }
  return json{{"version", m.version}, {"alpha", m.alpha}, {"vocabulary", m.vocabulary}, {"classes", classes}};
}

ModelSnapshot model_from_json(const json& j) {
  ModelSnapshot m;
  m.version = j.at("version").get<std::int64_t>();
  m.alpha = j.at("alpha").get<double>();
  m.vocabulary = j.at("vocabulary").get<std::set<std::string>>();
  for (Label l : kLabels) {
    const std::size_t c = index_of(l);
    const json& cls = j.at("classes").at(std::string(to_string(l)));
    m.class_doc_counts[c] = cls.at("doc_count").get<std::int64_t>();
    m.class_token_totals[c] = cls.at("token_total").get<std::int64_t>();
    m.class_token_counts[c] = cls.at("token_counts").get<std::map<std::string, std::int64_t>>();
  }
  return m;
}

namespace {

json api_item(const FeedbackItem& item) {
  json j = to_json(item);
  j["created_at"] = format_rfc3339(item.created_at);
  j["ingested_at"] = format_rfc3339(item.ingested_at);
  j["key"] = item.key();
  return j;
}

}  // namespace

json to_json(const JoinedRecord& r) {
  json j{{"item", api_item(r.item)}};
  j["classification"] = r.classification ? to_json(*r.classification) : json(nullptr);
  j["sentiment"] = r.sentiment ? to_json(*r.sentiment) : json(nullptr);
  if (r.label_event) {
    json e = to_json(*r.label_event);
    e["decided_at"] = format_rfc3339(r.label_event->decided_at);
    j["label_event"] = e;
  } else {
    j["label_event"] = nullptr;
  }
  const auto eff = r.effective_label();
  j["effective_label"] = eff ? json(to_string(*eff)) : json(nullptr);
  return j;
}

json to_json(const HeatmapGrid& g) {
  json cells = json::array();
  for (const auto& row : g.cells) cells.push_back(row);
  return json{{"rows", {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"}},
              {"cells", cells},
              {"total", g.total}};
}

json to_json(const TrendReport& t) {
  auto bounds = [](const WindowBounds& b) {
    return json{{"from", format_rfc3339(b.from)}, {"to", format_rfc3339(b.to)}};
  };
  return json{{"window", to_string(t.window)},
              {"now", format_rfc3339(t.now)},
              {"current", bounds(t.current)},
              {"previous", bounds(t.previous)},
              {"problem_count", t.problem_count},
              {"inquiry_count", t.inquiry_count},
              {"avg_sentiment", optional_number(t.avg_sentiment)},
              {"previous_values",
               {{"problem_count", t.previous_problem_count},
                {"inquiry_count", t.previous_inquiry_count},
                {"avg_sentiment", optional_number(t.previous_avg_sentiment)}}},
              {"deltas",
               {{"problem_count", t.problem_delta},
                {"inquiry_count", t.inquiry_delta},
                {"avg_sentiment", optional_number(t.sentiment_delta)}}}};
}

json to_json(const TimeSeries& s) {
  json points = json::array();
  for (const auto& p : s.points) {
    points.push_back(json{{"bucket_start", format_rfc3339(p.bucket_start)},
                          {"problem_count", p.problem_count},
                          {"inquiry_count", p.inquiry_count},
                          {"irrelevant_count", p.irrelevant_count},
                          {"pending_count", p.pending_count},
                          {"avg_sentiment", optional_number(p.avg_sentiment)}});
  }
  return json{{"bucket", to_string(s.bucket)},
              {"from", format_rfc3339(s.from)},
              {"to", format_rfc3339(s.to)},
              {"points", points}};
}

json to_json(const ConnectorReport& r) {
  json rejections = json::array();
  for (const auto& rej : r.rejections) {
    rejections.push_back(json{{"line", rej.line}, {"error", rej.error}, {"message", rej.message}});
  }
  return json{{"name", r.name},
              {"source", to_string(r.source)},
              {"fetched", r.fetched},
              {"rejected", r.rejected},
              {"deduplicated", r.deduplicated},
              {"stored", r.stored},
              {"classified", r.classified},
              {"rejected_by_kind", r.rejected_by_kind},
              {"rejections", rejections},
              {"failure", r.failure ? json(*r.failure) : json(nullptr)}};
}

json to_json(const PipelineReport& r) {
  json connectors = json::array();
  for (const auto& c : r.connectors) connectors.push_back(to_json(c));
  return json{{"run_id", r.run_id},
              {"started_at", format_rfc3339(r.started_at)},
              {"finished_at", format_rfc3339(r.finished_at)},
              {"connectors", connectors},
              {"stored", r.stored},
              {"classified", r.classified},
              {"pending_classification", r.pending_classification},
              {"backfilled", r.backfilled},
              {"retrained", r.retrained},
              {"new_model_version", r.new_model_version ? json(*r.new_model_version) : json(nullptr)}};
}

}  // namespace reqintel
