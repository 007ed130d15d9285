#include "reqintel/api.hpp"

#include <spdlog/spdlog.h>

#include <charconv>

#include "reqintel/analytics.hpp"
#include "reqintel/codec.hpp"
#include "reqintel/text.hpp"
#include "reqintel/timeutil.hpp"

namespace reqintel {

ApiErrorMapping api_error_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::missing_field: return {400, "MISSING_FIELD"};
    case ErrorCode::bad_timestamp: return {400, "BAD_TIMESTAMP"};
    case ErrorCode::bad_rating: return {400, "BAD_RATING"};
    case ErrorCode::bad_record: return {400, "BAD_RECORD"};
    case ErrorCode::empty_corpus: return {422, "EMPTY_CORPUS"};
    case ErrorCode::untrained_model: return {409, "UNTRAINED_MODEL"};
    case ErrorCode::bad_distribution: return {500, "BAD_DISTRIBUTION"};
    case ErrorCode::not_found: return {404, "NOT_FOUND"};
    case ErrorCode::not_uncertain: return {409, "NOT_UNCERTAIN"};
    case ErrorCode::already_labeled: return {409, "ALREADY_LABELED"};
    case ErrorCode::duplicate_label: return {409, "DUPLICATE_LABEL"};
    case ErrorCode::unknown_label: return {400, "UNKNOWN_LABEL"};
    case ErrorCode::empty_update: return {409, "EMPTY_UPDATE"};
    case ErrorCode::bad_range: return {400, "BAD_RANGE"};
    case ErrorCode::too_many_buckets: return {400, "TOO_MANY_BUCKETS"};
    case ErrorCode::storage_unavailable: return {503, "STORAGE_UNAVAILABLE"};
    case ErrorCode::bad_page: return {400, "BAD_PAGE"};
    case ErrorCode::bad_interval: return {400, "BAD_INTERVAL"};
    case ErrorCode::connector_failure: return {502, "CONNECTOR_FAILURE"};
    case ErrorCode::bad_config: return {500, "BAD_CONFIG"};
    case ErrorCode::bad_request: return {400, "BAD_REQUEST"};
    case ErrorCode::unauthorized: return {401, "UNAUTHORIZED"};
    case ErrorCode::no_route: return {404, "NO_ROUTE"};
  }
  return {500, "INTERNAL"};
}

const std::vector<RouteInfo>& api_routes() {
  static const std::vector<RouteInfo> routes{
      {"GET", "/api/v1/health", false},
      {"GET", "/api/v1/dashboard/heatmap", false},
      {"GET", "/api/v1/dashboard/trends", false},
      {"GET", "/api/v1/dashboard/history", false},
      {"GET", "/api/v1/focus/problems", false},
      {"GET", "/api/v1/focus/inquiries", false},
      {"GET", "/api/v1/review/queue", false},
      {"POST", "/api/v1/feedback/{id}/label", true},
      {"POST", "/api/v1/ingest", true},
      {"POST", "/api/v1/pipeline/run", true},
  };
  return routes;
}

namespace {

constexpr std::string_view kPrefix = "/api/v1";
constexpr std::int64_t kDefaultPageLimit = 50;

[[noreturn]] void bad_request(const std::string& msg) { throw Error(ErrorCode::bad_request, msg); }

ApiResponse json_response(int status, const json& body) {
  ApiResponse r;
  r.status = status;
  r.body = body.dump();
  r.headers["Content-Type"] = "application/json";
  return r;
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, json{{"error", {{"status", status}, {"code", code}, {"message", message}}}});
}

class Query {
 public:
  explicit Query(const std::multimap<std::string, std::string>& q) : q_(q) {}

  std::optional<std::string> get(const std::string& key) const {
    auto it = q_.find(key);
    if (it == q_.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  /// Repeated keys and comma-separated values both accumulate.
  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    auto [lo, hi] = q_.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      std::size_t start = 0;
      const std::string& v = it->second;
      while (start <= v.size()) {
        auto comma = v.find(',', start);
        if (comma == std::string::npos) comma = v.size();
        std::string part = trim(v.substr(start, comma - start));
        if (!part.empty()) out.push_back(std::move(part));
        start = comma + 1;
      }
    }
    return out;
  }

  std::optional<Timestamp> time(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    return parse_rfc3339(*v);
  }

  std::optional<std::int64_t> integer(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) bad_request("'" + key + "' must be an integer");
    return out;
  }

  bool flag(const std::string& key) const {
    const auto v = get(key);
    if (!v || *v == "false" || *v == "0") return false;
    if (*v == "true" || *v == "1") return true;
    bad_request("'" + key + "' must be true or false");
  }

 private:
  const std::multimap<std::string, std::string>& q_;
};

FocusFilter parse_filter(const Query& q, bool allow_labels) {
  FocusFilter f;
  f.keyword = q.get("keyword");
  if (auto sources = q.list("sources"); !sources.empty()) {
    f.sources.emplace();
    for (const auto& s : sources) {
      const auto src = parse_source(s);
      if (!src) bad_request("unknown source '" + s + "'");
      f.sources->insert(*src);
    }
  }
  if (auto langs = q.list("languages"); !langs.empty()) {
    f.languages.emplace();
    for (const auto& l : langs) f.languages->insert(to_lower(l));
  }
  f.from = q.time("from");
  f.to = q.time("to");
  if (allow_labels) {
    if (auto labels = q.list("labels"); !labels.empty()) {
      f.labels.emplace();
      for (const auto& l : labels) {
        const auto label = parse_label(l);
        if (!label) throw Error(ErrorCode::unknown_label, "unknown label '" + l + "'");
        f.labels->insert(*label);
      }
    }
    f.relevant_only = q.flag("relevant_only");
  }
  f.validate();
  return f;
}

json review_affordance(const JoinedRecord& r) {
  const bool uncertain = r.classification && r.classification->uncertain && !r.classification->ground_truth;
  const bool labelable = uncertain && !r.label_event;
  json relabels = json::array();
  if (labelable) {
    for (Label l : allowed_relabels(r.classification->label)) relabels.push_back(to_string(l));
  }
  return json{{"uncertain", uncertain}, {"labelable", labelable}, {"allowed_relabels", relabels}};
}

json to_json(const ReviewCandidate& c) {
  json relabels = json::array();
  for (Label l : c.allowed_relabels) relabels.push_back(to_string(l));
  return json{{"item_id", c.item_id},
              {"excerpt", c.excerpt},
              {"created_at", format_rfc3339(c.created_at)},
              {"classification", to_json(c.classification)},
              {"allowed_relabels", relabels}};
}

// Splits "/api/v1/feedback/{id}/label" into the id, or nullopt.
std::optional<std::string> label_route_id(std::string_view path) {
  constexpr std::string_view head = "/api/v1/feedback/";
  constexpr std::string_view tail = "/label";
  if (path.size() <= head.size() + tail.size()) return std::nullopt;
  if (path.substr(0, head.size()) != head || path.substr(path.size() - tail.size()) != tail) return std::nullopt;
  std::string id(path.substr(head.size(), path.size() - head.size() - tail.size()));
  if (id.empty() || id.find('/') != std::string::npos) return std::nullopt;
  return id;
}

}  // namespace

ApiResponse ApiRouter::handle(const ApiRequest& request) {
  ApiResponse response;
  try {
    response = dispatch(request);
  } catch (const Error& e) {
    const auto m = api_error_for(e.code());
    response = error_response(m.status, m.code, e.what());
  } catch (const json::exception& e) {
    response = error_response(400, "BAD_REQUEST", std::string("malformed JSON body: ") + e.what());
  } catch (const std::exception& e) {
    spdlog::error("{} {} failed: {}", request.method, request.path, e.what());
    response = error_response(500, "INTERNAL", "internal error");
  }
  if (!service_.config().cors_origin.empty()) {
    response.headers["Access-Control-Allow-Origin"] = service_.config().cors_origin;
  }
  return response;
}

ApiResponse ApiRouter::dispatch(const ApiRequest& req) {
  const std::string& path = req.path;
  const Query q(req.query);
  const Config& cfg = service_.config();

  if (req.method == "OPTIONS") {
    ApiResponse r;
    r.status = 204;
    r.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
    r.headers["Access-Control-Allow-Headers"] = "Authorization, Content-Type";
    return r;
  }

  const RouteInfo* route = nullptr;
  const auto label_id = label_route_id(path);
  for (const auto& r : api_routes()) {
    if (r.method != req.method) continue;
    if (r.pattern == path || (label_id && r.pattern == "/api/v1/feedback/{id}/label")) {
      route = &r;
      break;
    }
  }
  if (!route) {
    throw Error(ErrorCode::no_route, "no route for " + req.method + " " + path);
  }

  if (!cfg.api_token.empty() && (route->mutating || cfg.auth_reads)) {
    auto it = req.headers.find("authorization");
    if (it == req.headers.end() || it->second != "Bearer " + cfg.api_token) {
      throw Error(ErrorCode::unauthorized, "missing or invalid bearer token");
    }
  }

  const std::string_view pattern = route->pattern;
  Store& store = service_.store();

  if (pattern == "/api/v1/health") {
    const auto version = service_.model_version();
    const auto last = service_.pipeline().last_run();
    return json_response(200, json{{"status", "ok"},
                                   {"model_version", version ? json(*version) : json(nullptr)},
                                   {"last_run", last ? json(format_rfc3339(*last)) : json(nullptr)},
                                   {"items", store.item_count()},
                                   {"pending_labels", service_.learner().pending_events().size()}});
  }

  if (pattern == "/api/v1/dashboard/heatmap") {
    const auto filter = parse_filter(q, true);
    const auto records = store.records();
    json body = to_json(heatmap(records, filter, service_.zone()));
    body["timezone"] = service_.zone().name();
    return json_response(200, body);
  }

  if (pattern == "/api/v1/dashboard/trends") {
    const auto window_name = q.get("window");
    if (!window_name) bad_request("'window' is required (day, week or month)");
    const auto window = parse_trend_window(*window_name);
    if (!window) bad_request("unknown window '" + *window_name + "'");
    const Timestamp now = q.time("now").value_or(service_.clock().now());
    const auto filter = parse_filter(q, true);
    const auto records = store.records();
    return json_response(200, to_json(trend_report(records, *window, now, filter)));
  }

  if (pattern == "/api/v1/dashboard/history") {
    const auto from = q.time("from");
    const auto to = q.time("to");
    if (!from || !to) bad_request("'from' and 'to' are required");
    Bucket bucket = Bucket::day;
    if (const auto b = q.get("bucket")) {
      const auto parsed = parse_bucket(*b);
      if (!parsed) bad_request("unknown bucket '" + *b + "'");
      bucket = *parsed;
    }
    if (*from >= *to) throw Error(ErrorCode::bad_range, "'from' must precede 'to'");
    FocusFilter filter = parse_filter(Query(req.query), true);
    // from/to select the series range, not an extra filter conjunct.
    filter.from.reset();
    filter.to.reset();
    const auto records = store.records();
    json body = to_json(time_series(records, *from, *to, bucket, filter, service_.zone()));
    body["timezone"] = service_.zone().name();
    return json_response(200, body);
  }

  if (pattern == "/api/v1/focus/problems" || pattern == "/api/v1/focus/inquiries") {
    FocusFilter filter = parse_filter(q, false);
    filter.labels = std::set<Label>{pattern == "/api/v1/focus/problems" ? Label::problem_report : Label::inquiry};
    const auto offset = q.integer("offset").value_or(0);
    const auto limit = q.integer("limit").value_or(kDefaultPageLimit);
    const Page page = store.query(filter, offset, limit);
    json items = json::array();
    for (const auto& r : page.records) {
      json j = to_json(r);
      j["review"] = review_affordance(r);
      items.push_back(std::move(j));
    }
    return json_response(200, json{{"total", page.total},
                                   {"offset", page.offset},
                                   {"limit", page.limit},
                                   {"view", pattern == "/api/v1/focus/problems" ? "problems" : "inquiries"},
                                   {"items", items}});
  }

  if (pattern == "/api/v1/review/queue") {
    const auto filter = parse_filter(q, false);
    const auto limit = q.integer("limit").value_or(cfg.queue_limit);
    const auto queue = service_.learner().uncertain_queue(filter, limit);
    json items = json::array();
    for (const auto& c : queue) items.push_back(to_json(c));
    return json_response(200, json{{"model_version", service_.model_version().value_or(0)},
                                   {"queue_limit", cfg.queue_limit},
                                   {"items", items}});
  }

  if (pattern == "/api/v1/feedback/{id}/label") {
    const json body = json::parse(req.body.empty() ? std::string("{}") : req.body);
    if (!body.is_object() || !body.contains("label") || !body["label"].is_string()) {
      bad_request("body must be an object with a string 'label'");
    }
    const std::string actor = body.contains("actor") && body["actor"].is_string() ? body["actor"].get<std::string>()
                                                                                 : std::string("anonymous");
    const LabelEvent e = service_.learner().apply_label(*label_id, body["label"].get<std::string>(), actor);
    service_.request_retrain_if_due();
    json out = to_json(e);
    out["decided_at"] = format_rfc3339(e.decided_at);
    return json_response(200, out);
  }

  if (pattern == "/api/v1/ingest") {
    Source kind = Source::custom;
    if (const auto k = q.get("source_kind")) {
      const auto parsed = parse_source(*k);
      if (!parsed) bad_request("unknown source kind '" + *k + "'");
      kind = *parsed;
    }
    InlineConnector connector(q.get("name").value_or("api"), kind, req.body);
    const PipelineReport report = service_.pipeline().ingest_only(connector);
    const bool partial = !report.connectors.empty() && report.connectors.front().rejected > 0;
    return json_response(partial ? 207 : 200, to_json(report));
  }

  if (pattern == "/api/v1/pipeline/run") {
    return json_response(200, to_json(service_.run_once()));
  }

  throw Error(ErrorCode::no_route, "no route for " + req.method + " " + path);
}

}  // namespace reqintel
