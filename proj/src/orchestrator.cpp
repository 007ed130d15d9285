#include "reqintel/orchestrator.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <future>
#include <sstream>

#include "reqintel/classifier.hpp"
#include "reqintel/text.hpp"

namespace reqintel {

std::vector<std::string> split_record_lines(std::string_view body) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    std::string line(body.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> FileConnector::fetch() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::connector_failure, "cannot read " + path_.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return split_record_lines(buf.str());
}

std::vector<std::string> InlineConnector::fetch() { return split_record_lines(body_); }

Pipeline::Pipeline(Store& store, ActiveLearner& learner, const SentimentLexicon& lexicon,
                   Pseudonymizer pseudonymizer, Clock& clock)
    : store_(store), learner_(learner), lexicon_(lexicon), pseudonymizer_(std::move(pseudonymizer)), clock_(clock) {}

std::optional<Timestamp> Pipeline::last_run() const {
  std::lock_guard lock(meta_mu_);
  return last_run_;
}

PipelineReport Pipeline::run(std::span<Connector* const> connectors) { return run(connectors, clock_.now()); }

ConnectorReport Pipeline::ingest(Connector& connector, std::vector<std::string> lines, Timestamp now,
                                 std::int64_t& pending) {
  ConnectorReport rep;
  rep.name = connector.name();
  rep.source = connector.source_kind();
  rep.fetched = static_cast<std::int64_t>(lines.size());

  std::vector<FeedbackItem> valid;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      const RawRecord raw = parse_record_line(lines[i], connector.source_kind());
      valid.push_back(normalize_record(raw, pseudonymizer_, now));
    } catch (const Error& e) {
      const std::string kind(to_string(e.code()));
      ++rep.rejected;
      ++rep.rejected_by_kind[kind];
      rep.rejections.push_back(RejectedLine{i + 1, kind, e.what()});
    }
  }

  // Dedup and the classify/store tail run under the single writer lock so
  // concurrent runs, labels and retrains cannot interleave with it.
  auto lock = learner_.writer_lock();
  const auto fresh = deduplicate(valid, store_.known_identities());
  const auto model = store_.current_model();
  const bool trained = model && model->trained();

  WriteBatch batch;
  for (const auto& item : fresh) {
    const auto tokens = tokenize(item.text);
    batch.add_item(item);
    batch.put_sentiment(item.key(), score_sentiment(tokens, lexicon_));
    if (trained) {
      Classification c = predict(*model, extract_features(tokens), learner_.config().tau);
      c.item_id = item.key();
      batch.put_classification(std::move(c));
    }
  }
  const auto inserted = store_.commit(batch);
  rep.stored = static_cast<std::int64_t>(inserted.size());
  rep.deduplicated = static_cast<std::int64_t>(valid.size()) - rep.stored;
  if (trained) {
    rep.classified = rep.stored;
  } else {
    pending += rep.stored;
  }
  return rep;
}

PipelineReport Pipeline::ingest_only(Connector& connector) {
  std::lock_guard run_lock(run_mu_);
  const Timestamp now = clock_.now();
  PipelineReport report;
  {
    std::lock_guard lock(meta_mu_);
    report.run_id = "ingest-" + std::to_string(to_unix(now)) + "-" + std::to_string(++run_counter_);
  }
  report.started_at = now;
  try {
    auto rep = ingest(connector, connector.fetch(), now, report.pending_classification);
    report.stored = rep.stored;
    report.classified = rep.classified;
    report.connectors.push_back(std::move(rep));
  } catch (const Error& e) {
    ConnectorReport rep;
    rep.name = connector.name();
    rep.source = connector.source_kind();
    rep.failure = e.what();
    report.connectors.push_back(std::move(rep));
  }
  report.finished_at = std::max(now, clock_.now());
  return report;
}

PipelineReport Pipeline::run(std::span<Connector* const> connectors, Timestamp now) {
  std::lock_guard run_lock(run_mu_);
  PipelineReport report;
  {
    std::lock_guard lock(meta_mu_);
    report.run_id = "run-" + std::to_string(to_unix(now)) + "-" + std::to_string(++run_counter_);
  }
  report.started_at = now;
  report.backfilled = static_cast<std::int64_t>(learner_.reclassify_stale());

  // Fetches may block on I/O, so they run concurrently; the store tail
  // below stays serialized.
  std::vector<std::future<std::vector<std::string>>> fetches;
  fetches.reserve(connectors.size());
  for (Connector* c : connectors) {
    fetches.push_back(std::async(std::launch::async, [c] { return c->fetch(); }));
  }

  for (std::size_t i = 0; i < connectors.size(); ++i) {
    Connector& connector = *connectors[i];
    try {
      auto lines = fetches[i].get();
      auto rep = ingest(connector, std::move(lines), now, report.pending_classification);
      report.stored += rep.stored;
      report.classified += rep.classified;
      report.connectors.push_back(std::move(rep));
    } catch (const std::exception& e) {
      spdlog::warn("connector '{}' failed: {}", connector.name(), e.what());
      ConnectorReport rep;
      rep.name = connector.name();
      rep.source = connector.source_kind();
      rep.failure = e.what();
      report.connectors.push_back(std::move(rep));
    }
  }

  if (const auto retrained = learner_.retrain_if_due(true)) {
    report.retrained = true;
    report.new_model_version = retrained->new_version;
  }
  report.finished_at = std::max(now, clock_.now());
  {
    std::lock_guard lock(meta_mu_);
    last_run_ = report.finished_at;
  }
  return report;
}

}  // namespace reqintel
