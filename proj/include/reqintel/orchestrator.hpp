#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqintel/active_learning.hpp"
#include "reqintel/clock.hpp"
#include "reqintel/ingestion.hpp"
#include "reqintel/sentiment.hpp"
#include "reqintel/storage.hpp"

namespace reqintel {

/// A source adapter yielding connector-format lines. fetch() throws
/// Error(connector_failure) when the source cannot be read.
class Connector {
 public:
  virtual ~Connector() = default;
  virtual const std::string& name() const = 0;
  virtual Source source_kind() const = 0;
  virtual std::vector<std::string> fetch() = 0;
};

class FileConnector final : public Connector {
 public:
  FileConnector(std::string name, std::filesystem::path path, Source kind)
      : name_(std::move(name)), path_(std::move(path)), kind_(kind) {}

  const std::string& name() const override { return name_; }
  Source source_kind() const override { return kind_; }
  std::vector<std::string> fetch() override;

 private:
  std::string name_;
  std::filesystem::path path_;
  Source kind_;
};

/// Lines supplied by the caller, e.g. an ingest request body.
class InlineConnector final : public Connector {
 public:
  InlineConnector(std::string name, Source kind, std::string body)
      : name_(std::move(name)), kind_(kind), body_(std::move(body)) {}

  const std::string& name() const override { return name_; }
  Source source_kind() const override { return kind_; }
  std::vector<std::string> fetch() override;

 private:
  std::string name_;
  Source kind_;
  std::string body_;
};

/// Splits a body into lines, dropping blank ones and trailing CRs.
std::vector<std::string> split_record_lines(std::string_view body);

struct RejectedLine {
  std::size_t line = 0;  // 1-based within the connector's fetch
  std::string error;     // ErrorCode name, e.g. "BadTimestamp"
  std::string message;
};

struct ConnectorReport {
  std::string name;
  Source source = Source::custom;
  std::int64_t fetched = 0;
  std::int64_t rejected = 0;
  std::int64_t deduplicated = 0;
  std::int64_t stored = 0;
  std::int64_t classified = 0;
  std::map<std::string, std::int64_t> rejected_by_kind;
  std::vector<RejectedLine> rejections;
  /// Set when the connector itself failed; counts are then zero.
  std::optional<std::string> failure;
};

struct PipelineReport {
  std::string run_id;
  Timestamp started_at{};
  Timestamp finished_at{};
  std::vector<ConnectorReport> connectors;
  std::int64_t stored = 0;
  std::int64_t classified = 0;
  /// Stored without a classification because no model exists yet.
  std::int64_t pending_classification = 0;
  /// Previously stored items classified at the start of this run.
  std::int64_t backfilled = 0;
  bool retrained = false;
  std::optional<std::int64_t> new_model_version;
};

inline constexpr std::int64_t kDefaultIntervalSeconds = 7200;

/// crawl -> normalize -> dedup -> classify -> score -> store, per connector.
/// Connector failures are isolated; at most one run is in flight.
class Pipeline {
 public:
  Pipeline(Store& store, ActiveLearner& learner, const SentimentLexicon& lexicon,
           Pseudonymizer pseudonymizer, Clock& clock);

  PipelineReport run(std::span<Connector* const> connectors);
  PipelineReport run(std::span<Connector* const> connectors, Timestamp now);

  /// Ingests a single connector without run-boundary work (backfill and
  /// retrain evaluation); used for manual ingestion.
  PipelineReport ingest_only(Connector& connector);

  std::optional<Timestamp> last_run() const;

 private:
  ConnectorReport ingest(Connector& connector, std::vector<std::string> lines, Timestamp now,
                         std::int64_t& pending);

  Store& store_;
  ActiveLearner& learner_;
  const SentimentLexicon& lexicon_;
  Pseudonymizer pseudonymizer_;
  Clock& clock_;
  std::mutex run_mu_;
  mutable std::mutex meta_mu_;
  std::optional<Timestamp> last_run_;
  std::int64_t run_counter_ = 0;
};

}  // namespace reqintel
