#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "reqintel/active_learning.hpp"
#include "reqintel/clock.hpp"
#include "reqintel/config.hpp"
#include "reqintel/orchestrator.hpp"
#include "reqintel/sentiment.hpp"
#include "reqintel/storage.hpp"
#include "reqintel/timeutil.hpp"

namespace reqintel {

using ConnectorFactory = std::function<std::unique_ptr<Connector>(const ConnectorConfig&)>;

/// Builds file connectors; URL connectors need the HTTP-enabled factory.
std::unique_ptr<Connector> make_file_connector(const ConnectorConfig& c);

struct ServiceDeps {
  Clock* clock = nullptr;             // defaults to a SystemClock
  bool persistent = true;             // false: volatile store, no log
  std::optional<SentimentLexicon> lexicon;          // overrides the lexicon file
  std::optional<std::vector<LabeledDocument>> bootstrap;  // overrides the bootstrap file
  ConnectorFactory connector_factory = make_file_connector;
};

/// Wires storage, learner, pipeline and analytics settings together.
class Service {
 public:
  explicit Service(Config config, ServiceDeps deps = {});
  ~Service();

  const Config& config() const { return config_; }
  Clock& clock() { return *clock_; }
  Store& store() { return *store_; }
  ActiveLearner& learner() { return *learner_; }
  Pipeline& pipeline() { return *pipeline_; }
  const SentimentLexicon& lexicon() const { return lexicon_; }
  const DisplayZone& zone() const { return zone_; }

  /// One pipeline run over the configured connectors.
  PipelineReport run_once();
  PipelineReport run_with(std::span<Connector* const> connectors);

  /// Retrains off the request path once enough labels are pending.
  void request_retrain_if_due();
  /// Waits for a background retrain started by request_retrain_if_due.
  void wait_background();

  std::optional<std::int64_t> model_version() const;

 private:
  Config config_;
  std::unique_ptr<SystemClock> owned_clock_;
  Clock* clock_;
  ConnectorFactory connector_factory_;
  SentimentLexicon lexicon_;
  DisplayZone zone_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<ActiveLearner> learner_;
  std::unique_ptr<Pipeline> pipeline_;
  std::mutex background_mu_;
  std::jthread background_;
};

}  // namespace reqintel
