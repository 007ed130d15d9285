#include "reqintel/service.hpp"

#include <spdlog/spdlog.h>

namespace reqintel {

std::unique_ptr<Connector> make_file_connector(const ConnectorConfig& c) {
  if (!c.file) throw Error(ErrorCode::bad_config, "connector '" + c.name + "' has no file; URL connectors need HTTP support");
  return std::make_unique<FileConnector>(c.name, *c.file, c.kind);
}

namespace {

SentimentLexicon resolve_lexicon(const Config& config, std::optional<SentimentLexicon>& override_lexicon) {
  if (override_lexicon) return std::move(*override_lexicon);
  return SentimentLexicon::load(config.effective_lexicon_path());
}

std::vector<LabeledDocument> resolve_bootstrap(const Config& config,
                                               std::optional<std::vector<LabeledDocument>>& override_corpus) {
  if (override_corpus) return std::move(*override_corpus);
  const auto path = config.effective_bootstrap_path();
  if (!std::filesystem::exists(path)) return {};
  return load_bootstrap_file(path);
}

}  // namespace

Service::Service(Config config, ServiceDeps deps)
    : config_(std::move(config)),
      owned_clock_(deps.clock ? nullptr : std::make_unique<SystemClock>()),
      clock_(deps.clock ? deps.clock : owned_clock_.get()),
      connector_factory_(std::move(deps.connector_factory)),
      lexicon_(resolve_lexicon(config_, deps.lexicon)),
      zone_(DisplayZone::load(config_.timezone)) {
  store_ = deps.persistent ? std::make_unique<Store>(config_.storage_dir) : std::make_unique<Store>();
  learner_ = std::make_unique<ActiveLearner>(
      *store_, *clock_, ActiveLearningConfig{config_.alpha, config_.tau, config_.batch_size, config_.queue_limit},
      resolve_bootstrap(config_, deps.bootstrap));
  pipeline_ = std::make_unique<Pipeline>(*store_, *learner_, lexicon_, Pseudonymizer(config_.pseudonym_salt), *clock_);
}

Service::~Service() { wait_background(); }

PipelineReport Service::run_once() {
  std::vector<std::unique_ptr<Connector>> owned;
  std::vector<Connector*> connectors;
  for (const auto& c : config_.connectors) {
    owned.push_back(connector_factory_(c));
    connectors.push_back(owned.back().get());
  }
  return pipeline_->run(connectors);
}

PipelineReport Service::run_with(std::span<Connector* const> connectors) { return pipeline_->run(connectors); }

void Service::request_retrain_if_due() {
  if (static_cast<std::int64_t>(learner_->pending_events().size()) < config_.batch_size) return;
  std::lock_guard lock(background_mu_);
  if (background_.joinable()) background_.join();
  background_ = std::jthread([this] {
    try {
      if (const auto r = learner_->retrain_if_due(false)) {
        spdlog::info("retrained to model version {} from {} labels", r->new_version, r->events_applied);
      }
    } catch (const std::exception& e) {
      spdlog::error("background retrain failed: {}", e.what());
    }
  });
}

void Service::wait_background() {
  std::lock_guard lock(background_mu_);
  if (background_.joinable()) background_.join();
}

std::optional<std::int64_t> Service::model_version() const {
  const auto m = store_->current_model();
  if (!m) return std::nullopt;
  return m->version;
}

}  // namespace reqintel
