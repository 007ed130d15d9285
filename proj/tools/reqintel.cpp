#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>
#include <thread>

#include "reqintel/codec.hpp"
#include "reqintel/http.hpp"
#include "reqintel/scheduler.hpp"
#include "reqintel/service.hpp"

using namespace reqintel;

namespace {

std::atomic<HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

ServiceDeps cli_deps() {
  ServiceDeps deps;
  deps.connector_factory = make_connector;
  return deps;
}

int serve(const std::filesystem::path& config_path) {
  Service service(Config::load(config_path), cli_deps());
  const auto [host, port] = parse_bind(service.config().bind);

  auto scheduler = schedule(service.clock(), std::chrono::seconds(service.config().interval_seconds),
                            [&service](Timestamp) {
                              try {
                                const auto report = service.run_once();
                                spdlog::info("run {} stored {} classified {}", report.run_id, report.stored,
                                             report.classified);
                              } catch (const std::exception& e) {
                                spdlog::error("scheduled run failed: {}", e.what());
                              }
                            });

  HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("listening on {}:{}", host, port);
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  scheduler->stop();
  service.wait_background();
  if (!ok) {
    spdlog::error("could not bind {}:{}", host, port);
    return 1;
  }
  return 0;
}

int run_once(const std::filesystem::path& config_path, const std::string& source_file, const std::string& source_kind) {
  Service service(Config::load(config_path), cli_deps());
  PipelineReport report;
  if (!source_file.empty()) {
    const auto kind = parse_source(source_kind);
    if (!kind) throw Error(ErrorCode::bad_config, "unknown source kind '" + source_kind + "'");
    FileConnector connector("cli", source_file, *kind);
    Connector* connectors[] = {&connector};
    report = service.run_with(connectors);
  } else {
    report = service.run_once();
  }
  service.wait_background();
  std::cout << to_json(report).dump(2) << "\n";
  for (const auto& c : report.connectors) {
    if (c.failure) return 2;
  }
  return 0;
}

int train(const std::string& config_path, const std::filesystem::path& bootstrap) {
  Config config = config_path.empty() ? Config{} : Config::load(config_path);
  ServiceDeps deps = cli_deps();
  deps.bootstrap = load_bootstrap_file(bootstrap);
  // Training never scores sentiment, so a missing lexicon is not an error.
  if (!std::filesystem::exists(config.effective_lexicon_path())) deps.lexicon = SentimentLexicon{};
  Service service(std::move(config), std::move(deps));
  const auto result = service.learner().train_from_bootstrap();
  std::cout << nlohmann::json{{"model_version", result.new_version},
                              {"reclassified", result.reclassified},
                              {"bootstrap_documents", service.learner().bootstrap().size()}}
                   .dump(2)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqintel: feedback ingestion, classification and review service"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  std::string config_path;
  auto* serve_cmd = app.add_subcommand("serve", "Run the scheduler and HTTP API");
  serve_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);

  std::string source_file;
  std::string source_kind = "custom";
  auto* run_cmd = app.add_subcommand("run-once", "Run the pipeline once and print the report");
  run_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--source-file", source_file, "Ingest this file instead of the configured connectors")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--source-kind", source_kind, "app_store, microblog or custom");

  std::string bootstrap;
  auto* train_cmd = app.add_subcommand("train", "Train and publish a model from a bootstrap corpus");
  train_cmd->add_option("--bootstrap", bootstrap, "Labeled NDJSON corpus")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*serve_cmd) return serve(config_path);
    if (*run_cmd) return run_once(config_path, source_file, source_kind);
    if (*train_cmd) return train(config_path, bootstrap);
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
