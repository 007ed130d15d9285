#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reqintel/core.hpp"

namespace reqintel {

struct ConnectorConfig {
  std::string name;
  Source kind = Source::custom;
  std::optional<std::filesystem::path> file;
  std::optional<std::string> url;
};

/// Service configuration. The file format is one `key = value` per line;
/// `#` starts a comment. Connectors are declared as
/// `connector.<name>.kind`, `connector.<name>.file` or `connector.<name>.url`.
/// Relative paths resolve against the config file's directory.
struct Config {
  std::filesystem::path storage_dir = "data";
  std::optional<std::filesystem::path> lexicon_path;    // default <storage.dir>/lexicon.tsv
  std::optional<std::filesystem::path> bootstrap_path;  // default <storage.dir>/bootstrap.ndjson
  double alpha = 1.0;
  double tau = 0.2;
  std::int64_t batch_size = 10;
  std::int64_t queue_limit = 50;
  std::string timezone = "UTC";
  std::int64_t interval_seconds = 7200;
  std::string bind = "127.0.0.1:8080";
  std::string cors_origin = "*";
  /// Bearer token for mutating endpoints; empty disables the check.
  std::string api_token;
  bool auth_reads = false;
  std::string pseudonym_salt = "reqintel";
  std::vector<ConnectorConfig> connectors;

  std::filesystem::path effective_lexicon_path() const;
  std::filesystem::path effective_bootstrap_path() const;

  /// Throws Error(bad_config) on unknown keys or bad values.
  static Config parse(std::string_view text, const std::filesystem::path& base_dir);
  static Config load(const std::filesystem::path& file);
};

}  // namespace reqintel
