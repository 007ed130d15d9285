#include "reqintel/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "reqintel/text.hpp"

namespace reqintel {

std::filesystem::path Config::effective_lexicon_path() const {
  return lexicon_path ? *lexicon_path : storage_dir / "lexicon.tsv";
}

std::filesystem::path Config::effective_bootstrap_path() const {
  return bootstrap_path ? *bootstrap_path : storage_dir / "bootstrap.ndjson";
}

namespace {

[[noreturn]] void bad(int lineno, const std::string& msg) {
  throw Error(ErrorCode::bad_config, "config line " + std::to_string(lineno) + ": " + msg);
}

double to_double(const std::string& v, int lineno) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(lineno, "expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& v, int lineno) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(lineno, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, int lineno) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(lineno, "expected true/false, got '" + v + "'");
}

}  // namespace

Config Config::parse(std::string_view text, const std::filesystem::path& base_dir) {
  Config cfg;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  cfg.storage_dir = resolve("data");

  std::map<std::string, ConnectorConfig> connectors;
  std::vector<std::string> connector_order;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "storage.dir") cfg.storage_dir = resolve(value);
    else if (key == "sentiment.lexicon_path") cfg.lexicon_path = resolve(value);
    else if (key == "classifier.bootstrap_path") cfg.bootstrap_path = resolve(value);
    else if (key == "classifier.alpha") cfg.alpha = to_double(value, lineno);
    else if (key == "classifier.tau") cfg.tau = to_double(value, lineno);
    else if (key == "active_learning.batch_size") cfg.batch_size = to_int(value, lineno);
    else if (key == "active_learning.queue_limit") cfg.queue_limit = to_int(value, lineno);
    else if (key == "analytics.timezone") cfg.timezone = value;
    else if (key == "pipeline.interval_seconds") cfg.interval_seconds = to_int(value, lineno);
    else if (key == "api.bind") cfg.bind = value;
    else if (key == "api.cors_origin") cfg.cors_origin = value;
    else if (key == "api.token") cfg.api_token = value;
    else if (key == "api.auth_reads") cfg.auth_reads = to_bool(value, lineno);
    else if (key == "ingestion.salt") cfg.pseudonym_salt = value;
    else if (key.rfind("connector.", 0) == 0) {
      const auto rest = key.substr(10);
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos || dot == 0) bad(lineno, "expected connector.<name>.<field>");
      const std::string name = rest.substr(0, dot);
      const std::string field = rest.substr(dot + 1);
      if (!connectors.count(name)) connector_order.push_back(name);
      ConnectorConfig& c = connectors[name];
      c.name = name;
      if (field == "kind") {
        const auto kind = parse_source(value);
        if (!kind) bad(lineno, "unknown source kind '" + value + "'");
        c.kind = *kind;
      } else if (field == "file") {
        c.file = resolve(value);
      } else if (field == "url") {
        c.url = value;
      } else {
        bad(lineno, "unknown connector field '" + field + "'");
      }
    } else {
      bad(lineno, "unknown key '" + key + "'");
    }
  }

  if (cfg.interval_seconds < 60) {
    throw Error(ErrorCode::bad_interval, "pipeline.interval_seconds must be at least 60");
  }
  for (const auto& name : connector_order) {
    const auto& c = connectors[name];
    if (c.file.has_value() == c.url.has_value()) {
      throw Error(ErrorCode::bad_config, "connector '" + name + "' needs exactly one of file or url");
    }
    cfg.connectors.push_back(c);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::bad_config, "cannot read config " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.parent_path());
}

}  // namespace reqintel
