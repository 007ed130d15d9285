#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "reqintel/config.hpp"
#include "reqintel/ingestion.hpp"
#include "reqintel/sentiment.hpp"

namespace testing_support {

std::filesystem::path data_dir();

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

reqintel::FeedbackItem make_item(const std::string& id, const std::string& text, std::int64_t created_unix,
                                 reqintel::Source source = reqintel::Source::app_store,
                                 const std::string& language = "en");

reqintel::SentimentLexicon small_lexicon();

/// Test config: UTC, default knobs, shipped lexicon/bootstrap paths, no connectors.
reqintel::Config test_config(const std::filesystem::path& storage_dir);

std::string read_file(const std::filesystem::path& p);

}  // namespace testing_support
