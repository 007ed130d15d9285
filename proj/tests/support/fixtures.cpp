#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace testing_support {

std::filesystem::path data_dir() { return REQINTEL_TEST_DATA_DIR; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("reqintel-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

reqintel::FeedbackItem make_item(const std::string& id, const std::string& text, std::int64_t created_unix,
                                 reqintel::Source source, const std::string& language) {
  reqintel::FeedbackItem item;
  item.id = id;
  item.source = source;
  item.text = text;
  item.language = language;
  item.created_at = reqintel::from_unix(created_unix);
  item.ingested_at = reqintel::from_unix(created_unix + 60);
  return item;
}

reqintel::SentimentLexicon small_lexicon() {
  return reqintel::SentimentLexicon({{"good", 1.0}, {"bad", -1.0}}, reqintel::SentimentLexicon::default_negators());
}

reqintel::Config test_config(const std::filesystem::path& storage_dir) {
  reqintel::Config c;
  c.storage_dir = storage_dir;
  c.lexicon_path = data_dir() / "lexicon.tsv";
  c.bootstrap_path = data_dir() / "bootstrap.ndjson";
  c.timezone = "UTC";
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testing_support
