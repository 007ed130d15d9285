#pragma once

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reqintel/records.hpp"

namespace reqintel {

struct ItemSentiment {
  std::string item_id;
  SentimentScore score;
};

enum class RecordKind { item, classification, sentiment, label_event, model };

std::string_view to_string(RecordKind k);

using RecordBody = std::variant<FeedbackItem, Classification, ItemSentiment, LabelEvent, ModelSnapshot>;

struct StoreRecord {
  std::int64_t write_seq = 0;
  RecordBody body;

  RecordKind kind() const { return static_cast<RecordKind>(body.index()); }
};

/// A group of writes committed atomically: readers see all of it or none.
class WriteBatch {
 public:
  void add_item(FeedbackItem item) { bodies_.emplace_back(std::move(item)); }
  void put_classification(Classification c) { bodies_.emplace_back(std::move(c)); }
  void put_sentiment(std::string item_id, SentimentScore s) {
    bodies_.emplace_back(ItemSentiment{std::move(item_id), s});
  }
  void put_label_event(LabelEvent e) { bodies_.emplace_back(std::move(e)); }
  void put_model(ModelSnapshot m) { bodies_.emplace_back(std::move(m)); }

  bool empty() const { return bodies_.empty(); }
  std::size_t size() const { return bodies_.size(); }
  const std::vector<RecordBody>& bodies() const { return bodies_; }

 private:
  std::vector<RecordBody> bodies_;
};

struct Page {
  std::int64_t total = 0;
  std::int64_t offset = 0;
  std::int64_t limit = 0;
  std::vector<JoinedRecord> records;
};

inline constexpr std::int64_t kMaxPageLimit = 500;

/// Location of one complete record in a log file.
struct LogEntry {
  std::int64_t write_seq = 0;
  std::uint64_t end_offset = 0;
};

/// Feedback items, classifications (latest wins, history kept), sentiment
/// scores, label events and model snapshots, persisted as an append-only
/// log of length-prefixed, checksummed JSON records.
///
/// Writes are serialized; readers take a shared lock and never observe a
/// partially applied batch. Opening a directory replays its log batch by
/// batch; a torn or incomplete tail batch is discarded and truncated away.
class Store {
 public:
  static constexpr const char* kLogFileName = "store.log";

  /// Volatile store without a backing log.
  Store();
  /// Opens (creating if needed) `dir/store.log`. Throws StorageUnavailable.
  explicit Store(const std::filesystem::path& dir);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Inserts items with new (source, id) pairs; existing keys are skipped.
  /// Returns the keys actually inserted, in input order.
  std::vector<std::string> upsert_items(std::span<const FeedbackItem> items);

  void put_classification(const Classification& c);
  void put_sentiment(const std::string& item_id, const SentimentScore& s);
  /// Throws NotFound for an unknown item, DuplicateLabel for a second event.
  void put_label_event(const LabelEvent& e);
  /// Versions must strictly increase.
  void put_model(const ModelSnapshot& m);

  /// Validates the whole batch first; on any error nothing is written.
  /// Items already present are skipped like upsert_items. Returns the keys
  /// of items inserted.
  std::vector<std::string> commit(const WriteBatch& batch);

  std::shared_ptr<const ModelSnapshot> current_model() const;
  std::shared_ptr<const ModelSnapshot> model(std::int64_t version) const;
  std::vector<std::int64_t> model_versions() const;

  std::optional<JoinedRecord> get(const std::string& key) const;
  bool contains(Source source, const std::string& id) const;
  std::set<ItemIdentity> known_identities() const;
  std::size_t item_count() const;
  std::vector<Classification> classification_history(const std::string& key) const;
  std::vector<LabelEvent> label_events() const;

  /// Copy of every joined record, taken under one read lock.
  std::vector<JoinedRecord> records() const;

  /// Filtered page ordered by created_at desc, then key. Throws BadPage
  /// unless 0 < limit <= 500 and offset >= 0; BadRange via the filter.
  Page query(const FocusFilter& filter, std::int64_t offset, std::int64_t limit) const;

  std::int64_t last_seq() const;

  /// Canonical text rendering of the in-memory index; equal dumps mean
  /// equal state.
  std::string dump_index() const;

  /// Called after every successful commit with the last assigned seq.
  void on_commit(std::function<void(std::int64_t)> listener);

  /// Records belonging to fully written batches, in log order.
  static std::vector<LogEntry> scan_log(const std::filesystem::path& log_file);

 private:
  struct State;

  std::vector<std::string> commit_locked(const std::vector<RecordBody>& bodies);
  void append_to_log(const std::vector<StoreRecord>& records);
  void replay();
  JoinedRecord join_locked(const FeedbackItem& item) const;

  mutable std::shared_mutex mu_;
  std::unique_ptr<State> state_;
  std::optional<std::filesystem::path> log_path_;
  std::FILE* log_ = nullptr;
  std::mutex listener_mu_;
  std::function<void(std::int64_t)> listener_;
};

}  // namespace reqintel
