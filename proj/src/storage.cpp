#include "reqintel/storage.hpp"

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include "reqintel/analytics.hpp"
#include "reqintel/codec.hpp"

namespace reqintel {

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::item: return "item";
    case RecordKind::classification: return "classification";
    case RecordKind::sentiment: return "sentiment";
    case RecordKind::label_event: return "label_event";
    case RecordKind::model: return "model";
  }
  return "unknown";
}

struct Store::State {
  std::map<std::string, FeedbackItem> items;
  std::map<std::string, std::vector<Classification>> classifications;
  std::map<std::string, SentimentScore> sentiments;
  std::map<std::string, LabelEvent> labels;
  std::map<std::int64_t, std::shared_ptr<const ModelSnapshot>> models;
  std::int64_t last_seq = 0;

  std::int64_t max_model_version() const { return models.empty() ? 0 : models.rbegin()->first; }

  void apply(const StoreRecord& rec) {
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, FeedbackItem>) {
            items.emplace(body.key(), body);
          } else if constexpr (std::is_same_v<T, Classification>) {
            classifications[body.item_id].push_back(body);
          } else if constexpr (std::is_same_v<T, ItemSentiment>) {
            sentiments[body.item_id] = body.score;
          } else if constexpr (std::is_same_v<T, LabelEvent>) {
            labels.emplace(body.item_id, body);
          } else {
            models[body.version] = std::make_shared<const ModelSnapshot>(body);
          }
        },
        rec.body);
    last_seq = rec.write_seq;
  }
};

namespace {

constexpr std::size_t kHeaderSize = 8;
constexpr std::uint32_t kMaxRecordSize = 256u << 20;

json body_to_json(const RecordBody& body) {
  return std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ItemSentiment>) {
          json j = to_json(b.score);
          j["item_id"] = b.item_id;
          return j;
        } else {
          return to_json(b);
        }
      },
      body);
}

RecordBody body_from_json(std::string_view kind, const json& j) {
  if (kind == "item") return feedback_item_from_json(j);
  if (kind == "classification") return classification_from_json(j);
  if (kind == "sentiment") return ItemSentiment{j.at("item_id").get<std::string>(), sentiment_from_json(j)};
  if (kind == "label_event") return label_event_from_json(j);
  if (kind == "model") return model_from_json(j);
  throw Error(ErrorCode::bad_record, "unknown record kind '" + std::string(kind) + "'");
}

// `end` marks the last record of a committed batch; replay applies a batch
// only once its end record is present.
std::string encode(const StoreRecord& rec, bool end) {
  const json j{{"seq", rec.write_seq},
               {"kind", to_string(rec.kind())},
               {"end", end},
               {"data", body_to_json(rec.body)}};
  const std::string payload = j.dump();
  const auto len = static_cast<std::uint32_t>(payload.size());
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
  std::string out(kHeaderSize, '\0');
  for (int i = 0; i < 4; ++i) {
    out[i] = static_cast<char>((len >> (8 * i)) & 0xFF);
    out[4 + i] = static_cast<char>((crc >> (8 * i)) & 0xFF);
  }
  out += payload;
  return out;
}

std::uint32_t read_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

// Decodes complete batches of checksummed records from the front of `data`;
// stops at the first torn or corrupt record and returns the offset just past
// the last complete batch.
template <typename Fn>
std::uint64_t decode_all(const std::string& data, Fn&& on_record) {
  std::uint64_t pos = 0;
  std::uint64_t committed = 0;
  std::vector<std::pair<StoreRecord, std::uint64_t>> batch;
  while (pos + kHeaderSize <= data.size()) {
    const std::uint32_t len = read_u32(data.data() + pos);
    const std::uint32_t crc = read_u32(data.data() + pos + 4);
    if (len > kMaxRecordSize || pos + kHeaderSize + len > data.size()) break;
    const char* payload = data.data() + pos + kHeaderSize;
    if (crc32(0L, reinterpret_cast<const Bytef*>(payload), len) != crc) break;
    StoreRecord rec;
    bool end = true;
    try {
      const json j = json::parse(payload, payload + len);
      rec.write_seq = j.at("seq").get<std::int64_t>();
      rec.body = body_from_json(j.at("kind").get<std::string>(), j.at("data"));
      end = j.value("end", true);
    } catch (const std::exception&) {
      break;
    }
    pos += kHeaderSize + len;
    batch.emplace_back(std::move(rec), pos);
    if (end) {
      for (const auto& [r, at] : batch) on_record(r, at);
      batch.clear();
      committed = pos;
    }
  }
  return committed;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorCode::storage_unavailable, what + ": " + std::strerror(errno));
}

}  // namespace

Store::Store() : state_(std::make_unique<State>()) {}

Store::Store(const std::filesystem::path& dir) : state_(std::make_unique<State>()) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::storage_unavailable, "cannot create " + dir.string() + ": " + ec.message());
  log_path_ = dir / kLogFileName;
  replay();
  log_ = std::fopen(log_path_->c_str(), "ab");
  if (!log_) unavailable("cannot open " + log_path_->string());
}

Store::~Store() {
  if (log_) std::fclose(log_);
}

void Store::replay() {
  const std::string data = read_file(*log_path_);
  const std::uint64_t good = decode_all(data, [&](const StoreRecord& rec, std::uint64_t) { state_->apply(rec); });
  if (good < data.size()) {
    std::error_code ec;
    std::filesystem::resize_file(*log_path_, good, ec);
    if (ec) throw Error(ErrorCode::storage_unavailable, "cannot truncate torn log tail: " + ec.message());
  }
}

std::vector<LogEntry> Store::scan_log(const std::filesystem::path& log_file) {
  std::vector<LogEntry> out;
  decode_all(read_file(log_file),
             [&](const StoreRecord& rec, std::uint64_t end) { out.push_back({rec.write_seq, end}); });
  return out;
}

void Store::append_to_log(const std::vector<StoreRecord>& records) {
  if (!log_) return;
  std::string buf;
  for (std::size_t i = 0; i < records.size(); ++i) buf += encode(records[i], i + 1 == records.size());
  const long before = std::ftell(log_);
  if (std::fwrite(buf.data(), 1, buf.size(), log_) != buf.size() || std::fflush(log_) != 0) {
    // Drop whatever part of the batch reached the file.
    if (before >= 0) {
      std::error_code ec;
      std::filesystem::resize_file(*log_path_, static_cast<std::uintmax_t>(before), ec);
    }
    unavailable("write to " + log_path_->string() + " failed");
  }
  if (::fsync(fileno(log_)) != 0) unavailable("fsync of " + log_path_->string() + " failed");
}

std::vector<std::string> Store::commit_locked(const std::vector<RecordBody>& bodies) {
  State& s = *state_;
  std::set<std::string> new_items;
  std::set<std::string> new_labels;
  std::set<std::int64_t> new_models;
  std::int64_t max_version = s.max_model_version();
  auto item_known = [&](const std::string& key) { return s.items.count(key) || new_items.count(key); };

  std::vector<StoreRecord> records;
  std::vector<std::string> inserted;
  std::int64_t seq = s.last_seq;
  for (const auto& body : bodies) {
    if (const auto* item = std::get_if<FeedbackItem>(&body)) {
      const std::string key = item->key();
      if (item_known(key)) continue;
      new_items.insert(key);
      inserted.push_back(key);
    } else if (const auto* c = std::get_if<Classification>(&body)) {
      if (!item_known(c->item_id)) throw Error(ErrorCode::not_found, "no item '" + c->item_id + "'");
      if (!s.models.count(c->model_version) && !new_models.count(c->model_version)) {
        throw Error(ErrorCode::not_found, "no model version " + std::to_string(c->model_version));
      }
    } else if (const auto* st = std::get_if<ItemSentiment>(&body)) {
      if (!item_known(st->item_id)) throw Error(ErrorCode::not_found, "no item '" + st->item_id + "'");
    } else if (const auto* e = std::get_if<LabelEvent>(&body)) {
      if (!item_known(e->item_id)) throw Error(ErrorCode::not_found, "no item '" + e->item_id + "'");
      if (s.labels.count(e->item_id) || !new_labels.insert(e->item_id).second) {
        throw Error(ErrorCode::duplicate_label, "item '" + e->item_id + "' already has a label event");
      }
    } else if (const auto* m = std::get_if<ModelSnapshot>(&body)) {
      if (m->version <= max_version) {
        throw Error(ErrorCode::bad_record, "model version " + std::to_string(m->version) +
                                               " does not exceed " + std::to_string(max_version));
      }
      max_version = m->version;
      new_models.insert(m->version);
    }
    records.push_back(StoreRecord{++seq, body});
  }
  if (records.empty()) return inserted;

  append_to_log(records);
  for (const auto& r : records) s.apply(r);
  return inserted;
}

std::vector<std::string> Store::commit(const WriteBatch& batch) {
  std::vector<std::string> inserted;
  std::int64_t seq = 0;
  {
    std::unique_lock lock(mu_);
    const std::int64_t before = state_->last_seq;
    inserted = commit_locked(batch.bodies());
    seq = state_->last_seq;
    if (seq == before) return inserted;
  }
  std::lock_guard lock(listener_mu_);
  if (listener_) listener_(seq);
  return inserted;
}

std::vector<std::string> Store::upsert_items(std::span<const FeedbackItem> items) {
  WriteBatch b;
  for (const auto& i : items) b.add_item(i);
  return commit(b);
}

void Store::put_classification(const Classification& c) {
  WriteBatch b;
  b.put_classification(c);
  commit(b);
}

void Store::put_sentiment(const std::string& item_id, const SentimentScore& s) {
  WriteBatch b;
  b.put_sentiment(item_id, s);
  commit(b);
}

void Store::put_label_event(const LabelEvent& e) {
  WriteBatch b;
  b.put_label_event(e);
  commit(b);
}

void Store::put_model(const ModelSnapshot& m) {
  WriteBatch b;
  b.put_model(m);
  commit(b);
}

std::shared_ptr<const ModelSnapshot> Store::current_model() const {
  std::shared_lock lock(mu_);
  if (state_->models.empty()) return nullptr;
  return state_->models.rbegin()->second;
}

std::shared_ptr<const ModelSnapshot> Store::model(std::int64_t version) const {
  std::shared_lock lock(mu_);
  auto it = state_->models.find(version);
  return it == state_->models.end() ? nullptr : it->second;
}

std::vector<std::int64_t> Store::model_versions() const {
  std::shared_lock lock(mu_);
  std::vector<std::int64_t> out;
  for (const auto& [v, m] : state_->models) out.push_back(v);
  return out;
}

JoinedRecord Store::join_locked(const FeedbackItem& item) const {
  const std::string key = item.key();
  JoinedRecord r{item, std::nullopt, std::nullopt, std::nullopt};
  if (auto it = state_->classifications.find(key); it != state_->classifications.end() && !it->second.empty()) {
    r.classification = it->second.back();
  }
  if (auto it = state_->sentiments.find(key); it != state_->sentiments.end()) r.sentiment = it->second;
  if (auto it = state_->labels.find(key); it != state_->labels.end()) r.label_event = it->second;
  return r;
}

std::optional<JoinedRecord> Store::get(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = state_->items.find(key);
  if (it == state_->items.end()) return std::nullopt;
  return join_locked(it->second);
}

bool Store::contains(Source source, const std::string& id) const {
  std::shared_lock lock(mu_);
  return state_->items.count(make_item_key(source, id)) > 0;
}

std::set<ItemIdentity> Store::known_identities() const {
  std::shared_lock lock(mu_);
  std::set<ItemIdentity> out;
  for (const auto& [key, item] : state_->items) out.emplace(item.source, item.id);
  return out;
}

std::size_t Store::item_count() const {
  std::shared_lock lock(mu_);
  return state_->items.size();
}

std::vector<Classification> Store::classification_history(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = state_->classifications.find(key);
  return it == state_->classifications.end() ? std::vector<Classification>{} : it->second;
}

std::vector<LabelEvent> Store::label_events() const {
  std::shared_lock lock(mu_);
  std::vector<LabelEvent> out;
  for (const auto& [key, e] : state_->labels) out.push_back(e);
  return out;
}

std::vector<JoinedRecord> Store::records() const {
  std::shared_lock lock(mu_);
  std::vector<JoinedRecord> out;
  out.reserve(state_->items.size());
  for (const auto& [key, item] : state_->items) out.push_back(join_locked(item));
  return out;
}

Page Store::query(const FocusFilter& filter, std::int64_t offset, std::int64_t limit) const {
  if (limit <= 0 || limit > kMaxPageLimit || offset < 0) {
    throw Error(ErrorCode::bad_page, "page needs 0 < limit <= " + std::to_string(kMaxPageLimit) +
                                         " and offset >= 0");
  }
  const auto all = records();
  auto matched = apply_filter(all, filter);
  Page page;
  page.total = static_cast<std::int64_t>(matched.size());
  page.offset = offset;
  page.limit = limit;
  const auto begin = std::min<std::int64_t>(offset, page.total);
  const auto end = std::min<std::int64_t>(offset + limit, page.total);
  page.records.assign(std::make_move_iterator(matched.begin() + begin),
                      std::make_move_iterator(matched.begin() + end));
  return page;
}

std::int64_t Store::last_seq() const {
  std::shared_lock lock(mu_);
  return state_->last_seq;
}

std::string Store::dump_index() const {
  std::shared_lock lock(mu_);
  const State& s = *state_;
  json items = json::object();
  for (const auto& [key, item] : s.items) items[key] = to_json(item);
  json classifications = json::object();
  for (const auto& [key, history] : s.classifications) {
    json h = json::array();
    for (const auto& c : history) h.push_back(to_json(c));
    classifications[key] = h;
  }
  json sentiments = json::object();
  for (const auto& [key, score] : s.sentiments) sentiments[key] = to_json(score);
  json labels = json::object();
  for (const auto& [key, e] : s.labels) labels[key] = to_json(e);
  json models = json::object();
  for (const auto& [v, m] : s.models) models[std::to_string(v)] = to_json(*m);
  return json{{"last_seq", s.last_seq},
              {"items", items},
              {"classifications", classifications},
              {"sentiments", sentiments},
              {"labels", labels},
              {"models", models}}
      .dump(1);
}

void Store::on_commit(std::function<void(std::int64_t)> listener) {
  std::lock_guard lock(listener_mu_);
  listener_ = std::move(listener);
}

}  // namespace reqintel
