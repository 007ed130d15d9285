#include "reqintel/active_learning.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "reqintel/analytics.hpp"
#include "reqintel/ingestion.hpp"
#include "reqintel/text.hpp"

namespace reqintel {

std::vector<Label> allowed_relabels(Label model_label) {
  std::vector<Label> out;
  for (Label l : kLabels) {
    if (l != model_label) out.push_back(l);
  }
  return out;
}

ActiveLearner::ActiveLearner(Store& store, Clock& clock, ActiveLearningConfig config,
                             std::vector<LabeledDocument> bootstrap)
    : store_(store), clock_(clock), config_(config), bootstrap_(std::move(bootstrap)) {
  if (!(config_.alpha > 0.0)) throw Error(ErrorCode::bad_config, "classifier.alpha must be > 0");
  if (!(config_.tau > 0.0 && config_.tau <= 1.0)) {
    throw Error(ErrorCode::bad_config, "classifier.tau must lie in (0, 1]");
  }
  if (config_.batch_size < 1) throw Error(ErrorCode::bad_config, "active_learning.batch_size must be >= 1");
  if (config_.queue_limit < 1) throw Error(ErrorCode::bad_config, "active_learning.queue_limit must be >= 1");
}

std::unique_lock<std::mutex> ActiveLearner::writer_lock() { return std::unique_lock(writer_mu_); }

std::vector<LabeledDocument> ActiveLearner::labeled_documents(std::span<const LabelEvent> events) const {
  std::vector<LabeledDocument> docs;
  docs.reserve(events.size());
  for (const auto& e : events) {
    const auto rec = store_.get(e.item_id);
    if (!rec) throw Error(ErrorCode::not_found, "label event references unknown item '" + e.item_id + "'");
    docs.push_back(LabeledDocument{featurize(rec->item.text), e.assigned_label});
  }
  return docs;
}

std::vector<LabeledDocument> ActiveLearner::reconstructed_corpus() const {
  std::vector<LabeledDocument> corpus = bootstrap_;
  const auto events = store_.label_events();
  const auto labeled = labeled_documents(events);
  corpus.insert(corpus.end(), labeled.begin(), labeled.end());
  return corpus;
}

std::size_t ActiveLearner::reclassify_locked(const ModelSnapshot& model, WriteBatch& batch) const {
  std::size_t n = 0;
  for (const auto& r : store_.records()) {
    if (r.label_event) continue;
    if (r.classification && r.classification->model_version >= model.version) continue;
    Classification c = predict(model, featurize(r.item.text), config_.tau);
    c.item_id = r.item.key();
    batch.put_classification(std::move(c));
    ++n;
  }
  return n;
}

RetrainResult ActiveLearner::train_from_bootstrap() {
  std::lock_guard lock(writer_mu_);
  const auto corpus = reconstructed_corpus();
  const auto current = store_.current_model();
  const std::int64_t version = (current ? current->version : 0) + 1;
  const ModelSnapshot model = train(corpus, config_.alpha, version);

  WriteBatch batch;
  batch.put_model(model);
  RetrainResult result{version, 0, 0};
  for (const auto& e : store_.label_events()) {
    batch.put_classification(ground_truth_classification(e.item_id, e.assigned_label, version));
    ++result.events_applied;
  }
  result.reclassified = reclassify_locked(model, batch);
  store_.commit(batch);
  return result;
}

std::vector<ReviewCandidate> ActiveLearner::uncertain_queue(const FocusFilter& filter,
                                                            std::int64_t limit) const {
  filter.validate();
  if (limit < 0) throw Error(ErrorCode::bad_page, "limit must be >= 0");
  const auto model = store_.current_model();
  if (!model || !model->trained()) throw Error(ErrorCode::untrained_model, "no trained model is available");

  std::vector<ReviewCandidate> out;
  for (const auto& r : store_.records()) {
    if (r.label_event || !r.classification) continue;
    const Classification& c = *r.classification;
    if (c.ground_truth || !c.uncertain || c.model_version != model->version) continue;
    if (!matches(r, filter)) continue;
    out.push_back(ReviewCandidate{r.item.key(), utf8_prefix(r.item.text, kExcerptChars), r.item.created_at, c,
                                  allowed_relabels(c.label)});
  }
  std::sort(out.begin(), out.end(), [](const ReviewCandidate& a, const ReviewCandidate& b) {
    if (a.classification.margin != b.classification.margin) return a.classification.margin < b.classification.margin;
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.item_id < b.item_id;
  });
  const auto cap = static_cast<std::size_t>(std::min(limit, config_.queue_limit));
  if (out.size() > cap) out.resize(cap);
  return out;
}

LabelEvent ActiveLearner::apply_label(const std::string& item_id, std::string_view assigned_label,
                                      const std::string& actor) {
  const auto label = parse_label(assigned_label);
  if (!label) throw Error(ErrorCode::unknown_label, "unknown label '" + std::string(assigned_label) + "'");

  std::lock_guard lock(writer_mu_);
  const auto rec = store_.get(item_id);
  if (!rec) throw Error(ErrorCode::not_found, "no item '" + item_id + "'");
  if (rec->label_event) throw Error(ErrorCode::already_labeled, "item '" + item_id + "' is already labeled");
  if (!rec->classification) {
    throw Error(ErrorCode::not_uncertain, "item '" + item_id + "' has not been classified yet");
  }
  const Classification& c = *rec->classification;
  if (c.ground_truth || !c.uncertain) {
    throw Error(ErrorCode::not_uncertain, "the model is certain about item '" + item_id + "'");
  }

  LabelEvent e;
  e.item_id = item_id;
  e.assigned_label = *label;
  e.prior_label = c.label;
  e.action = *label == c.label ? LabelAction::agree : LabelAction::relabel;
  e.actor = actor;
  e.decided_at = clock_.now();
  e.model_version_at_decision = c.model_version;
  store_.put_label_event(e);
  return e;
}

std::vector<LabelEvent> ActiveLearner::pending_events() const {
  std::vector<LabelEvent> out;
  for (const auto& e : store_.label_events()) {
    const auto rec = store_.get(e.item_id);
    if (!rec || !rec->classification || !rec->classification->ground_truth) out.push_back(e);
  }
  return out;
}

RetrainResult ActiveLearner::retrain(std::span<const LabelEvent> new_events) {
  if (new_events.empty()) throw Error(ErrorCode::empty_update, "no label events to train on");
  std::lock_guard lock(writer_mu_);
  const auto current = store_.current_model();
  if (!current || !current->trained()) throw Error(ErrorCode::untrained_model, "no trained model is available");

  std::set<std::string> seen;
  for (const auto& e : new_events) {
    const auto rec = store_.get(e.item_id);
    if (!rec || !rec->label_event || !(*rec->label_event == e)) {
      throw Error(ErrorCode::not_found, "no stored label event for item '" + e.item_id + "'");
    }
    if ((rec->classification && rec->classification->ground_truth) || !seen.insert(e.item_id).second) {
      throw Error(ErrorCode::bad_request, "label event for '" + e.item_id + "' is already part of a model");
    }
  }

  const std::int64_t version = current->version + 1;
  const ModelSnapshot model = extend(*current, labeled_documents(new_events), version);

  WriteBatch batch;
  batch.put_model(model);
  for (const auto& e : new_events) {
    batch.put_classification(ground_truth_classification(e.item_id, e.assigned_label, version));
  }
  RetrainResult result{version, new_events.size(), reclassify_locked(model, batch)};
  store_.commit(batch);
  return result;
}

std::optional<RetrainResult> ActiveLearner::retrain_if_due(bool at_run_boundary) {
  const auto pending = pending_events();
  if (pending.empty()) return std::nullopt;
  if (!at_run_boundary && static_cast<std::int64_t>(pending.size()) < config_.batch_size) return std::nullopt;
  const auto model = store_.current_model();
  if (!model || !model->trained()) return std::nullopt;
  return retrain(pending);
}

std::size_t ActiveLearner::reclassify_stale() {
  std::lock_guard lock(writer_mu_);
  const auto model = store_.current_model();
  if (!model || !model->trained()) return 0;
  WriteBatch batch;
  const std::size_t n = reclassify_locked(*model, batch);
  store_.commit(batch);
  return n;
}

std::vector<LabeledDocument> load_bootstrap_corpus(std::string_view contents) {
  std::vector<LabeledDocument> corpus;
  std::istringstream in{std::string(contents)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    RawRecord rec;
    try {
      rec = parse_record_line(line, Source::custom);
    } catch (const Error& e) {
      throw Error(e.code(), "bootstrap line " + std::to_string(lineno) + ": " + e.what());
    }
    const auto text = rec.payload.find("text");
    if (text == rec.payload.end() || trim(text->second).empty()) {
      throw Error(ErrorCode::missing_field, "bootstrap line " + std::to_string(lineno) + ": text");
    }
    const auto label_it = rec.payload.find("label");
    if (label_it == rec.payload.end()) {
      throw Error(ErrorCode::missing_field, "bootstrap line " + std::to_string(lineno) + ": label");
    }
    const auto label = parse_label(label_it->second);
    if (!label) {
      throw Error(ErrorCode::unknown_label,
                  "bootstrap line " + std::to_string(lineno) + ": unknown label '" + label_it->second + "'");
    }
    corpus.push_back(LabeledDocument{featurize(text->second), *label});
  }
  return corpus;
}

std::vector<LabeledDocument> load_bootstrap_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::bad_config, "cannot read bootstrap corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_bootstrap_corpus(buf.str());
}

}  // namespace reqintel
