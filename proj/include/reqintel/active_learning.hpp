#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reqintel/classifier.hpp"
#include "reqintel/clock.hpp"
#include "reqintel/records.hpp"
#include "reqintel/storage.hpp"

namespace reqintel {

struct ReviewCandidate {
  std::string item_id;
  std::string excerpt;
  Timestamp created_at{};
  Classification classification;
  std::vector<Label> allowed_relabels;
};

inline constexpr std::size_t kExcerptChars = 160;
inline constexpr std::int64_t kDefaultBatchSize = 10;
inline constexpr std::int64_t kDefaultQueueLimit = 50;

/// The two labels other than `model_label`, in fixed label order.
std::vector<Label> allowed_relabels(Label model_label);

struct ActiveLearningConfig {
  double alpha = kDefaultAlpha;
  double tau = kDefaultTau;
  std::int64_t batch_size = kDefaultBatchSize;
  std::int64_t queue_limit = kDefaultQueueLimit;
};

struct RetrainResult {
  std::int64_t new_version = 0;
  std::size_t events_applied = 0;
  std::size_t reclassified = 0;
};

/// Owns the labeling/training write path. Human labels are accepted only
/// for items whose current classification is uncertain; accepted labels
/// become training data at the next retrain and ground truth thereafter.
class ActiveLearner {
 public:
  ActiveLearner(Store& store, Clock& clock, ActiveLearningConfig config,
                std::vector<LabeledDocument> bootstrap);

  const ActiveLearningConfig& config() const { return config_; }
  std::span<const LabeledDocument> bootstrap() const { return bootstrap_; }

  /// Trains on the bootstrap corpus plus every labeled item, publishes the
  /// result as the next version and reclassifies the store.
  RetrainResult train_from_bootstrap();

  /// Uncertain, unlabeled items under the current model, most uncertain
  /// first; at most min(limit, queue_limit). Throws UntrainedModel.
  std::vector<ReviewCandidate> uncertain_queue(const FocusFilter& filter, std::int64_t limit) const;

  /// Records a reviewer decision. Errors, checked in this order:
  /// UnknownLabel, NotFound, AlreadyLabeled, NotUncertain.
  LabelEvent apply_label(const std::string& item_id, std::string_view assigned_label,
                         const std::string& actor);

  /// Label events not yet folded into a published model.
  std::vector<LabelEvent> pending_events() const;

  /// Folds `new_events` into the current model as version + 1, publishes
  /// it and reclassifies every unlabeled item. Throws EmptyUpdate.
  RetrainResult retrain(std::span<const LabelEvent> new_events);

  /// Retrains when pending >= batch_size, or when any are pending and
  /// `at_run_boundary` is set.
  std::optional<RetrainResult> retrain_if_due(bool at_run_boundary);

  /// Predicts and stores classifications for unlabeled items whose
  /// classification is missing or older than the current model.
  std::size_t reclassify_stale();

  /// Serializes an external writer (the pipeline's classify/store tail)
  /// with labeling and retraining.
  std::unique_lock<std::mutex> writer_lock();

  /// The corpus a full retrain would use: bootstrap plus labeled items.
  std::vector<LabeledDocument> reconstructed_corpus() const;

 private:
  std::vector<LabeledDocument> labeled_documents(std::span<const LabelEvent> events) const;
  std::size_t reclassify_locked(const ModelSnapshot& model, WriteBatch& batch) const;

  Store& store_;
  Clock& clock_;
  ActiveLearningConfig config_;
  std::vector<LabeledDocument> bootstrap_;
  mutable std::mutex writer_mu_;
};

/// Reads the bootstrap corpus: connector records with a `label` key.
/// Throws BadRecord / UnknownLabel with the offending line number.
std::vector<LabeledDocument> load_bootstrap_corpus(std::string_view contents);
std::vector<LabeledDocument> load_bootstrap_file(const std::filesystem::path& path);

}  // namespace reqintel
