#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reqintel/core.hpp"

namespace reqintel {

struct FeatureVector {
  std::map<std::string, std::int64_t> counts;
  std::int64_t total_tokens = 0;

  bool operator==(const FeatureVector&) const = default;
};

FeatureVector extract_features(std::span<const std::string> tokens);

/// tokenize + extract_features.
FeatureVector featurize(std::string_view text);

struct LabeledDocument {
  FeatureVector features;
  Label label = Label::irrelevant;
};

template <typename T>
using PerLabel = std::array<T, kLabelCount>;

using ClassProbabilities = PerLabel<double>;

/// Immutable trained multinomial Naive Bayes state. Per-class token maps
/// hold only tokens with a positive count.
struct ModelSnapshot {
  std::int64_t version = 0;
  std::set<std::string> vocabulary;
  PerLabel<std::int64_t> class_doc_counts{};
  PerLabel<std::map<std::string, std::int64_t>> class_token_counts{};
  PerLabel<std::int64_t> class_token_totals{};
  double alpha = 1.0;

  std::int64_t document_count() const;
  bool trained() const { return version > 0 && document_count() > 0; }

  bool operator==(const ModelSnapshot&) const = default;
};

inline constexpr double kDefaultAlpha = 1.0;
inline constexpr double kDefaultTau = 0.2;

/// Exact counts over the corpus. Throws EmptyCorpus, or BadConfig for a
/// non-positive alpha.
ModelSnapshot train(std::span<const LabeledDocument> corpus, double alpha, std::int64_t version = 1);

/// Adds documents to an existing snapshot's counts; the result equals
/// train() over the union of both corpora with the given version.
ModelSnapshot extend(const ModelSnapshot& base, std::span<const LabeledDocument> documents,
                     std::int64_t version);

/// (class_doc_counts[c] + 1) / (N + 3).
double class_prior(const ModelSnapshot& model, Label c);

struct Classification {
  std::string item_id;
  Label label = Label::irrelevant;
  ClassProbabilities probabilities{};
  double margin = 0.0;
  bool uncertain = false;
  std::int64_t model_version = 0;
  /// Set for human-labeled items: probabilities are {assigned: 1}.
  bool ground_truth = false;

  bool operator==(const Classification&) const = default;
};

struct Uncertainty {
  double margin = 0.0;
  bool uncertain = false;
};

/// Margin sampling: top1 - top2, uncertain iff margin < tau. Throws
/// BadDistribution when the probabilities do not sum to 1 within 1e-6,
/// BadConfig when tau is outside (0, 1].
Uncertainty uncertainty(const ClassProbabilities& probabilities, double tau);

/// First label (in kLabels order) attaining the maximum probability.
Label argmax_label(const ClassProbabilities& probabilities);

/// Per-class log-scores; tokens outside the vocabulary are ignored.
PerLabel<double> log_scores(const ModelSnapshot& model, const FeatureVector& features);

/// Throws UntrainedModel for an untrained snapshot.
Classification predict(const ModelSnapshot& model, const FeatureVector& features, double tau);

Classification ground_truth_classification(std::string item_id, Label assigned,
                                           std::int64_t model_version);

}  // namespace reqintel
