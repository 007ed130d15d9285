#include "reqintel/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reqintel/text.hpp"

namespace reqintel {

FeatureVector extract_features(std::span<const std::string> tokens) {
  FeatureVector fv;
  for (const auto& t : tokens) ++fv.counts[t];
  fv.total_tokens = static_cast<std::int64_t>(tokens.size());
  return fv;
}

FeatureVector featurize(std::string_view text) {
  const auto tokens = tokenize(text);
  return extract_features(tokens);
}

std::int64_t ModelSnapshot::document_count() const {
  return std::accumulate(class_doc_counts.begin(), class_doc_counts.end(), std::int64_t{0});
}

namespace {

void accumulate_into(ModelSnapshot& m, std::span<const LabeledDocument> documents) {
  for (const auto& doc : documents) {
    const std::size_t c = index_of(doc.label);
    ++m.class_doc_counts[c];
    for (const auto& [token, count] : doc.features.counts) {
      if (count <= 0) continue;
      m.vocabulary.insert(token);
      m.class_token_counts[c][token] += count;
      m.class_token_totals[c] += count;
    }
  }
}

}  // namespace

ModelSnapshot train(std::span<const LabeledDocument> corpus, double alpha, std::int64_t version) {
  if (corpus.empty()) throw Error(ErrorCode::empty_corpus, "training corpus has no documents");
  if (!(alpha > 0.0)) throw Error(ErrorCode::bad_config, "smoothing constant must be > 0");
  ModelSnapshot m;
  m.version = version;
  m.alpha = alpha;
  accumulate_into(m, corpus);
  return m;
}

ModelSnapshot extend(const ModelSnapshot& base, std::span<const LabeledDocument> documents,
                     std::int64_t version) {
  ModelSnapshot m = base;
  m.version = version;
  accumulate_into(m, documents);
  return m;
}

double class_prior(const ModelSnapshot& model, Label c) {
  return static_cast<double>(model.class_doc_counts[index_of(c)] + 1) /
         static_cast<double>(model.document_count() + static_cast<std::int64_t>(kLabelCount));
}

Label argmax_label(const ClassProbabilities& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kLabelCount; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return kLabels[best];
}

Uncertainty uncertainty(const ClassProbabilities& probabilities, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw Error(ErrorCode::bad_config, "tau must lie in (0, 1]");
  const double sum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(std::abs(sum - 1.0) <= 1e-6)) {
    throw Error(ErrorCode::bad_distribution, "probabilities sum to " + std::to_string(sum));
  }
  ClassProbabilities sorted = probabilities;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double margin = sorted[0] - sorted[1];
  return {margin, margin < tau};
}

PerLabel<double> log_scores(const ModelSnapshot& model, const FeatureVector& features) {
  const double vocab = static_cast<double>(model.vocabulary.size());
  PerLabel<double> scores{};
  for (Label c : kLabels) {
    const std::size_t ci = index_of(c);
    const auto& counts = model.class_token_counts[ci];
    const double denom = static_cast<double>(model.class_token_totals[ci]) + model.alpha * vocab;
    double s = std::log(class_prior(model, c));
    for (const auto& [token, n] : features.counts) {
      if (!model.vocabulary.count(token)) continue;
      auto it = counts.find(token);
      const double tc = it == counts.end() ? 0.0 : static_cast<double>(it->second);
      s += static_cast<double>(n) * std::log((tc + model.alpha) / denom);
    }
    scores[ci] = s;
  }
  return scores;
}

Classification predict(const ModelSnapshot& model, const FeatureVector& features, double tau) {
  if (!model.trained()) throw Error(ErrorCode::untrained_model, "no trained model is available");
  const auto scores = log_scores(model, features);
  const double max_score = *std::max_element(scores.begin(), scores.end());

  Classification out;
  double z = 0.0;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    out.probabilities[c] = std::exp(scores[c] - max_score);
    z += out.probabilities[c];
  }
  for (double& p : out.probabilities) p /= z;

  out.label = argmax_label(out.probabilities);
  const auto u = uncertainty(out.probabilities, tau);
  out.margin = u.margin;
  out.uncertain = u.uncertain;
  out.model_version = model.version;
  return out;
}

Classification ground_truth_classification(std::string item_id, Label assigned,
                                           std::int64_t model_version) {
  Classification c;
  c.item_id = std::move(item_id);
  c.label = assigned;
  c.probabilities[index_of(assigned)] = 1.0;
  c.margin = 1.0;
  c.uncertain = false;
  c.model_version = model_version;
  c.ground_truth = true;
  return c;
}

}  // namespace reqintel
