#pragma once

#include <optional>
#include <set>
#include <string>

#include "reqintel/classifier.hpp"
#include "reqintel/core.hpp"
#include "reqintel/ingestion.hpp"
#include "reqintel/sentiment.hpp"

namespace reqintel {

enum class LabelAction { agree, relabel };

std::string_view to_string(LabelAction a);

struct LabelEvent {
  std::string item_id;
  Label assigned_label = Label::irrelevant;
  LabelAction action = LabelAction::agree;
  Label prior_label = Label::irrelevant;
  std::string actor;
  Timestamp decided_at{};
  std::int64_t model_version_at_decision = 0;

  bool operator==(const LabelEvent&) const = default;
};

/// An item joined with its current classification, sentiment and label.
struct JoinedRecord {
  FeedbackItem item;
  std::optional<Classification> classification;
  std::optional<SentimentScore> sentiment;
  std::optional<LabelEvent> label_event;

  /// Human label when present, else the model's; nullopt while pending.
  std::optional<Label> effective_label() const;
};

/// Conjunctive focus-view filter. Time bounds are half-open [from, to).
struct FocusFilter {
  std::optional<std::string> keyword;
  std::optional<std::set<Source>> sources;
  std::optional<std::set<std::string>> languages;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
  std::optional<std::set<Label>> labels;
  bool relevant_only = false;

  /// Throws BadRange when from >= to.
  void validate() const;

  /// Label set after applying relevant_only; nullopt means unrestricted.
  std::optional<std::set<Label>> effective_labels() const;
};

}  // namespace reqintel
