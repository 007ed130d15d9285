// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <thread>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <spdlog/spdlog.h>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reqintel/active_learning.hpp"
#include "reqintel/analytics.hpp"
#include "reqintel/api.hpp"
#include "reqintel/orchestrator.hpp"
#include "reqintel/scheduler.hpp"
#include "reqintel/service.hpp"
#include "reqintel/text.hpp"

using namespace reqintel;
using namespace std::chrono_literals;
using nlohmann::json;
using testing_support::make_item;
using testing_support::TempDir;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw Failure("expected an error, none thrown");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << std::fixed << v;
  return out.str();
}

const std::vector<std::string> kPool{"crash", "error", "add",  "please", "thanks", "love",
                                     "login", "sync",  "slow", "option", "feature", "great"};

std::vector<std::string> random_tokens(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, kPool.size() - 1);
  std::vector<std::string> out(len(rng));
  for (auto& t : out) t = kPool[pick(rng)];
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
  return s;
}

std::vector<LabeledDocument> random_corpus(std::mt19937_64& rng, int docs) {
  std::uniform_int_distribution<int> label(0, 2);
  std::vector<LabeledDocument> out;
  for (int i = 0; i < docs; ++i) {
    out.push_back({featurize(join(random_tokens(rng, 6))), kLabels[label(rng)]});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string classifier_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  constexpr int kCorpora = 1000;
  double worst = 0;
  int near_ties = 0;
  for (int n = 0; n < kCorpora; ++n) {
    const int vocab = std::uniform_int_distribution<int>(1, 10)(rng);
    const int docs = std::uniform_int_distribution<int>(1, 20)(rng);
    const double alpha = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    std::uniform_int_distribution<int> word(0, vocab - 1);
    std::uniform_int_distribution<int> len(1, 8);
    std::uniform_int_distribution<int> label(0, 2);

    std::vector<oracle::Doc> odocs;
    std::vector<LabeledDocument> corpus;
    for (int d = 0; d < docs; ++d) {
      oracle::Doc doc;
      const int l = len(rng);
      for (int i = 0; i < l; ++i) doc.tokens.push_back("w" + std::to_string(word(rng)));
      doc.label = label(rng);
      corpus.push_back({extract_features(doc.tokens), kLabels[doc.label]});
      odocs.push_back(std::move(doc));
    }
    const ModelSnapshot model = train(corpus, alpha);

    for (int q = 0; q < 5; ++q) {
      std::vector<std::string> query;
      const int l = len(rng);
      // Tokens up to w11 so some queries hit out-of-vocabulary words.
      std::uniform_int_distribution<int> any(0, 11);
      for (int i = 0; i < l; ++i) query.push_back("w" + std::to_string(any(rng)));
      const auto c = predict(model, extract_features(query), kDefaultTau);
      const auto ref = oracle::nb_posterior(odocs, alpha, query);
      for (std::size_t k = 0; k < kLabelCount; ++k) {
        const double diff = std::abs(c.probabilities[k] - ref[k]);
        worst = std::max(worst, diff);
        expect(diff <= 1e-9, "corpus " + std::to_string(n) + " class " + std::to_string(k) + " off by " +
                                 std::to_string(diff));
      }
      // Exact ties are broken by label order; near-ties within rounding may
      // legitimately go either way, so only a clearly worse class fails.
      const double best = *std::max_element(ref.begin(), ref.end());
      expect(ref[index_of(c.label)] >= best - 1e-12, "predicted label is not a posterior maximum");
      if (ref[index_of(c.label)] < best) ++near_ties;
    }
  }
  const double secs = seconds_since(t0);
  expect(secs < 10.0, "took " + fmt(secs) + "s");
  std::ostringstream out;
  out << kCorpora << " corpora, max diff " << worst << ", " << near_ties << " rounding ties, " << fmt(secs) << "s";
  return out.str();
}

// ---------------------------------------------------------------------------

std::string incremental_retrain() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  constexpr int kSequences = 200;
  int retrains = 0;
  for (int n = 0; n < kSequences; ++n) {
    ManualClock clock(from_unix(1'500'000'000));
    Store store;
    ActiveLearningConfig cfg;
    cfg.tau = 1.0;  // every non-degenerate prediction is labelable
    cfg.alpha = std::uniform_real_distribution<double>(0.2, 2.0)(rng);
    const auto bootstrap = random_corpus(rng, std::uniform_int_distribution<int>(1, 15)(rng));
    ActiveLearner learner(store, clock, cfg, bootstrap);

    const int items = std::uniform_int_distribution<int>(5, 30)(rng);
    std::vector<FeedbackItem> batch;
    for (int i = 0; i < items; ++i) batch.push_back(make_item("i" + std::to_string(i), join(random_tokens(rng, 6)), i));
    store.upsert_items(batch);
    learner.train_from_bootstrap();

    std::vector<LabeledDocument> expected(bootstrap.begin(), bootstrap.end());
    std::vector<std::size_t> order(items);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t chunk = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
      for (std::size_t k = 0; k < chunk && pos < order.size(); ++k, ++pos) {
        const auto& item = batch[order[pos]];
        const auto rec = store.get(item.key());
        if (!rec->classification || !rec->classification->uncertain) continue;
        const Label l = kLabels[std::uniform_int_distribution<int>(0, 2)(rng)];
        learner.apply_label(item.key(), to_string(l), "t");
        expected.push_back({featurize(item.text), l});
      }
      const auto pending = learner.pending_events();
      if (pending.empty()) continue;
      const auto result = learner.retrain(pending);
      ++retrains;
      const ModelSnapshot full = train(expected, cfg.alpha, result.new_version);
      expect(*store.current_model() == full,
             "sequence " + std::to_string(n) + " version " + std::to_string(result.new_version) + " differs");
      const auto counts = store.current_model();
      expect(counts->document_count() == static_cast<std::int64_t>(expected.size()), "document count");
    }
  }
  const double secs = seconds_since(t0);
  expect(secs < 10.0, "took " + fmt(secs) + "s");
  return std::to_string(kSequences) + " sequences, " + std::to_string(retrains) + " retrains compared, " +
         fmt(secs) + "s";
}

// ---------------------------------------------------------------------------

// True when the gate admits a label for this record right now.
bool gate_open(const JoinedRecord& r) {
  return r.classification && r.classification->uncertain && !r.classification->ground_truth && !r.label_event;
}

std::string uncertainty_gate() {
  std::mt19937_64 rng(303);
  ManualClock clock(from_unix(1'550'000'000));

  // (a) confident items are refused.
  int refused = 0;
  for (int round = 0; round < 20; ++round) {
    Store store;
    ActiveLearner learner(store, clock, {}, random_corpus(rng, 20));
    std::vector<FeedbackItem> items;
    for (int i = 0; i < 40; ++i) items.push_back(make_item("a" + std::to_string(i), join(random_tokens(rng, 8)), i));
    store.upsert_items(items);
    learner.train_from_bootstrap();
    for (const auto& it : items) {
      const auto rec = store.get(it.key());
      if (rec->classification->margin < kDefaultTau) continue;
      for (Label l : kLabels) {
        expect(error_of([&] { learner.apply_label(it.key(), to_string(l), "t"); }) == ErrorCode::not_uncertain,
               "confident item accepted a label");
        ++refused;
      }
    }
  }
  expect(refused > 0, "no confident items generated");

  // (b) random operation sequences; every call is checked against an
  // independent view of the gate, then the event log is audited.
  constexpr int kOps = 10'000;
  Store store;
  ActiveLearningConfig cfg;
  cfg.tau = 0.3;
  ActiveLearner learner(store, clock, cfg, random_corpus(rng, 12));
  int next_id = 0;
  int accepted = 0;
  int rejected = 0;
  std::uniform_int_distribution<int> op(0, 99);
  for (int i = 0; i < kOps; ++i) {
    const int o = op(rng);
    if (o < 15 || store.item_count() == 0) {
      std::vector<FeedbackItem> items;
      const int k = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int j = 0; j < k && store.item_count() < 250; ++j) {
        items.push_back(make_item("g" + std::to_string(next_id++), join(random_tokens(rng, 5)), next_id));
      }
      store.upsert_items(items);
      if (store.current_model()) learner.reclassify_stale();
    } else if (o < 20) {
      learner.train_from_bootstrap();
    } else if (o < 30) {
      learner.retrain_if_due(op(rng) < 50);
    } else if (o < 33) {
      clock.advance(60s);
    } else {
      const std::string key = make_item_key(Source::app_store, "g" + std::to_string(
                                                                     std::uniform_int_distribution<int>(0, next_id)(rng)));
      const Label l = kLabels[std::uniform_int_distribution<int>(0, 2)(rng)];
      const auto before = store.get(key);
      const auto events_before = store.label_events().size();
      try {
        learner.apply_label(key, to_string(l), "t");
        expect(before && gate_open(*before), "label accepted for gate-failing item " + key);
        ++accepted;
      } catch (const Error& e) {
        expect(!before || !gate_open(*before), "gate-open item refused: " + std::string(e.what()));
        expect(store.label_events().size() == events_before, "refused label left an event");
        ++rejected;
      }
    }
  }
  for (const auto& e : store.label_events()) {
    bool found = false;
    for (const auto& c : store.classification_history(e.item_id)) {
      if (c.model_version == e.model_version_at_decision && c.uncertain && !c.ground_truth &&
          c.label == e.prior_label) {
        found = true;
      }
    }
    expect(found, "event for " + e.item_id + " has no uncertain classification at its decision version");
  }
  expect(accepted > 0 && rejected > 0, "operation mix did not exercise both outcomes");

  // (c) labeled items never return to the queue.
  Store qstore;
  ActiveLearningConfig qcfg;
  qcfg.tau = 0.5;
  ActiveLearner qlearner(qstore, clock, qcfg, random_corpus(rng, 15));
  std::vector<FeedbackItem> qitems;
  for (int i = 0; i < 300; ++i) qitems.push_back(make_item("q" + std::to_string(i), join(random_tokens(rng, 4)), i));
  qstore.upsert_items(qitems);
  qlearner.train_from_bootstrap();
  std::set<std::string> labeled;
  constexpr int kCycles = 6;
  for (int cycle = 0; cycle < kCycles; ++cycle) {
    const auto queue = qlearner.uncertain_queue({}, 50);
    expect(!queue.empty(), "queue empty at cycle " + std::to_string(cycle));
    for (const auto& c : queue) expect(!labeled.count(c.item_id), c.item_id + " reappeared in the queue");
    for (std::size_t k = 0; k < std::min<std::size_t>(queue.size(), 8); ++k) {
      qlearner.apply_label(queue[k].item_id, to_string(queue[k].allowed_relabels[k % 2]), "t");
      labeled.insert(queue[k].item_id);
    }
    qlearner.retrain(qlearner.pending_events());
  }
  for (const auto& c : qlearner.uncertain_queue({}, 50)) {
    expect(!labeled.count(c.item_id), c.item_id + " reappeared after the last retrain");
  }
  return std::to_string(refused) + " confident refusals, " + std::to_string(kOps) + " ops (" +
         std::to_string(accepted) + " accepted, " + std::to_string(rejected) + " refused), " +
         std::to_string(kCycles) + " retrain cycles";
}

// ---------------------------------------------------------------------------

std::string aggregation_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(404);
  const std::vector<DisplayZone> zones{DisplayZone(), DisplayZone::load("Europe/Berlin"),
                                       DisplayZone::load("America/New_York")};
  const std::vector<std::string> keywords{"crash", "LOGIN", "sync", "xyz"};
  const std::int64_t base = to_unix(parse_rfc3339("2019-01-01T00:00:00Z"));
  const std::int64_t year = 365 * 86400;
  constexpr int kStores = 500;
  std::int64_t items_total = 0;

  ModelSnapshot model;
  model.version = 1;
  model.class_doc_counts = {1, 1, 1};

  for (int n = 0; n < kStores; ++n) {
    Store store;
    store.put_model(model);
    const int count = std::uniform_int_distribution<int>(0, 2000)(rng);
    items_total += count;
    WriteBatch batch;
    std::uniform_int_distribution<std::int64_t> when(base, base + year - 1);
    std::uniform_int_distribution<int> die(0, 9);
    for (int i = 0; i < count; ++i) {
      const Source src = static_cast<Source>(die(rng) % 3);
      const std::string lang = die(rng) < 7 ? "en" : (die(rng) < 5 ? "de" : "und");
      auto item = make_item("x" + std::to_string(i), join(random_tokens(rng, 4)), when(rng), src, lang);
      const std::string key = item.key();
      batch.add_item(std::move(item));
      if (die(rng) == 0) continue;  // left pending
      Classification c;
      c.item_id = key;
      c.label = kLabels[die(rng) % 3];
      c.probabilities[index_of(c.label)] = 1.0;
      c.model_version = 1;
      batch.put_classification(c);
      if (die(rng) < 3) {
        const Label l = kLabels[die(rng) % 3];
        batch.put_label_event({key, l, l == c.label ? LabelAction::agree : LabelAction::relabel, c.label, "t",
                               from_unix(base), 1});
      }
      if (die(rng) < 5) {
        const double v = std::uniform_real_distribution<double>(-1, 1)(rng);
        batch.put_sentiment(key, SentimentScore{v, polarity_of(v), 1});
      }
    }
    store.commit(batch);
    const auto records = store.records();

    for (int f = 0; f < 4; ++f) {
      FocusFilter filter;
      if (die(rng) < 3) filter.keyword = keywords[die(rng) % keywords.size()];
      if (die(rng) < 3) filter.sources = std::set<Source>{static_cast<Source>(die(rng) % 3)};
      if (die(rng) < 2) filter.languages = std::set<std::string>{die(rng) < 5 ? "en" : "de"};
      if (die(rng) < 3) {
        filter.labels.emplace();
        for (Label l : kLabels) {
          if (die(rng) < 5) filter.labels->insert(l);
        }
      }
      filter.relevant_only = die(rng) < 2;
      std::int64_t from = when(rng);
      std::int64_t to = when(rng);
      if (from > to) std::swap(from, to);
      if (from == to) ++to;
      const Bucket bucket = static_cast<Bucket>(die(rng) % 3);
      if (bucket == Bucket::hour && to - from >= 9000 * 3600) to = from + 9000 * 3600;
      filter.from = from_unix(from);
      filter.to = from_unix(to);
      const auto& zone = zones[die(rng) % zones.size()];

      const auto filtered = apply_filter(records, filter);
      std::int64_t oracle_count = 0;
      for (const auto& r : records) oracle_count += oracle::filter_accepts(r, filter) ? 1 : 0;
      const auto grid = heatmap(records, filter, zone);
      std::int64_t cell_sum = 0;
      for (const auto& row : grid.cells) {
        for (auto c : row) cell_sum += c;
      }
      FocusFilter untimed = filter;
      untimed.from.reset();
      untimed.to.reset();
      const auto series = time_series(records, from_unix(from), from_unix(to), bucket, untimed, zone);
      std::int64_t series_sum = 0;
      for (const auto& p : series.points) series_sum += p.total();

      const auto size = static_cast<std::int64_t>(filtered.size());
      expect(size == oracle_count, "apply_filter " + std::to_string(size) + " vs oracle " +
                                       std::to_string(oracle_count) + " in store " + std::to_string(n));
      expect(grid.total == size && cell_sum == size,
             "heatmap total " + std::to_string(grid.total) + " vs " + std::to_string(size));
      expect(series_sum == size, "series sum " + std::to_string(series_sum) + " vs " + std::to_string(size));
    }
  }

  // Trend windows: boundaries belong to exactly one window.
  constexpr int kBoundaries = 1000;
  std::uniform_int_distribution<std::int64_t> when(base, base + year);
  for (int i = 0; i < kBoundaries; ++i) {
    const auto window = static_cast<TrendWindow>(i % 3);
    const Timestamp now = from_unix(when(rng));
    const auto [cur, prev] = trend_windows(window, now);
    const auto w = window_length(window);
    expect(cur.to == now && cur.from == now - w && prev.to == cur.from && prev.from == cur.from - w,
           "windows not adjacent at " + format_rfc3339(now));
    std::vector<JoinedRecord> recs;
    int k = 0;
    for (Timestamp t : {prev.from - 1s, prev.from, cur.from - 1s, cur.from, now - 1s, now}) {
      JoinedRecord r;
      r.item = make_item("b" + std::to_string(k++), "x", to_unix(t));
      Classification c;
      c.item_id = r.item.key();
      c.label = Label::problem_report;
      r.classification = c;
      recs.push_back(std::move(r));
    }
    const auto report = trend_report(recs, window, now, {});
    expect(report.problem_count == 2 && report.previous_problem_count == 2,
           "boundary counts " + std::to_string(report.problem_count) + "/" +
               std::to_string(report.previous_problem_count) + " at " + format_rfc3339(now));
  }
  const double secs = seconds_since(t0);
  return std::to_string(kStores) + " stores (" + std::to_string(items_total) + " items), " +
         std::to_string(kStores * 4) + " filters, " + std::to_string(kBoundaries) + " boundary instants, " +
         fmt(secs) + "s";
}

// ---------------------------------------------------------------------------

std::string sentiment_properties() {
  const SentimentLexicon small = testing_support::small_lexicon();
  auto s = score_sentiment(std::vector<std::string>{"good", "good", "bad"}, small);
  expect(s.value == 1.0 / 3.0 && s.polarity == Polarity::positive && s.hits == 3, "good good bad");
  s = score_sentiment(std::vector<std::string>{"not", "good"}, small);
  expect(s.value == -1.0 && s.polarity == Polarity::negative && s.hits == 1, "not good");
  s = score_sentiment(std::vector<std::string>{"the", "weather", "today"}, small);
  expect(s.value == 0.0 && s.polarity == Polarity::neutral && s.hits == 0, "no lexicon hits");

  std::mt19937_64 rng(505);
  const std::vector<std::string> words{"good", "bad", "meh", "fine", "awful", "ok", "not", "never", "x", "y"};
  constexpr int kCases = 20'000;
  for (int n = 0; n < kCases; ++n) {
    std::unordered_map<std::string, double> entries;
    for (const char* w : {"good", "bad", "meh", "fine", "awful"}) {
      if (rng() % 4 == 0) continue;
      double v = 0;
      while (v == 0) v = std::uniform_real_distribution<double>(-1, 1)(rng);
      entries[w] = v;
    }
    const SentimentLexicon lex(entries, SentimentLexicon::default_negators());
    const SentimentLexicon neg = lex.negated();
    std::vector<std::string> tokens(std::uniform_int_distribution<int>(0, 12)(rng));
    for (auto& t : tokens) t = words[rng() % words.size()];
    const auto a = score_sentiment(tokens, lex);
    const auto b = score_sentiment(tokens, neg);
    expect(b.value == -a.value && b.hits == a.hits, "antisymmetry");
    const Polarity mirrored = a.polarity == Polarity::positive   ? Polarity::negative
                              : a.polarity == Polarity::negative ? Polarity::positive
                                                                 : Polarity::neutral;
    expect(b.polarity == mirrored, "polarity mirror");
    expect(a.value >= -1.0 && a.value <= 1.0, "bounds");
    expect(a.hits > 0 || (a.value == 0.0 && a.polarity == Polarity::neutral), "no hits must be neutral zero");
    expect(a.polarity == polarity_of(a.value), "polarity consistent with value");
  }
  for (int n = 0; n < kCases; ++n) {
    const double v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const Polarity p = polarity_of(v);
    const bool expected_neutral = std::abs(v) <= kNeutralBand;
    expect((p == Polarity::neutral) == expected_neutral, "neutral band at " + std::to_string(v));
    if (!expected_neutral) expect((p == Polarity::positive) == (v > 0), "sign at " + std::to_string(v));
  }
  return "3 worked examples, " + std::to_string(kCases) + " random lexicon/text pairs";
}

// ---------------------------------------------------------------------------

Config fixture_config(const std::filesystem::path& storage) {
  Config cfg = testing_support::test_config(storage);
  const auto fixtures = testing_support::data_dir() / "fixtures";
  cfg.connectors.push_back({"store", Source::app_store, fixtures / "app_store.ndjson", {}});
  cfg.connectors.push_back({"tweets", Source::microblog, fixtures / "microblog.ndjson", {}});
  return cfg;
}

std::string pipeline_restart() {
  TempDir dir;
  ManualClock clock(parse_rfc3339("2019-12-31T12:00:00Z"));
  std::vector<std::pair<std::int64_t, std::string>> boundaries;
  std::int64_t first = 0;
  std::int64_t second = 0;
  std::string final_dump;
  {
    ServiceDeps deps;
    deps.clock = &clock;
    Service service(fixture_config(dir.path()), std::move(deps));
    service.store().on_commit([&](std::int64_t seq) { boundaries.emplace_back(seq, service.store().dump_index()); });
    service.learner().train_from_bootstrap();
    first = service.run_once().stored;
    // Labels between runs add label-event commits and a retrain at the next run.
    for (const auto& c : service.learner().uncertain_queue({}, 3)) {
      service.learner().apply_label(c.item_id, to_string(c.allowed_relabels.front()), "reviewer");
    }
    clock.advance(7200s);
    second = service.run_once().stored;
    final_dump = service.store().dump_index();
  }
  expect(first == 200, "first run stored " + std::to_string(first));
  expect(second == 0, "second run stored " + std::to_string(second));

  const auto log = dir.path() / Store::kLogFileName;
  const auto entries = Store::scan_log(log);
  const std::string bytes = testing_support::read_file(log);
  std::map<std::int64_t, std::uint64_t> end_of;
  for (const auto& e : entries) end_of[e.write_seq] = e.end_offset;

  auto replay = [&](std::uint64_t length) {
    TempDir copy;
    {
      std::ofstream out(copy.path() / Store::kLogFileName, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(length));
    }
    Store reopened(copy.path());
    return reopened.dump_index();
  };

  {
    Store reopened(dir.path());
    expect(reopened.dump_index() == final_dump, "full replay differs");
  }
  expect(!boundaries.empty(), "no commits observed");
  std::uint64_t previous_end = 0;
  std::string previous_dump = Store().dump_index();
  int torn = 0;
  for (const auto& [seq, dump] : boundaries) {
    expect(end_of.count(seq) == 1, "commit seq " + std::to_string(seq) + " missing from the log");
    const auto end = end_of[seq];
    expect(replay(end) == dump, "replay to seq " + std::to_string(seq) + " differs");
    if (end - previous_end > 8) {
      // A crash halfway through this commit's records restores the previous state.
      expect(replay(previous_end + (end - previous_end) / 2) == previous_dump,
             "torn commit at seq " + std::to_string(seq) + " not rolled back");
      ++torn;
    }
    previous_end = end;
    previous_dump = dump;
  }
  return "runs stored " + std::to_string(first) + " then " + std::to_string(second) + ", " +
         std::to_string(boundaries.size()) + " commit boundaries and " + std::to_string(torn) +
         " torn commits replayed byte-identically";
}

// ---------------------------------------------------------------------------

std::string scheduler_contract() {
  expect(kDefaultIntervalSeconds == 2 * 60 * 60, "default interval is not two hours");
  expect(Config{}.interval_seconds == 7200, "config default interval");
  expect(error_of([] {
           ManualClock c(from_unix(0));
           Scheduler s(c, 30s, [](Timestamp) {});
         }) == ErrorCode::bad_interval,
         "sub-minute interval accepted");

  // Default schedule: starts at 0, 7200, 14400 on the manual clock.
  {
    ManualClock clock(from_unix(0));
    std::mutex mu;
    std::vector<std::int64_t> starts;
    auto s = schedule(clock, std::chrono::seconds(Config{}.interval_seconds), [&](Timestamp t) {
      std::lock_guard lock(mu);
      starts.push_back(to_unix(t));
    });
    // A run finishing takes real time even though the manual clock stands
    // still; let it settle before the next tick so it is not an overlap.
    auto settle = [&] {
      clock.wait_for_sleepers(1);
      while (s->in_flight()) std::this_thread::yield();
    };
    settle();
    clock.advance(7200s);
    settle();
    clock.advance(7200s);
    settle();
    s->stop();
    std::lock_guard lock(mu);
    std::string seen;
    for (auto t : starts) seen += " " + std::to_string(t);
    expect(starts == std::vector<std::int64_t>{0, 7200, 14400}, "default schedule start times:" + seen);
  }

  // Overlap: each run takes 70s of clock time against a 60s interval, so
  // every other tick lands on a run in flight and is skipped.
  constexpr int kCycles = 5;
  ManualClock clock(from_unix(0));
  std::atomic<int> runs{0};
  std::stop_source never;
  auto s = schedule(clock, 60s, [&](Timestamp t) {
    ++runs;
    clock.sleep_until(t + 70s, never.get_token());
  });
  clock.wait_for_sleepers(2);  // timer at 60, run until 70
  for (int i = 0; i < kCycles; ++i) {
    clock.advance(60s);          // tick during the run: skipped
    clock.wait_for_sleepers(2);
    clock.advance(10s);          // run finishes
    clock.wait_for_sleepers(1);
    while (s->in_flight()) std::this_thread::yield();
    clock.advance(50s);          // next tick starts a run
    clock.wait_for_sleepers(2);
  }
  const auto mid = s->stats();
  expect(mid.skipped == kCycles, "skipped " + std::to_string(mid.skipped));
  expect(mid.started == kCycles + 1, "started " + std::to_string(mid.started));

  // stop() waits for the in-flight run, then nothing else fires.
  std::thread stopper([&] { s->stop(); });
  clock.advance(70s);
  stopper.join();
  const int after_stop = runs.load();
  clock.advance(3600s);
  expect(runs.load() == after_stop, "run fired after stop");
  expect(!s->in_flight(), "run still in flight after stop");
  expect(s->tick(clock.now()) == Scheduler::TickOutcome::stopped, "tick after stop");
  return "default 7200s, " + std::to_string(mid.skipped) + " overlap skips in " + std::to_string(kCycles) +
         " cycles, clean stop";
}

// ---------------------------------------------------------------------------

std::string end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  TempDir dir;
  ManualClock clock(parse_rfc3339("2019-12-31T12:00:00Z"));
  ServiceDeps deps;
  deps.clock = &clock;
  Service service(fixture_config(dir.path()), std::move(deps));
  ApiRouter router(service);

  auto call = [&](const std::string& method, const std::string& path,
                  std::multimap<std::string, std::string> query = {}, std::string body = {}) {
    return router.handle(ApiRequest{method, path, std::move(query), {}, std::move(body)});
  };
  auto ok = [&](const std::string& method, const std::string& path,
                std::multimap<std::string, std::string> query = {}, std::string body = {}) {
    const auto r = call(method, path, std::move(query), std::move(body));
    expect(r.status == 200, method + " " + path + " returned " + std::to_string(r.status) + ": " + r.body);
    return json::parse(r.body);
  };
  auto fails = [&](int status, const std::string& code, const std::string& method, const std::string& path,
                   std::multimap<std::string, std::string> query = {}, std::string body = {}) {
    const auto r = call(method, path, std::move(query), std::move(body));
    const auto j = json::parse(r.body);
    expect(r.status == status && j["error"]["code"] == code && j["error"]["status"] == status,
           method + " " + path + " expected " + code + ", got " + std::to_string(r.status) + " " + r.body);
  };

  fails(409, "UNTRAINED_MODEL", "GET", "/api/v1/review/queue");
  service.learner().train_from_bootstrap();
  const auto run = ok("POST", "/api/v1/pipeline/run");
  expect(run["stored"] == 200 && run["classified"] == 200, "pipeline run counts: " + run.dump());

  const auto health = ok("GET", "/api/v1/health");
  expect(health["items"] == 200 && health["model_version"] == 1 && health["status"] == "ok", "health");

  const auto heat = ok("GET", "/api/v1/dashboard/heatmap");
  expect(heat["total"] == 200 && heat["cells"].size() == 7 && heat["cells"][0].size() == 24, "heatmap shape");
  const auto all = ok("GET", "/api/v1/dashboard/history",
                      {{"from", "2019-01-01T00:00:00Z"}, {"to", "2020-01-01T00:00:00Z"}, {"bucket", "day"}});
  std::int64_t per_label[3] = {0, 0, 0};
  for (const auto& p : all["points"]) {
    per_label[0] += p["problem_count"].get<std::int64_t>();
    per_label[1] += p["inquiry_count"].get<std::int64_t>();
    per_label[2] += p["irrelevant_count"].get<std::int64_t>();
    expect(p["pending_count"] == 0, "pending items after training");
  }
  expect(all["points"].size() == 365, "history bucket count");
  expect(per_label[0] + per_label[1] + per_label[2] == 200, "history sum");

  const auto problems = ok("GET", "/api/v1/focus/problems", {{"limit", "500"}});
  const auto inquiries = ok("GET", "/api/v1/focus/inquiries", {{"limit", "500"}});
  expect(problems["total"] == per_label[0] && inquiries["total"] == per_label[1], "focus totals match history");
  expect(ok("GET", "/api/v1/dashboard/heatmap", {{"labels", "problem_report"}})["total"] == per_label[0],
         "label-filtered heatmap matches focus view");
  expect(ok("GET", "/api/v1/dashboard/heatmap", {{"relevant_only", "true"}})["total"] == per_label[0] + per_label[1],
         "relevant-only heatmap");
  for (const auto& it : problems["items"]) {
    expect(it.contains("item") && it.contains("classification") && it.contains("sentiment") &&
               it.contains("review") && it["effective_label"] == "problem_report",
           "focus item shape");
  }
  const auto trend = ok("GET", "/api/v1/dashboard/trends", {{"window", "month"}});
  for (const char* k : {"problem_count", "inquiry_count", "avg_sentiment", "previous_values", "deltas", "current"}) {
    expect(trend.contains(k), std::string("trend field ") + k);
  }

  const auto queue = ok("GET", "/api/v1/review/queue");
  expect(!queue["items"].empty(), "review queue empty");
  const auto& first = queue["items"][0];
  const std::string id = first["item_id"];
  const std::string relabel = first["allowed_relabels"][0];
  const auto event = ok("POST", "/api/v1/feedback/" + id + "/label", {}, json{{"label", relabel}}.dump());
  expect(event["action"] == "relabel" && event["assigned_label"] == relabel, "label event shape");

  // A confident item for the NOT_UNCERTAIN path.
  std::string confident;
  for (const auto& r : service.store().records()) {
    if (r.classification && !r.classification->uncertain && !r.label_event) {
      confident = r.item.key();
      break;
    }
  }
  expect(!confident.empty(), "no confident item in the fixture");

  fails(409, "ALREADY_LABELED", "POST", "/api/v1/feedback/" + id + "/label", {}, R"({"label":"inquiry"})");
  fails(409, "NOT_UNCERTAIN", "POST", "/api/v1/feedback/" + confident + "/label", {}, R"({"label":"inquiry"})");
  fails(404, "NOT_FOUND", "POST", "/api/v1/feedback/app_store:nope/label", {}, R"({"label":"inquiry"})");
  fails(404, "NO_ROUTE", "GET", "/api/v1/unknown");
  fails(400, "UNKNOWN_LABEL", "POST", "/api/v1/feedback/" + id + "/label", {}, R"({"label":"bug"})");
  fails(400, "BAD_RANGE", "GET", "/api/v1/dashboard/heatmap",
        {{"from", "2019-06-01T00:00:00Z"}, {"to", "2019-05-01T00:00:00Z"}});
  fails(400, "TOO_MANY_BUCKETS", "GET", "/api/v1/dashboard/history",
        {{"from", "2000-01-01T00:00:00Z"}, {"to", "2019-01-01T00:00:00Z"}, {"bucket", "hour"}});
  fails(400, "BAD_PAGE", "GET", "/api/v1/focus/problems", {{"limit", "0"}});
  fails(400, "BAD_TIMESTAMP", "GET", "/api/v1/dashboard/heatmap", {{"from", "last tuesday"}});
  fails(400, "BAD_REQUEST", "GET", "/api/v1/dashboard/trends", {{"window", "fortnight"}});

  const auto partial = call("POST", "/api/v1/ingest", {{"source_kind", "microblog"}},
                            "{\"id\":\"e1\",\"text\":\"app crashes\",\"created_at\":\"2019-12-30T00:00:00Z\"}\n"
                            "{\"id\":\"e2\",\"created_at\":\"2019-12-30T00:00:00Z\"}\n");
  const auto pj = json::parse(partial.body);
  expect(partial.status == 207 && pj["stored"] == 1 && pj["connectors"][0]["rejections"][0]["error"] == "MissingField",
         "partial ingest: " + partial.body);

  const auto rerun = ok("POST", "/api/v1/pipeline/run");
  expect(rerun["stored"] == 0 && rerun["retrained"] == true, "second run: " + rerun.dump());
  expect(ok("GET", "/api/v1/health")["items"] == 201, "item count after ingest");
  const auto after = ok("GET", "/api/v1/review/queue");
  for (const auto& c : after["items"]) expect(c["item_id"] != id, "labeled item back in the queue");

  const double secs = seconds_since(t0);
  expect(secs < 30.0, "took " + fmt(secs) + "s");
  return "200 fixture items, 10 routes, 10 error paths, " + fmt(secs) + "s";
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"classifier-oracle-equivalence", classifier_oracle},
      {"incremental-equals-full-retrain", incremental_retrain},
      {"uncertainty-gate", uncertainty_gate},
      {"aggregation-identities", aggregation_identities},
      {"sentiment-properties", sentiment_properties},
      {"pipeline-idempotence-and-restart", pipeline_restart},
      {"scheduler-contract", scheduler_contract},
      {"end-to-end-fixture", end_to_end},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    try {
      const std::string detail = check();
      std::cout << "PASS " << name << ": " << detail << std::endl;
    } catch (const std::exception& e) {
      ++failed;
      std::cout << "FAIL " << name << ": " << e.what() << std::endl;
    }
  }
  return failed == 0 ? 0 : 1;
}
