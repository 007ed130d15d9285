#include "reqintel/ingestion.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <nlohmann/json.hpp>

#include "reqintel/text.hpp"
#include "reqintel/timeutil.hpp"

namespace reqintel {

std::string make_item_key(Source source, std::string_view id) {
  std::string key(to_string(source));
  key += ':';
  key += id;
  return key;
}

std::string FeedbackItem::key() const { return make_item_key(source, id); }

RawRecord parse_record_line(std::string_view line, Source kind) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::bad_record, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::bad_record, "record is not an object");

  RawRecord rec;
  rec.source_kind = kind;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    if (value.is_string()) {
      rec.payload[key] = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      rec.payload[key] = value.dump();
    } else {
      throw Error(ErrorCode::bad_record, "field '" + key + "' is not a scalar");
    }
  }
  return rec;
}

std::optional<std::string> Pseudonymizer::pseudonym(std::string_view author) const {
  if (author.empty()) return std::nullopt;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const unsigned char sep = 0;
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, salt_.data(), salt_.size());
  EVP_DigestUpdate(ctx, &sep, 1);
  EVP_DigestUpdate(ctx, author.data(), author.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "u_";
  for (unsigned i = 0; i < 16 && i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

const std::string* field(const RawRecord& r, const std::string& name) {
  auto it = r.payload.find(name);
  return it == r.payload.end() ? nullptr : &it->second;
}

std::string required(const RawRecord& r, const std::string& name) {
  const std::string* v = field(r, name);
  std::string trimmed = v ? trim(*v) : std::string{};
  if (trimmed.empty()) throw Error(ErrorCode::missing_field, name);
  return trimmed;
}

}  // namespace

FeedbackItem normalize_record(const RawRecord& record, const Pseudonymizer& pseudonymizer,
                              Timestamp ingested_at) {
  FeedbackItem item;
  item.source = record.source_kind;
  item.id = required(record, "id");
  item.text = required(record, "text");
  item.created_at = parse_rfc3339(required(record, "created_at"));
  if (item.created_at > ingested_at) {
    throw Error(ErrorCode::bad_timestamp, "created_at lies after ingestion time");
  }
  item.ingested_at = ingested_at;

  if (const std::string* rating = field(record, "rating");
      rating && !trim(*rating).empty() && item.source == Source::app_store) {
    const std::string r = trim(*rating);
    int value = 0;
    auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), value);
    if (ec != std::errc{} || ptr != r.data() + r.size() || value < 1 || value > 5) {
      throw Error(ErrorCode::bad_rating, "rating '" + r + "' outside 1..5");
    }
    item.rating = value;
  }

  if (const std::string* lang = field(record, "lang"); lang && !trim(*lang).empty()) {
    item.language = to_lower(trim(*lang));
  } else {
    item.language = detect_language(item.text);
  }

  if (const std::string* author = field(record, "author")) {
    item.author_ref = pseudonymizer.pseudonym(trim(*author));
  }
  return item;
}

const std::set<std::string>& stopword_profile(std::string_view language) {
  static const std::set<std::string> en{
      "the",   "and",   "is",    "are",   "was",   "were",  "be",    "been",  "to",    "of",
      "in",    "on",    "at",    "for",   "with",  "it",    "its",   "this",  "that",  "these",
      "those", "when",  "what",  "which", "who",   "how",   "why",   "where", "my",    "your",
      "me",    "you",   "we",    "they",  "he",    "she",   "him",   "her",   "them",  "our",
      "from",  "by",    "or",    "but",   "not",   "no",    "can",   "could", "would", "should",
      "will",  "do",    "does",  "did",   "have",  "has",   "had",   "an",    "as",    "so",
      "if",    "then",  "than",  "there", "here",  "all",   "any",   "just",  "very",  "too",
      "also",  "after", "every", "again", "into",  "about", "only",  "please"};
  static const std::set<std::string> de{
      "der",   "die",   "das",   "und",   "ist",   "sind",  "war",   "ein",   "eine",  "einen",
      "dem",   "den",   "des",   "nicht", "mit",   "auf",   "für",   "von",   "zu",    "im",
      "beim",  "bei",   "ab",    "aus",   "es",    "ich",   "du",    "wir",   "ihr",   "sie",
      "mein",  "meine", "dein",  "wenn",  "wie",   "was",   "warum", "noch",  "auch",  "aber",
      "oder",  "nur",   "schon", "immer", "kein",  "keine", "seit",  "nach",  "vor",   "über",
      "bitte", "kann",  "können", "wird", "hat",   "habe",  "doch",  "mehr",  "sehr",  "dass",
      "man",   "mich",  "mir",   "uns",   "zum",   "zur",   "um",    "am",    "an",    "in"};
  static const std::set<std::string> none;
  if (language == "en") return en;
  if (language == "de") return de;
  return none;
}

namespace {

constexpr std::string_view kProfileOrder[] = {"en", "de"};

}  // namespace

double stopword_overlap(std::string_view text, std::string_view language) {
  const auto tokens = tokenize(text);
  const std::set<std::string> distinct(tokens.begin(), tokens.end());
  if (distinct.empty()) return 0.0;
  const auto& profile = stopword_profile(language);
  std::size_t hits = 0;
  for (const auto& t : distinct) hits += profile.count(t);
  return static_cast<double>(hits) / static_cast<double>(distinct.size());
}

std::string detect_language(std::string_view text) {
  const auto tokens = tokenize(text);
  if (tokens.size() < kLanguageMinTokens) return "und";
  std::string best = "und";
  double best_ratio = 0.0;
  for (std::string_view lang : kProfileOrder) {
    const double ratio = stopword_overlap(text, lang);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = std::string(lang);
    }
  }
  return best_ratio < kLanguageMinOverlap ? "und" : best;
}

std::vector<FeedbackItem> deduplicate(std::span<const FeedbackItem> candidates,
                                      const std::set<ItemIdentity>& known) {
  std::vector<FeedbackItem> out;
  std::set<ItemIdentity> seen;
  for (const auto& item : candidates) {
    ItemIdentity ident{item.source, item.id};
    if (known.count(ident) || !seen.insert(ident).second) continue;
    out.push_back(item);
  }
  return out;
}

}  // namespace reqintel
