#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "synhash/common.hpp"

namespace synhash {

struct Document {
  std::string id;
  std::string lang;
  std::vector<std::string> lemmas;
  std::set<std::string> codes;  // EUROVOC concept ids, possibly empty
};

/// Lexicographically ordered term list with its inverse index.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Terms must be unique; they are sorted on construction.
  explicit Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
    std::sort(terms_.begin(), terms_.end());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i > 0 && terms_[i] == terms_[i - 1])
        throw DataError("duplicate vocabulary term '" + terms_[i] + "'");
      index_.emplace(terms_[i], static_cast<int>(i));
    }
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(int id) const { return terms_.at(static_cast<std::size_t>(id)); }

  std::optional<int> id(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::string_view term) const { return id(term).has_value(); }

  /// Term ids of the in-vocabulary lemmas, in order; others are dropped.
  std::vector<int> encode(std::span<const std::string> lemmas) const {
    std::vector<int> ids;
    ids.reserve(lemmas.size());
    for (const auto& l : lemmas)
      if (auto i = id(l)) ids.push_back(*i);
    return ids;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.terms_ == b.terms_; }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int> index_;
};

namespace detail {

// Lowercases ASCII and the Latin-1 supplement capitals (U+00C0..U+00DE,
// except U+00D7), which covers the accented letters of en/es/fr/pt.
inline std::string to_lower_utf8(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      unsigned char n = static_cast<unsigned char>(out[i + 1]);
      if (n >= 0x80 && n <= 0x9E && n != 0x97) out[i + 1] = static_cast<char>(n + 0x20);
      ++i;
    }
  }
  return out;
}

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_space(static_cast<unsigned char>(c)); });
}

// Length in code points, so min_len treats "ção" as three characters.
inline std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Rule-based fallback for when pre-lemmatized input is unavailable:
/// lowercase, turn punctuation and digits into separators, split on
/// whitespace, then drop stopwords and terms shorter than `min_len`.
inline std::vector<std::string> normalize(std::string_view raw_text, std::string_view lang,
                                          const std::unordered_set<std::string>& stopwords,
                                          std::size_t min_len = 2) {
  (void)lang;  // rules are language-independent; stopwords carry the language
  if (min_len < 1) throw UsageError("normalize: min_len must be >= 1");
  std::string text = detail::to_lower_utf8(raw_text);
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (std::isalpha(c)) cleaned.push_back(static_cast<char>(c));
      else cleaned.push_back(' ');
      continue;
    }
    // Multi-byte punctuation: inverted marks, guillemets, middle dot, and the
    // General Punctuation block (quotes, dashes, ellipsis).
    if (c == 0xC2 && i + 1 < text.size()) {
      unsigned char n = static_cast<unsigned char>(text[i + 1]);
      if (n == 0xA1 || n == 0xAB || n == 0xBB || n == 0xBF || n == 0xB7 || n == 0xA0) {
        cleaned.push_back(' ');
        ++i;
        continue;
      }
    }
    if (c == 0xE2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        i + 2 < text.size()) {
      cleaned.push_back(' ');
      i += 2;
      continue;
    }
    cleaned.push_back(static_cast<char>(c));
  }

  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < cleaned.size()) {
    while (pos < cleaned.size() && cleaned[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < cleaned.size() && cleaned[end] != ' ') ++end;
    if (end > pos) {
      std::string tok = cleaned.substr(pos, end - pos);
      if (detail::utf8_length(tok) >= min_len && !stopwords.contains(tok)) out.push_back(std::move(tok));
    }
    pos = end;
  }
  return out;
}

/// One lemma per line; blank lines and lines starting with '#' are ignored.
inline std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    words.insert(detail::to_lower_utf8(t));
  }
  return words;
}

inline Document parse_document(std::string_view line) {
  auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw DataError("record is not a JSON object");
  for (const char* key : {"id", "lang", "lemmas"})
    if (!j.contains(key)) throw DataError(std::string("missing key '") + key + "'");
  Document doc;
  if (!j["id"].is_string() || !j["lang"].is_string() || !j["lemmas"].is_array())
    throw DataError("wrong type for id/lang/lemmas");
  doc.id = j["id"].get<std::string>();
  doc.lang = j["lang"].get<std::string>();
  if (doc.id.empty()) throw DataError("empty document id");
  for (const auto& l : j["lemmas"]) {
    if (!l.is_string()) throw DataError("non-string lemma");
    auto lemma = detail::to_lower_utf8(l.get<std::string>());
    if (lemma.empty() || detail::has_space(lemma))
      throw DataError("invalid lemma '" + lemma + "'");
    doc.lemmas.push_back(std::move(lemma));
  }
  if (j.contains("codes")) {
    if (!j["codes"].is_array()) throw DataError("codes must be an array");
    for (const auto& c : j["codes"]) {
      if (!c.is_string()) throw DataError("non-string code");
      doc.codes.insert(c.get<std::string>());
    }
  }
  return doc;
}

inline std::string to_json_line(const Document& doc) {
  nlohmann::json j = {{"id", doc.id}, {"lang", doc.lang}, {"lemmas", doc.lemmas}};
  j["codes"] = std::vector<std::string>(doc.codes.begin(), doc.codes.end());
  return j.dump();
}

/// Reads a JSONL corpus. Every record must declare `lang`; when
/// `known_langs` is non-empty, `lang` itself must be one of them.
inline std::vector<Document> load_corpus(const std::filesystem::path& path, const std::string& lang,
                                         std::span<const std::string> known_langs = {}) {
  if (!known_langs.empty() &&
      std::find(known_langs.begin(), known_langs.end(), lang) == known_langs.end())
    throw DataError("unknown language '" + lang + "'");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
    Document doc;
    try {
      doc = parse_document(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where() + "malformed record: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where() + e.what());
    }
    if (doc.lang != lang)
      throw DataError(where() + "document '" + doc.id + "' has lang '" + doc.lang + "', expected '" + lang + "'");
    if (!seen.insert(doc.id).second) throw DataError(where() + "duplicate document id '" + doc.id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

/// Keeps lemmas with min_df <= df and df / |docs| <= max_df_ratio.
inline Vocabulary build_vocabulary(std::span<const Document> docs, std::size_t min_df = 1,
                                   double max_df_ratio = 1.0) {
  if (docs.empty()) throw UsageError("build_vocabulary: no documents");
  if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0))
    throw UsageError("build_vocabulary: max_df_ratio must lie in (0, 1]");
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    std::set<std::string_view> uniq(d.lemmas.begin(), d.lemmas.end());
    for (auto l : uniq) ++df[std::string(l)];
  }
  const double n = static_cast<double>(docs.size());
  std::vector<std::string> terms;
  for (const auto& [term, count] : df)
    if (count >= min_df && static_cast<double>(count) / n <= max_df_ratio) terms.push_back(term);
  if (terms.empty()) throw DataError("vocabulary is empty after df filtering");
  return Vocabulary(std::move(terms));
}

}  // namespace synhash
