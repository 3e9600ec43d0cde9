#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "synhash/common.hpp"
#include "synhash/corpus.hpp"

namespace synhash {

/// Language-independent synset key of the form "<digits>-<pos>", pos one of
/// n, v, a, r, s.
class SynsetId {
 public:
  explicit SynsetId(std::string value) : value_(std::move(value)) {
    if (!valid(value_)) throw DataError("invalid synset id '" + value_ + "'");
  }

  static bool valid(std::string_view s) {
    auto dash = s.find('-');
    if (dash == 0 || dash == std::string_view::npos || dash + 2 != s.size()) return false;
    if (!std::all_of(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(dash),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return false;
    return std::string_view("nvars").find(s.back()) != std::string_view::npos;
  }

  const std::string& str() const { return value_; }

  auto operator<=>(const SynsetId&) const = default;

 private:
  std::string value_;
};

using SynsetSet = std::set<SynsetId>;

/// (lang, lowercased lemma) -> synsets, built from Open Multilingual WordNet
/// tab files. Immutable once loaded.
class SynsetLexicon {
 public:
  const std::set<std::string>& langs() const { return langs_; }
  std::size_t size() const { return entries_.size(); }

  /// Empty set for an unknown lemma; throws for a language that was never loaded.
  const SynsetSet& synsets_of(std::string_view lemma, const std::string& lang) const {
    if (!langs_.contains(lang)) throw UsageError("language '" + lang + "' is not loaded in the lexicon");
    auto it = entries_.find({lang, detail::to_lower_utf8(lemma)});
    return it == entries_.end() ? empty_ : it->second;
  }

  const std::map<std::pair<std::string, std::string>, SynsetSet>& entries() const { return entries_; }

  /// Adds a whole OMW tab file for `lang`.
  void load_file(const std::string& lang, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open OMW file " + path.string());
    std::string line;
    std::size_t lineno = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto fail = [&](const std::string& why) {
        return DataError(path.string() + ":" + std::to_string(lineno) + ": " + why);
      };
      auto t1 = line.find('\t');
      auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
        throw fail("expected three TAB-separated columns");
      std::string id = line.substr(0, t1);
      std::string relation = line.substr(t1 + 1, t2 - t1 - 1);
      std::string lemma = line.substr(t2 + 1);
      if (!SynsetId::valid(id)) throw fail("invalid synset id '" + id + "'");
      if (relation.find(':') == std::string::npos) throw fail("relation key must look like 'lang:lemma'");
      if (lemma.empty()) throw fail("empty lemma");
      std::replace(lemma.begin(), lemma.end(), '_', ' ');
      entries_[{lang, detail::to_lower_utf8(lemma)}].insert(SynsetId(id));
      ++rows;
    }
    if (rows == 0) throw DataError("OMW file " + path.string() + " has no valid rows");
    langs_.insert(lang);
  }

 private:
  std::map<std::pair<std::string, std::string>, SynsetSet> entries_;
  std::set<std::string> langs_;
  SynsetSet empty_;
};

inline SynsetLexicon load_omw(const std::map<std::string, std::filesystem::path>& paths) {
  SynsetLexicon lex;
  for (const auto& [lang, path] : paths) lex.load_file(lang, path);
  return lex;
}

}  // namespace synhash
