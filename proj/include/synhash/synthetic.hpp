#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "synhash/common.hpp"
#include "synhash/corpus.hpp"

namespace synhash::synthetic {

/// Planted-theme corpora in artificial languages with disjoint vocabularies.
/// Theme t owns synsets [t * synsets_per_theme, (t + 1) * synsets_per_theme);
/// each synset is expressed by `words_per_synset` words per language.
struct CorpusSpec {
  std::vector<std::string> languages{"xa", "xb"};
  int themes = 5;
  int synsets_per_theme = 10;
  int words_per_synset = 2;
  int docs_per_theme = 40;
  int doc_length = 60;
  double purity = 0.85;  // share of tokens drawn from the document's theme
  std::uint64_t seed = 7;
};

struct LanguageCorpus {
  std::string lang;
  std::vector<Document> docs;
  std::vector<std::string> omw_lines;  // "synset TAB lang:lemma TAB word"
};

struct Bundle {
  std::vector<LanguageCorpus> corpora;
  std::vector<std::string> taxonomy_lines;  // "concept TAB parent"
};

inline std::string synset_id(int s) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%08d-n", 10000000 + s);
  return buf;
}

// Digits are spelled with the letters a-j so that words survive normalize(),
// e.g. synset 12, variant 0 in "xa" -> "xasbcva".
inline std::string word(const std::string& lang, int synset, int variant) {
  auto spell = [](int n) {
    std::string s = std::to_string(n);
    for (auto& c : s) c = static_cast<char>('a' + (c - '0'));
    return s;
  };
  return lang + "s" + spell(synset) + "v" + spell(variant);
}

inline std::string theme_code(int t) { return "theme" + std::to_string(t); }

inline Bundle generate(const CorpusSpec& spec) {
  Bundle b;
  b.taxonomy_lines.push_back("themes\t");
  for (int t = 0; t < spec.themes; ++t) b.taxonomy_lines.push_back(theme_code(t) + "\tthemes");

  const int synsets = spec.themes * spec.synsets_per_theme;
  Rng root(spec.seed);
  for (std::size_t li = 0; li < spec.languages.size(); ++li) {
    const auto& lang = spec.languages[li];
    LanguageCorpus lc;
    lc.lang = lang;
    for (int s = 0; s < synsets; ++s)
      for (int v = 0; v < spec.words_per_synset; ++v)
        lc.omw_lines.push_back(synset_id(s) + "\t" + lang + ":lemma\t" + word(lang, s, v));

    Rng rng = root.split(fnv1a64(lang));
    for (int t = 0; t < spec.themes; ++t) {
      for (int i = 0; i < spec.docs_per_theme; ++i) {
        Document d;
        char id[64];
        std::snprintf(id, sizeof id, "%s-t%d-%03d", lang.c_str(), t, i);
        d.id = id;
        d.lang = lang;
        d.codes.insert(theme_code(t));
        for (int n = 0; n < spec.doc_length; ++n) {
          int s;
          if (rng.uniform() < spec.purity)
            s = t * spec.synsets_per_theme + static_cast<int>(rng.below(spec.synsets_per_theme));
          else
            s = static_cast<int>(rng.below(synsets));
          d.lemmas.push_back(word(lang, s, static_cast<int>(rng.below(spec.words_per_synset))));
        }
        lc.docs.push_back(std::move(d));
      }
    }
    b.corpora.push_back(std::move(lc));
  }
  return b;
}

/// Two-topic corpus: topic A is uniform over {a, b}, topic B over {c, d};
/// every document is pure, alternating between the topics.
inline std::vector<Document> planted_pairs(int docs, int length, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Document> out;
  for (int i = 0; i < docs; ++i) {
    Document d;
    d.id = "p" + std::to_string(i);
    d.lang = "en";
    const bool first = i % 2 == 0;
    for (int n = 0; n < length; ++n) {
      const bool pick = rng.below(2) == 0;
      d.lemmas.push_back(first ? (pick ? "a" : "b") : (pick ? "c" : "d"));
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace synhash::synthetic
