#include <random>

#include <gtest/gtest.h>

#include "synhash/annotate.hpp"
#include "test_util.hpp"

namespace synhash {
namespace {

TopicModel model(std::string lang, std::vector<std::string> terms, std::vector<std::vector<double>> rows) {
  TopicModel m;
  m.lang = std::move(lang);
  m.vocab = Vocabulary(std::move(terms));
  m.num_topics = static_cast<int>(rows.size());
  m.alpha = 0.1;
  m.beta = 0.01;
  for (const auto& r : rows) m.phi.insert(m.phi.end(), r.begin(), r.end());
  return m;
}

SynsetLexicon lexicon(const std::string& lang, const std::string& rows) {
  static TempDir dir;
  static int n = 0;
  return load_omw({{lang, dir.write("lex" + std::to_string(n++) + ".tab", rows)}});
}

TEST(AnnotateSynset, UnionOverTopWords) {
  auto m = model("en", {"w1", "w2", "w3"}, {{0.5, 0.4, 0.1}});
  auto lex = lexicon("en",
                     "00000001-n\ten:lemma\tw1\n00000002-n\ten:lemma\tw1\n"
                     "00000002-n\ten:lemma\tw2\n00000003-n\ten:lemma\tw2\n00000009-n\ten:lemma\tw3\n");
  auto ls = annotate_topics_synset(m, lex, 2);
  EXPECT_EQ(ls.scheme, LabelScheme::synset);
  EXPECT_EQ(ls.labels[0], (LabelSet{"00000001-n", "00000002-n", "00000003-n"}));
}

TEST(AnnotateSynset, UncoveredTopicIsEmptyWithWarning) {
  auto m = model("en", {"a", "b"}, {{0.5, 0.5}});
  auto lex = lexicon("en", "00000001-n\ten:lemma\tzzz\n");
  std::vector<std::string> warnings;
  log::set_sink([&](std::string_view w) { warnings.emplace_back(w); });
  auto ls = annotate_topics_synset(m, lex, 2);
  log::set_sink([](std::string_view w) { std::cerr << "warning: " << w << '\n'; });
  EXPECT_TRUE(ls.labels[0].empty());
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(AnnotateSynset, CommunicationTopicTopFive) {
  // Top-5 words of an English "communication systems" topic, each mapped to
  // its own synset by a toy lexicon.
  const std::vector<std::string> words{"radio", "equipment", "network", "communication", "regulatory"};
  std::vector<std::string> terms = words;
  terms.push_back("tax");
  // phi follows the word order above; "tax" gets the smallest mass.
  std::map<std::string, double> p{{"radio", 0.3},         {"equipment", 0.2},  {"network", 0.15},
                                  {"communication", 0.14}, {"regulatory", 0.11}, {"tax", 0.1}};
  std::vector<std::string> sorted = terms;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> row;
  for (const auto& t : sorted) row.push_back(p[t]);
  auto m = model("en", terms, {row});
  std::string rows;
  for (std::size_t i = 0; i < words.size(); ++i)
    rows += "0000000" + std::to_string(i + 1) + "-n\ten:lemma\t" + words[i] + "\n";
  rows += "00000042-n\ten:lemma\ttax\n";
  auto ls = annotate_topics_synset(m, lexicon("en", rows), 5);
  EXPECT_EQ(ls.labels[0].size(), 5u);
  EXPECT_FALSE(ls.labels[0].contains("00000042-n"));
}

TEST(AnnotateSynset, MatchesBruteForceUnion) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> terms;
    for (int i = 0; i < 12; ++i) terms.push_back("w" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < 4; ++k) {
      std::vector<double> r;
      double s = 0;
      for (int i = 0; i < 12; ++i) {
        r.push_back(static_cast<double>(1 + gen() % 20));
        s += r.back();
      }
      for (auto& x : r) x /= s;
      rows.push_back(r);
    }
    auto m = model("en", terms, rows);
    std::string omw;
    for (int i = 0; i < 30; ++i)
      omw += std::to_string(gen() % 15) + "-n\ten:lemma\tw" + std::to_string(gen() % 14) + "\n";
    auto lex = lexicon("en", omw);
    const std::size_t n = 1 + gen() % 6;
    auto ls = annotate_topics_synset(m, lex, n);
    ASSERT_EQ(ls.num_topics(), 4);
    for (int k = 0; k < 4; ++k) {
      // Oracle: rank words by full sort, then union their synsets.
      std::vector<std::pair<double, std::string>> ranked;
      for (std::size_t i = 0; i < m.vocab_size(); ++i)
        ranked.emplace_back(-m.topic(k)[i], m.vocab.term(static_cast<int>(i)));
      std::sort(ranked.begin(), ranked.end());
      LabelSet want;
      for (std::size_t i = 0; i < n; ++i)
        for (const auto& [key, ss] : lex.entries())
          if (key.second == ranked[i].second)
            for (const auto& s : ss) want.insert(s.str());
      EXPECT_EQ(ls.labels[k], want);
    }
    EXPECT_EQ(annotate_topics_synset(m, lex, n), ls);
  }
}

TEST(AnnotateSynset, LanguageMustBeLoaded) {
  auto m = model("es", {"a"}, {{1.0}});
  EXPECT_THROW(annotate_topics_synset(m, lexicon("en", "00000001-n\ten:lemma\ta\n"), 1), UsageError);
}

TEST(AnnotateCategory, IdentityBinding) {
  auto m = model("en", {"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}});
  m.category_of = std::vector<std::string>{"c1", "c2"};
  auto ls = annotate_topics_category(m);
  EXPECT_EQ(ls.scheme, LabelScheme::category);
  ASSERT_EQ(ls.num_topics(), 2);
  EXPECT_EQ(ls.labels[0], (LabelSet{"c1"}));
  EXPECT_EQ(ls.labels[1], (LabelSet{"c2"}));
}

TEST(AnnotateCategory, SingleTopic) {
  auto m = model("en", {"a"}, {{1.0}});
  m.category_of = std::vector<std::string>{"only"};
  EXPECT_EQ(annotate_topics_category(m).labels, (std::vector<LabelSet>{{"only"}}));
}

TEST(AnnotateCategory, UnlabeledModelRejected) {
  auto m = model("en", {"a"}, {{1.0}});
  EXPECT_THROW(annotate_topics_category(m), UsageError);
}

TEST(AnnotateCategory, ThemeAlignedModelsShareLabels) {
  auto en = model("en", {"law", "tax"}, {{0.9, 0.1}, {0.2, 0.8}});
  auto es = model("es", {"impuesto", "ley"}, {{0.3, 0.7}, {0.6, 0.4}});
  en.category_of = es.category_of = std::vector<std::string>{"c1", "c2"};
  EXPECT_EQ(annotate_topics_category(en).labels, annotate_topics_category(es).labels);
}

TEST(LabelFile, RoundTrip) {
  auto m = model("en", {"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}});
  m.category_of = std::vector<std::string>{"c1", "c2"};
  auto ls = annotate_topics_category(m);
  EXPECT_EQ(labels_from_json(labels_to_json(ls)), ls);
  EXPECT_THROW(labels_from_json(R"({"scheme":"category","lang":"en","labels":{"0":["a","b"]}})"), DataError);
  EXPECT_THROW(labels_from_json(R"({"scheme":"bogus","lang":"en","labels":{}})"), DataError);
}

}  // namespace
}  // namespace synhash
