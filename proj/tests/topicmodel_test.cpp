#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "synhash/synthetic.hpp"
#include "synhash/topicmodel.hpp"

namespace synhash {
namespace {

Document doc(std::string id, std::vector<std::string> lemmas, std::set<std::string> codes = {}) {
  return Document{std::move(id), "en", std::move(lemmas), std::move(codes)};
}

// Model with explicit phi rows over a given vocabulary.
TopicModel handmade(std::vector<std::string> terms, std::vector<std::vector<double>> rows) {
  TopicModel m;
  m.lang = "en";
  m.vocab = Vocabulary(std::move(terms));
  m.num_topics = static_cast<int>(rows.size());
  m.alpha = 0.1;
  m.beta = 0.01;
  for (const auto& r : rows) m.phi.insert(m.phi.end(), r.begin(), r.end());
  return m;
}

// Mass that topic k puts on the listed words.
double mass(const TopicModel& m, int k, std::initializer_list<const char*> words) {
  double s = 0.0;
  for (const char* w : words) s += m.topic(k)[*m.vocab.id(w)];
  return s;
}

void expect_rows_normalized(const TopicModel& m) {
  for (int k = 0; k < m.num_topics; ++k) {
    auto row = m.topic(k);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
    for (double p : row) EXPECT_GT(p, 0.0);
  }
}

TEST(TrainLda, SingleTermSimplex) {
  std::vector<Document> docs{doc("d", {"a", "a"})};
  auto m = train_lda(docs, Vocabulary({"a"}), {1, 0.1, 0.01, 5, 3});
  ASSERT_EQ(m.phi.size(), 1u);
  EXPECT_DOUBLE_EQ(m.phi[0], 1.0);
}

TEST(TrainLda, RecoversPlantedPairs) {
  auto docs = synthetic::planted_pairs(200, 20, 11);
  auto m = train_lda(docs, Vocabulary({"a", "b", "c", "d"}), {2, 0.1, 0.01, 500, 5});
  expect_rows_normalized(m);
  // Align topics to planted pairs by the better of the two permutations.
  const double straight = mass(m, 0, {"a", "b"}) + mass(m, 1, {"c", "d"});
  const double swapped = mass(m, 0, {"c", "d"}) + mass(m, 1, {"a", "b"});
  const int ta = straight >= swapped ? 0 : 1;
  EXPECT_GE(mass(m, ta, {"a", "b"}), 0.9);
  EXPECT_GE(mass(m, 1 - ta, {"c", "d"}), 0.9);
}

TEST(TrainLda, CountsStayConsistentAfterEverySweep) {
  auto docs = synthetic::planted_pairs(50, 15, 3);
  int sweeps_seen = 0;
  auto audit = [&](const SamplerState& s) {
    ++sweeps_seen;
    std::vector<int> n_k(s.num_topics(), 0);
    std::vector<int> n_kw(static_cast<std::size_t>(s.num_topics()) * s.vocab_size(), 0);
    for (int d = 0; d < s.num_docs(); ++d) {
      int doc_total = 0;
      std::vector<int> recount(s.num_topics(), 0);
      for (std::size_t i = 0; i < s.assignments(d).size(); ++i) {
        int k = s.assignments(d)[i];
        ++recount[k];
        ++n_k[k];
        ++n_kw[static_cast<std::size_t>(k) * s.vocab_size() + s.tokens(d)[i]];
      }
      for (int k = 0; k < s.num_topics(); ++k) {
        ASSERT_EQ(s.doc_topic(d, k), recount[k]);
        doc_total += s.doc_topic(d, k);
      }
      ASSERT_EQ(doc_total, static_cast<int>(s.tokens(d).size()));
    }
    for (int k = 0; k < s.num_topics(); ++k) {
      int row = 0;
      for (int w = 0; w < s.vocab_size(); ++w) {
        ASSERT_EQ(s.topic_word(k, w), n_kw[static_cast<std::size_t>(k) * s.vocab_size() + w]);
        row += s.topic_word(k, w);
      }
      ASSERT_EQ(row, s.topic_total(k));
      ASSERT_EQ(n_k[k], s.topic_total(k));
    }
  };
  train_lda(docs, Vocabulary({"a", "b", "c", "d"}), {3, 0.5, 0.1, 20, 9}, audit);
  EXPECT_EQ(sweeps_seen, 20);
}

TEST(TrainLda, DeterministicForFixedSeed) {
  auto docs = synthetic::planted_pairs(40, 10, 1);
  Vocabulary v({"a", "b", "c", "d"});
  auto a = model_to_json(train_lda(docs, v, {2, 0.1, 0.01, 30, 77}));
  auto b = model_to_json(train_lda(docs, v, {2, 0.1, 0.01, 30, 77}));
  auto c = model_to_json(train_lda(docs, v, {2, 0.1, 0.01, 30, 78}));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(TrainLda, Errors) {
  Vocabulary v({"a"});
  std::vector<Document> none;
  EXPECT_THROW(train_lda(none, v, {1, 0.1, 0.01, 1, 1}), DataError);
  std::vector<Document> oov{doc("d", {"zzz"})};
  EXPECT_THROW(train_lda(oov, v, {1, 0.1, 0.01, 1, 1}), DataError);
  std::vector<Document> ok{doc("d", {"a"})};
  EXPECT_THROW(train_lda(ok, v, {0, 0.1, 0.01, 1, 1}), UsageError);
  EXPECT_THROW(train_lda(ok, v, {1, 0.0, 0.01, 1, 1}), UsageError);
  EXPECT_THROW(train_lda(ok, v, {1, 0.1, 0.01, 0, 1}), UsageError);
}

TEST(TrainLabeledLda, LabelsForceTopicMass) {
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) {
    docs.push_back(doc("x" + std::to_string(i), {"a", "a", "a"}, {"X"}));
    docs.push_back(doc("y" + std::to_string(i), {"b", "b", "b"}, {"Y"}));
  }
  auto m = train_labeled_lda(docs, Vocabulary({"a", "b"}), {"X", "Y"}, {0, 0.1, 0.01, 10, 2});
  ASSERT_TRUE(m.category_of.has_value());
  EXPECT_EQ(*m.category_of, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(top_words(m, 0, 1)[0].first, "a");
  EXPECT_EQ(top_words(m, 1, 1)[0].first, "b");
}

TEST(TrainLabeledLda, SingleCategoryIsSmoothedFrequency) {
  std::vector<Document> docs{doc("1", {"a", "b", "a"}, {"C"}), doc("2", {"c", "a"}, {"C"})};
  const double beta = 0.01;
  auto m = train_labeled_lda(docs, Vocabulary({"a", "b", "c"}), {"C"}, {0, 0.1, beta, 3, 4});
  // counts a=3, b=1, c=1 over N=5 tokens, V=3
  const double denom = 5 + 3 * beta;
  EXPECT_DOUBLE_EQ(m.topic(0)[0], (3 + beta) / denom);
  EXPECT_DOUBLE_EQ(m.topic(0)[1], (1 + beta) / denom);
  EXPECT_DOUBLE_EQ(m.topic(0)[2], (1 + beta) / denom);
}

TEST(TrainLabeledLda, AssignmentsStayInsideLabelSet) {
  std::vector<Document> docs{doc("1", {"a", "b", "c", "d"}, {"X", "Y"}), doc("2", {"c", "d", "a"}, {"Z"}),
                             doc("3", {"a", "d", "d", "b"}, {"Y", "Z"})};
  const std::vector<std::string> cats{"X", "Y", "Z"};
  int sweeps = 0;
  auto audit = [&](const SamplerState& s) {
    ++sweeps;
    for (int d = 0; d < s.num_docs(); ++d) {
      const auto allowed = s.allowed(d);
      for (int z : s.assignments(d)) ASSERT_NE(std::find(allowed.begin(), allowed.end(), z), allowed.end());
    }
  };
  auto m = train_labeled_lda(docs, Vocabulary({"a", "b", "c", "d"}), cats, {0, 0.5, 0.1, 50, 6}, audit);
  EXPECT_EQ(sweeps, 50);
  expect_rows_normalized(m);
}

TEST(TrainLabeledLda, Errors) {
  Vocabulary v({"a"});
  std::vector<Document> unlabeled{doc("1", {"a"})};
  EXPECT_THROW(train_labeled_lda(unlabeled, v, {"X"}, {}), DataError);
  std::vector<Document> unknown{doc("1", {"a"}, {"Q"})};
  EXPECT_THROW(train_labeled_lda(unknown, v, {"X"}, {}), DataError);
  std::vector<Document> ok{doc("1", {"a"}, {"X"})};
  EXPECT_THROW(train_labeled_lda(ok, v, {}, {}), UsageError);
}

TEST(InferTheta, SingleTopic) {
  auto m = handmade({"a", "b"}, {{0.4, 0.6}});
  const std::vector<std::string> lemmas{"a", "b", "zzz"};
  auto t = infer_theta(m, lemmas, 10, 1);
  ASSERT_EQ(t.theta.size(), 1u);
  EXPECT_DOUBLE_EQ(t.theta[0], 1.0);
}

TEST(InferTheta, PlantedModelFoldIn) {
  auto docs = synthetic::planted_pairs(200, 20, 11);
  auto m = train_lda(docs, Vocabulary({"a", "b", "c", "d"}), {2, 0.1, 0.01, 500, 5});
  const int ta = mass(m, 0, {"a", "b"}) > mass(m, 1, {"a", "b"}) ? 0 : 1;
  Rng rng(99);
  std::vector<std::string> lemmas;
  for (int i = 0; i < 50; ++i) lemmas.push_back(rng.below(2) ? "a" : "b");
  auto t = infer_theta(m, lemmas, 50, 123);
  EXPECT_GE(t.theta[ta], 0.9);
  EXPECT_NEAR(t.theta[0] + t.theta[1], 1.0, 1e-12);
  auto again = infer_theta(m, lemmas, 50, 123);
  EXPECT_EQ(t.theta, again.theta);
}

TEST(InferTheta, NoInVocabularyLemma) {
  auto m = handmade({"a"}, {{1.0}});
  const std::vector<std::string> lemmas{"zzz"};
  EXPECT_THROW(infer_theta(m, lemmas, 5, 1), NoInVocabularyError);
}

TEST(TopWords, SortsAndBreaksTiesLexicographically) {
  auto m = handmade({"a", "b", "c"}, {{0.5, 0.3, 0.2}, {0.5, 0.25, 0.25}});
  auto w = top_words(m, 0, 2);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], (std::pair<std::string, double>{"a", 0.5}));
  EXPECT_EQ(w[1], (std::pair<std::string, double>{"b", 0.3}));
  auto tied = top_words(m, 1, 2);
  EXPECT_EQ(tied[1], (std::pair<std::string, double>{"b", 0.25}));
  EXPECT_THROW(top_words(m, 2, 1), UsageError);
  EXPECT_THROW(top_words(m, -1, 1), UsageError);
  EXPECT_THROW(top_words(m, 0, 4), UsageError);
}

TEST(ModelFile, RoundTripsExactly) {
  auto docs = synthetic::planted_pairs(30, 10, 4);
  std::vector<Document> labeled;
  for (auto d : docs) {
    d.codes = {d.lemmas[0] < "c" ? "AB" : "CD"};
    labeled.push_back(d);
  }
  auto m = train_labeled_lda(labeled, Vocabulary({"a", "b", "c", "d"}), {"AB", "CD"}, {0, 0.3, 0.02, 10, 8});
  const auto text = model_to_json(m);
  auto back = model_from_json(text);
  EXPECT_EQ(back.phi, m.phi);
  EXPECT_EQ(back.alpha, m.alpha);
  EXPECT_EQ(back.category_of, m.category_of);
  EXPECT_EQ(back.vocab, m.vocab);
  EXPECT_EQ(model_to_json(back), text);
  EXPECT_NE(text.find(Rng::kAlgorithm), std::string::npos);
  EXPECT_THROW(model_from_json("{\"format_version\": 99}"), DataError);
  EXPECT_THROW(model_from_json("not json"), DataError);
}

}  // namespace
}  // namespace synhash
