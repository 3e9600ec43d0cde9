#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "synhash/lexicon.hpp"
#include "test_util.hpp"

namespace synhash {
namespace {

std::set<std::string> ids(const SynsetSet& s) {
  std::set<std::string> out;
  for (const auto& x : s) out.insert(x.str());
  return out;
}

TEST(SynsetId, Pattern) {
  EXPECT_TRUE(SynsetId::valid("06254669-n"));
  EXPECT_TRUE(SynsetId::valid("1-s"));
  EXPECT_FALSE(SynsetId::valid("badid"));
  EXPECT_FALSE(SynsetId::valid("-n"));
  EXPECT_FALSE(SynsetId::valid("0625x669-n"));
  EXPECT_FALSE(SynsetId::valid("06254669-q"));
  EXPECT_FALSE(SynsetId::valid("06254669-nn"));
  EXPECT_THROW(SynsetId("x-n"), DataError);
}

class OmwFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = dir_.write("wn-xx.tab",
                       "# omw xx test table\n"
                       "00000001-n\txx:lemma\tnetwork\n"
                       "00000002-n\txx:lemma\tnetwork\n"
                       "00000003-v\txx:lemma\tNetwork_Operator\n");
    lex_ = load_omw({{"xx", path_}});
  }
  TempDir dir_;
  std::filesystem::path path_;
  SynsetLexicon lex_;
};

TEST_F(OmwFixture, UnionOfRows) {
  EXPECT_EQ(ids(lex_.synsets_of("network", "xx")), (std::set<std::string>{"00000001-n", "00000002-n"}));
}

TEST_F(OmwFixture, CaseInsensitive) {
  EXPECT_EQ(ids(lex_.synsets_of("NETWORK", "xx")), ids(lex_.synsets_of("network", "xx")));
}

TEST_F(OmwFixture, AbsentLemmaIsEmpty) { EXPECT_TRUE(lex_.synsets_of("zzz-unknown", "xx").empty()); }

TEST_F(OmwFixture, MultiwordUnderscoresBecomeSpaces) {
  EXPECT_EQ(ids(lex_.synsets_of("network operator", "xx")), (std::set<std::string>{"00000003-v"}));
}

TEST_F(OmwFixture, UnloadedLanguageIsAnError) { EXPECT_THROW(lex_.synsets_of("network", "en"), UsageError); }

TEST(LoadOmw, MalformedRowsNameTheLine) {
  TempDir dir;
  auto p = dir.write("bad.tab", "# header\n00000001-n\txx:lemma\tok\nbadid\txx:lemma\tnetwork\n");
  try {
    load_omw({{"xx", p}});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_omw({{"xx", dir.write("two.tab", "00000001-n\tnetwork\n")}}), DataError);
  EXPECT_THROW(load_omw({{"xx", dir.write("empty.tab", "# only comments\n")}}), DataError);
  EXPECT_THROW(load_omw({{"xx", dir.path() / "missing.tab"}}), DataError);
}

TEST(LoadOmw, ReproducesRowsAndCountsDistinctLemmas) {
  std::mt19937_64 gen(5);
  TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    std::string text = "# generated\n";
    std::map<std::string, std::set<std::string>> expected;
    const int rows = 1 + static_cast<int>(gen() % 200);
    for (int r = 0; r < rows; ++r) {
      std::string id = std::to_string(gen() % 50) + "-" + std::string(1, "nvars"[gen() % 5]);
      std::string lemma = std::string(1, static_cast<char>('a' + gen() % 8)) + std::to_string(gen() % 6);
      if (gen() % 4 == 0) lemma[0] = static_cast<char>(std::toupper(lemma[0]));
      text += id + "\tyy:lemma\t" + lemma + "\n";
      std::string key = lemma;
      key[0] = static_cast<char>(std::tolower(key[0]));
      expected[key].insert(id);
    }
    auto p = dir.write("t" + std::to_string(trial) + ".tab", text);
    auto lex = load_omw({{"yy", p}});
    EXPECT_EQ(lex.size(), expected.size());
    for (const auto& [lemma, want] : expected) EXPECT_EQ(ids(lex.synsets_of(lemma, "yy")), want);
  }
}

}  // namespace
}  // namespace synhash
