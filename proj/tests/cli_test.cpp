#include <sys/wait.h>

#include <cstdlib>

#include <gtest/gtest.h>

#include "synhash/index.hpp"
#include "synhash/synthetic.hpp"
#include "test_util.hpp"

namespace synhash {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run cli(const TempDir& dir, const std::string& args) {
  const auto out = dir.path() / "stdout.txt";
  const std::string cmd = std::string(SYNHASH_CLI) + " " + args + " > " + out.string() + " 2> " +
                          (dir.path() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out)};
}

// Small two-language corpus plus a config running both schemes.
void write_fixture(const TempDir& dir) {
  synthetic::CorpusSpec spec;
  spec.docs_per_theme = 6;
  spec.doc_length = 30;
  spec.themes = 3;
  const auto bundle = synthetic::generate(spec);
  for (const auto& lc : bundle.corpora) {
    std::string corpus, omw;
    for (const auto& d : lc.docs) corpus += to_json_line(d) + "\n";
    for (const auto& l : lc.omw_lines) omw += l + "\n";
    dir.write(lc.lang + ".jsonl", corpus);
    dir.write("omw-" + lc.lang + ".tab", omw);
  }
  std::string tax;
  for (const auto& l : bundle.taxonomy_lines) tax += l + "\n";
  dir.write("taxonomy.tsv", tax);
  dir.write("run.toml",
            "languages = xa, xb\n"
            "corpus.xa = xa.jsonl\ncorpus.xb = xb.jsonl\n"
            "omw.xa = omw-xa.tab\nomw.xb = omw-xb.tab\n"
            "taxonomy = taxonomy.tsv\n"
            "K = 3\nalpha = 0.5\nsweeps = 30\ninfer_sweeps = 10\nseed = 4\n"
            "scheme = both\nquery_count = 10\ncombinations = xa, xa+xb\n");
}

std::string cfg(const TempDir& dir) { return "--config " + (dir.path() / "run.toml").string(); }

TEST(Cli, FullPipeline) {
  TempDir dir;
  write_fixture(dir);
  for (const char* step : {"flatten", "train", "annotate", "index"}) {
    auto r = cli(dir, cfg(dir) + " " + step);
    ASSERT_EQ(r.code, 0) << step << ": " << read_file(dir.path() / "stderr.txt");
  }
  for (const char* f : {"mapping.json", "model.xa.lda.json", "model.xb.llda.json", "labels.xa.synset.json",
                        "labels.xb.category.json", "hashes.xa.synset.jsonl", "manifest.category.json"})
    EXPECT_TRUE(fs::exists(dir.path() / "out" / f)) << f;

  auto eval = cli(dir, cfg(dir) + " eval");
  ASSERT_EQ(eval.code, 0) << read_file(dir.path() / "stderr.txt");
  EXPECT_EQ(eval.out.substr(0, eval.out.find('\n')),
            "metric\txa:category\txa:synset\txa-xb:category\txa-xb:synset");
  EXPECT_EQ(std::count(eval.out.begin(), eval.out.end(), '\n'), 4);
  EXPECT_EQ(read_file(dir.path() / "out" / "results.tsv"), eval.out);

  auto q = cli(dir, cfg(dir) + " query --doc xa:xa-t0-000 -k 3");
  ASSERT_EQ(q.code, 0) << read_file(dir.path() / "stderr.txt");
  EXPECT_LE(std::count(q.out.begin(), q.out.end(), '\n'), 3);
  auto t = cli(dir, cfg(dir) + " query --lang xb --text 'xbsava xbsbvb xbscva' --scheme category -k 2");
  EXPECT_EQ(t.code, 0) << read_file(dir.path() / "stderr.txt");
}

TEST(Cli, TrainTwiceIsByteIdentical) {
  TempDir dir;
  write_fixture(dir);
  ASSERT_EQ(cli(dir, cfg(dir) + " --set scheme=synset train").code, 0);
  const auto first = read_file(dir.path() / "out" / "model.xa.lda.json");
  ASSERT_EQ(cli(dir, cfg(dir) + " --set scheme=synset train").code, 0);
  EXPECT_EQ(read_file(dir.path() / "out" / "model.xa.lda.json"), first);
  ASSERT_EQ(cli(dir, cfg(dir) + " --set scheme=synset --seed 5 train").code, 0);
  EXPECT_NE(read_file(dir.path() / "out" / "model.xa.lda.json"), first);
}

TEST(Cli, QueryRanksHandBuiltIndex) {
  TempDir dir;
  dir.write("en.jsonl", "");
  dir.write("run.toml", "languages = en\ncorpus.en = en.jsonl\nL = 2\n");
  // q vs d1: J({a,b},{a,z}) = 1/3 at level 0. d2 is identical. d3 is disjoint.
  std::vector<HashExpression> hs{{"q", {{"a", "b"}, {"c"}}},
                                 {"d1", {{"a", "z"}, {}}},
                                 {"d2", {{"a", "b"}, {"c"}}},
                                 {"d3", {{"y"}, {"x"}}}};
  dir.write("out/hashes.en.synset.jsonl", hashes_to_jsonl(hs));
  IndexManifest m;
  m.num_levels = 2;
  m.models = {{"en", "0"}};
  m.hash_files = {{"en", "hashes.en.synset.jsonl"}};
  dir.write("out/manifest.synset.json", m.to_json());

  auto r = cli(dir, cfg(dir) + " query --doc q -k 5");
  ASSERT_EQ(r.code, 0) << read_file(dir.path() / "stderr.txt");
  EXPECT_EQ(r.out, "en:d2\t2.000000\nen:d1\t0.333333\n");
  EXPECT_EQ(cli(dir, cfg(dir) + " query --doc nope").code, 2);
  EXPECT_EQ(cli(dir, cfg(dir) + " --set L=3 query --doc q").code, 2);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  write_fixture(dir);
  EXPECT_EQ(cli(dir, cfg(dir)).code, 1);                           // no subcommand
  EXPECT_EQ(cli(dir, cfg(dir) + " frobnicate").code, 1);           // unknown subcommand
  EXPECT_EQ(cli(dir, cfg(dir) + " --set K=0 train").code, 1);      // range error
  EXPECT_EQ(cli(dir, cfg(dir) + " query --doc a --text b").code, 1);
  EXPECT_EQ(cli(dir, "--config " + (dir.path() / "missing.toml").string() + " train").code, 2);
  EXPECT_EQ(cli(dir, cfg(dir) + " annotate").code, 2);             // no model yet
  EXPECT_EQ(cli(dir, cfg(dir) + " --set corpus.xa=gone.jsonl train").code, 2);
  dir.write("xa.jsonl", "{broken\n");
  auto r = cli(dir, cfg(dir) + " flatten");
  EXPECT_EQ(r.code, 2);
  const auto err = read_file(dir.path() / "stderr.txt");
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1) << err;
}

}  // namespace
}  // namespace synhash
