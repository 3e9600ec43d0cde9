// synhash: cross-lingual retrieval over topic hash expressions.
//
//   synhash --config run.toml flatten|train|annotate|index|eval
//   synhash --config run.toml query --doc en:32006R1234 -k 10
//   synhash --config run.toml query --lang es --text "..." --scheme synset
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "synhash/pipeline.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kData = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace synhash;

  CLI::App app{"Cross-lingual document retrieval with topic hash expressions"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<long long> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value run configuration")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out-dir", out_dir, "override the artifact directory");
  app.add_option("--set", overrides, "override any config key (key=value), repeatable");

  auto* train = app.add_subcommand("train", "train one topic model per language and scheme");
  auto* annotate = app.add_subcommand("annotate", "label topics with synsets or categories");
  auto* flatten_cmd = app.add_subcommand("flatten", "cut the thesaurus into independent categories");
  auto* index = app.add_subcommand("index", "hash every document and write the index files");
  auto* eval = app.add_subcommand("eval", "run the precision@k experiment");
  auto* query = app.add_subcommand("query", "rank indexed documents against one query");

  pipeline::QueryRequest req;
  std::string doc_id, text, lang, scheme = "synset";
  std::size_t k = 10;
  query->add_option("--doc", doc_id, "indexed document, as lang:id or a bare id");
  query->add_option("--text", text, "raw query text (normalized with the language's stopwords)");
  query->add_option("--lang", lang, "language of --text, or restriction for a bare --doc id");
  query->add_option("--scheme", scheme, "synset or category")->check(CLI::IsMember({"synset", "category"}));
  query->add_option("-k,--k", k, "number of results")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    auto kv = KeyValueConfig::load(config_path);
    for (const auto& o : overrides) {
      auto eq = o.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + o + "'");
      kv.set(detail::trim(o.substr(0, eq)), detail::trim(o.substr(eq + 1)));
    }
    if (seed) kv.set("seed", std::to_string(*seed));
    auto cfg = RunConfig::from(kv);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.check_files();

    if (*train) {
      pipeline::cmd_train(cfg);
    } else if (*annotate) {
      pipeline::cmd_annotate(cfg);
    } else if (*flatten_cmd) {
      pipeline::cmd_flatten(cfg);
    } else if (*index) {
      pipeline::cmd_index(cfg);
    } else if (*eval) {
      std::cout << report_to_tsv(pipeline::cmd_eval(cfg));
    } else if (*query) {
      if (!doc_id.empty()) req.doc_id = doc_id;
      if (!text.empty()) req.text = text;
      if (!lang.empty()) req.lang = lang;
      req.scheme = parse_scheme(scheme);
      req.k = k;
      for (const auto& r : pipeline::cmd_query(cfg, req).ranked) {
        char score[32];
        std::snprintf(score, sizeof score, "%.6f", r.score);
        std::cout << r.doc_id << '\t' << score << '\n';
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return 0;
}
