// Writes the synthetic two-language fixture (corpora, OMW tab files and
// taxonomy) into a directory.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "synhash/synthetic.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace synhash;

  CLI::App app{"Generate the synthetic cross-lingual fixture"};
  std::string dir = "data/fixture";
  synthetic::CorpusSpec spec;
  app.add_option("dir", dir, "output directory");
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--docs-per-theme", spec.docs_per_theme);
  app.add_option("--doc-length", spec.doc_length);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto bundle = synthetic::generate(spec);
    for (const auto& lc : bundle.corpora) {
      std::string corpus, omw = "# synthetic OMW table for " + lc.lang + "\n";
      for (const auto& d : lc.docs) corpus += to_json_line(d) + "\n";
      for (const auto& l : lc.omw_lines) omw += l + "\n";
      write_file_atomic(fs::path(dir) / (lc.lang + ".jsonl"), corpus);
      write_file_atomic(fs::path(dir) / ("omw-" + lc.lang + ".tab"), omw);
    }
    std::string tax;
    for (const auto& l : bundle.taxonomy_lines) tax += l + "\n";
    write_file_atomic(fs::path(dir) / "taxonomy.tsv", tax);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
