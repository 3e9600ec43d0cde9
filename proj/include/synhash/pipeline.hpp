#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "synhash/annotate.hpp"
#include "synhash/config.hpp"
#include "synhash/corpus.hpp"
#include "synhash/eurovoc.hpp"
#include "synhash/evalharness.hpp"
#include "synhash/hashing.hpp"
#include "synhash/index.hpp"
#include "synhash/lexicon.hpp"
#include "synhash/topicmodel.hpp"

// End-to-end stages behind the command-line tool. Every artifact lives in
// cfg.out_dir under a fixed name:
//   mapping.json                      flatten
//   model.<lang>.<lda|llda>.json      train
//   labels.<lang>.<scheme>.json       annotate
//   hashes.<lang>.<scheme>.jsonl      index (+ manifest.<scheme>.json)
//   results.tsv, results.json         eval (+ run_manifest.json)
namespace synhash::pipeline {

inline fs::path mapping_path(const RunConfig& c) { return c.out_dir / "mapping.json"; }

inline std::string model_kind(LabelScheme s) { return s == LabelScheme::synset ? "lda" : "llda"; }

inline fs::path model_path(const RunConfig& c, const std::string& lang, LabelScheme s) {
  return c.out_dir / ("model." + lang + "." + model_kind(s) + ".json");
}

inline fs::path labels_path(const RunConfig& c, const std::string& lang, LabelScheme s) {
  return c.out_dir / ("labels." + lang + "." + to_string(s) + ".json");
}

inline std::string hashes_name(const std::string& lang, LabelScheme s) {
  return "hashes." + lang + "." + to_string(s) + ".jsonl";
}

inline fs::path manifest_path(const RunConfig& c, LabelScheme s) {
  return c.out_dir / ("manifest." + to_string(s) + ".json");
}

inline std::vector<Document> load_language(const RunConfig& c, const std::string& lang) {
  return load_corpus(c.corpus.at(lang), lang, c.languages);
}

inline CategoryMapping load_mapping(const RunConfig& c) {
  const auto p = mapping_path(c);
  if (!fs::exists(p)) throw DataError("missing " + p.string() + " (run 'flatten' first)");
  return mapping_from_json(read_file(p));
}

inline TopicModel load_model(const RunConfig& c, const std::string& lang, LabelScheme s) {
  const auto p = model_path(c, lang, s);
  if (!fs::exists(p)) throw DataError("missing " + p.string() + " (run 'train' first)");
  return model_from_json(read_file(p));
}

inline TopicLabelSet load_labels(const RunConfig& c, const std::string& lang, LabelScheme s) {
  const auto p = labels_path(c, lang, s);
  if (!fs::exists(p)) throw DataError("missing " + p.string() + " (run 'annotate' first)");
  return labels_from_json(read_file(p));
}

/// Category set of each document, via the flattened thesaurus.
inline std::vector<Document> with_categories(std::vector<Document> docs, const CategoryMapping& mapping) {
  for (auto& d : docs) d.codes = map_codes(d.codes, mapping).categories;
  return docs;
}

inline void cmd_flatten(const RunConfig& c) {
  if (!c.taxonomy) throw UsageError("config key 'taxonomy' is required for flatten");
  const auto tax = load_taxonomy(*c.taxonomy);
  std::set<std::string> codes;
  for (const auto& lang : c.languages)
    for (const auto& d : load_language(c, lang)) codes.insert(d.codes.begin(), d.codes.end());
  for (const auto& code : codes)
    if (!tax.contains(code)) throw DataError("corpus code '" + code + "' is not in the taxonomy");
  const auto mapping = flatten(tax, c.depth, codes);
  if (!mapping.conflicts.empty())
    log::warn(std::to_string(mapping.conflicts.size()) + " corpus codes could not be mapped (see 'conflicts')");
  write_file_atomic(mapping_path(c), mapping_to_json(mapping));
}

inline void cmd_train(const RunConfig& c) {
  std::optional<CategoryMapping> mapping;
  if (c.has_scheme(LabelScheme::category)) mapping = load_mapping(c);
  for (const auto& lang : c.languages) {
    auto docs = load_language(c, lang);
    if (docs.empty()) throw DataError("corpus for '" + lang + "' is empty");
    const auto vocab = build_vocabulary(docs, c.min_df, c.max_df_ratio);
    std::vector<Document> usable;
    for (auto& d : docs)
      if (!vocab.encode(d.lemmas).empty()) usable.push_back(std::move(d));
    if (usable.size() < docs.size())
      log::warn(lang + ": " + std::to_string(docs.size() - usable.size()) +
                " documents have no in-vocabulary lemma and are left out of training");
    if (usable.empty()) throw DataError("empty effective corpus for '" + lang + "'");

    LdaParams params{c.num_topics, c.alpha, c.beta, c.sweeps, 0};
    if (c.has_scheme(LabelScheme::synset)) {
      params.seed = c.stage_seed("train-lda:" + lang);
      auto model = train_lda(usable, vocab, params);
      write_file_atomic(model_path(c, lang, LabelScheme::synset), model_to_json(model));
    }
    if (mapping) {
      auto labeled = with_categories(usable, *mapping);
      std::vector<Document> kept;
      for (auto& d : labeled)
        if (!d.codes.empty()) kept.push_back(std::move(d));
      if (kept.size() < labeled.size())
        log::warn(lang + ": " + std::to_string(labeled.size() - kept.size()) +
                  " documents have no mapped category and are left out of labeled training");
      if (kept.empty()) throw DataError("no categorized documents for '" + lang + "'");
      params.seed = c.stage_seed("train-llda:" + lang);
      auto model = train_labeled_lda(kept, vocab, mapping->sorted_categories(), params);
      write_file_atomic(model_path(c, lang, LabelScheme::category), model_to_json(model));
    }
  }
}

inline void cmd_annotate(const RunConfig& c) {
  for (const auto& lang : c.languages) {
    if (c.has_scheme(LabelScheme::synset)) {
      auto it = c.omw.find(lang);
      if (it == c.omw.end()) throw UsageError("config key 'omw." + lang + "' is required for the synset scheme");
      const auto lexicon = load_omw({{lang, it->second}});
      const auto model = load_model(c, lang, LabelScheme::synset);
      const auto labels = annotate_topics_synset(model, lexicon, std::min(c.top_n, model.vocab_size()));
      write_file_atomic(labels_path(c, lang, LabelScheme::synset), labels_to_json(labels));
    }
    if (c.has_scheme(LabelScheme::category)) {
      const auto labels = annotate_topics_category(load_model(c, lang, LabelScheme::category));
      write_file_atomic(labels_path(c, lang, LabelScheme::category), labels_to_json(labels));
    }
  }
}

/// Fold-in seed for one document; depends only on the config seed and the id.
inline std::uint64_t doc_seed(const RunConfig& c, const std::string& lang, const std::string& id) {
  return c.stage_seed("infer:" + lang + ":" + id);
}

inline HashExpression hash_lemmas(const RunConfig& c, const TopicModel& model, const TopicLabelSet& labels,
                                  const std::string& id, std::span<const std::string> lemmas, std::uint64_t seed) {
  if (labels.model_id != model_identity(model))
    throw DataError("label file for '" + model.lang + "' was built from a different model; rerun 'annotate'");
  return build_hash(id, infer_theta(model, lemmas, c.infer_sweeps, seed), labels, c.levels);
}

inline void cmd_index(const RunConfig& c) {
  for (auto scheme : c.schemes) {
    IndexManifest manifest;
    manifest.num_levels = c.levels;
    manifest.scheme = scheme;
    for (const auto& lang : c.languages) {
      const auto model = load_model(c, lang, scheme);
      const auto labels = load_labels(c, lang, scheme);
      if (labels.model_id != model_identity(model))
        throw DataError("label file for '" + lang + "' was built from a different model; rerun 'annotate'");
      std::vector<HashExpression> hashes;
      std::size_t skipped = 0;
      for (const auto& d : load_language(c, lang)) {
        try {
          hashes.push_back(build_hash(d.id, infer_theta(model, d.lemmas, c.infer_sweeps, doc_seed(c, lang, d.id)),
                                      labels, c.levels));
        } catch (const NoInVocabularyError&) {
          ++skipped;
        }
      }
      if (skipped) log::warn(lang + ": " + std::to_string(skipped) + " documents without in-vocabulary lemmas not indexed");
      write_file_atomic(c.out_dir / hashes_name(lang, scheme), hashes_to_jsonl(hashes));
      manifest.models[lang] = labels.model_id;
      manifest.hash_files[lang] = hashes_name(lang, scheme);
    }
    write_file_atomic(manifest_path(c, scheme), manifest.to_json());
  }
}

/// Hashes of one language as written by cmd_index, checked against the manifest.
inline std::vector<HashExpression> load_language_hashes(const RunConfig& c, const std::string& lang,
                                                        LabelScheme scheme) {
  const auto mp = manifest_path(c, scheme);
  if (!fs::exists(mp)) throw DataError("missing " + mp.string() + " (run 'index' first)");
  const auto manifest = IndexManifest::from_json(read_file(mp));
  if (manifest.num_levels != c.levels)
    throw DataError("index was built with L=" + std::to_string(manifest.num_levels) + ", config has L=" +
                    std::to_string(c.levels));
  auto it = manifest.hash_files.find(lang);
  if (it == manifest.hash_files.end()) throw DataError("index has no hashes for '" + lang + "'");
  return load_hashes(c.out_dir / it->second);
}

/// All configured languages in one index, keyed "lang:id".
inline InvertedIndex load_pooled_index(const RunConfig& c, LabelScheme scheme) {
  InvertedIndex index(c.levels);
  for (const auto& lang : c.languages)
    for (auto h : load_language_hashes(c, lang, scheme)) {
      h.doc_id = lang + ":" + h.doc_id;
      index.add_document(std::move(h));
    }
  return index;
}

struct QueryRequest {
  std::optional<std::string> doc_id;  // "lang:id" or a bare id
  std::optional<std::string> text;    // raw text, needs lang
  std::optional<std::string> lang;
  LabelScheme scheme = LabelScheme::synset;
  std::size_t k = 10;
};

inline QueryResult cmd_query(const RunConfig& c, const QueryRequest& req) {
  if (req.doc_id.has_value() == req.text.has_value()) throw UsageError("query needs exactly one of --doc or --text");
  const auto index = load_pooled_index(c, req.scheme);
  if (req.doc_id) {
    std::string key = *req.doc_id;
    if (!index.store().contains(key)) {
      std::vector<std::string> matches;
      for (const auto& lang : c.languages)
        if ((!req.lang || *req.lang == lang) && index.store().contains(lang + ":" + key))
          matches.push_back(lang + ":" + key);
      if (matches.empty()) throw DataError("document '" + key + "' is not indexed");
      if (matches.size() > 1) throw UsageError("document id '" + key + "' is ambiguous; use lang:id");
      key = matches.front();
    }
    return index.query(index.store().at(key), req.k);
  }
  if (!req.lang) throw UsageError("--text requires --lang");
  const auto& lang = *req.lang;
  if (std::find(c.languages.begin(), c.languages.end(), lang) == c.languages.end())
    throw UsageError("language '" + lang + "' is not configured");
  std::unordered_set<std::string> stop;
  if (auto it = c.stopwords.find(lang); it != c.stopwords.end()) stop = load_stopwords(it->second);
  const auto lemmas = normalize(*req.text, lang, stop, c.min_len);
  const auto model = load_model(c, lang, req.scheme);
  const auto labels = load_labels(c, lang, req.scheme);
  const auto h = hash_lemmas(c, model, labels, "", lemmas, c.stage_seed("query:" + *req.text));
  return index.query(h, req.k);
}

inline EvalReport cmd_eval(const RunConfig& c) {
  const auto mapping = load_mapping(c);
  EvalReport report;
  report.ks = c.ks;
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());

  std::map<std::string, std::vector<Document>> docs;
  for (const auto& lang : c.languages) docs[lang] = load_language(c, lang);

  for (const auto& combo : c.combinations) {
    for (auto scheme : c.schemes) {
      std::vector<LanguageArtifacts> arts;
      for (const auto& lang : combo) arts.push_back({lang, docs[lang], load_language_hashes(c, lang, scheme)});
      EvalConfig ec;
      ec.languages = combo;
      ec.scheme = scheme;
      ec.query_count = c.query_count;
      ec.ks = report.ks;
      ec.seed = c.stage_seed("eval:" + combination_name(combo));
      report.results.push_back(run_experiment(ec, arts, mapping));
    }
  }
  write_file_atomic(c.out_dir / "results.tsv", report_to_tsv(report));
  write_file_atomic(c.out_dir / "results.json", report_to_json(report));

  nlohmann::ordered_json manifest;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  for (const auto& [lang, p] : c.corpus) inputs["corpus." + lang] = file_fingerprint(p);
  for (const auto& [lang, p] : c.omw) inputs["omw." + lang] = file_fingerprint(p);
  if (c.taxonomy) inputs["taxonomy"] = file_fingerprint(*c.taxonomy);
  inputs["mapping.json"] = file_fingerprint(mapping_path(c));
  for (auto scheme : c.schemes)
    for (const auto& lang : c.languages) {
      inputs[model_path(c, lang, scheme).filename().string()] = file_fingerprint(model_path(c, lang, scheme));
      inputs[hashes_name(lang, scheme)] = file_fingerprint(c.out_dir / hashes_name(lang, scheme));
    }
  manifest["inputs"] = std::move(inputs);
  nlohmann::ordered_json cfg;
  cfg["languages"] = c.languages;
  cfg["K"] = c.num_topics;
  cfg["alpha"] = c.alpha;
  cfg["beta"] = c.beta;
  cfg["sweeps"] = c.sweeps;
  cfg["infer_sweeps"] = c.infer_sweeps;
  cfg["seed"] = c.seed;
  cfg["min_df"] = c.min_df;
  cfg["max_df_ratio"] = c.max_df_ratio;
  cfg["top_n"] = c.top_n;
  cfg["L"] = c.levels;
  cfg["depth"] = c.depth;
  std::vector<std::string> schemes;
  for (auto s : c.schemes) schemes.push_back(to_string(s));
  cfg["scheme"] = schemes;
  cfg["ks"] = report.ks;
  cfg["query_count"] = c.query_count;
  std::vector<std::string> combos;
  for (const auto& combo : c.combinations) combos.push_back(combination_name(combo));
  cfg["combinations"] = combos;
  manifest["config"] = std::move(cfg);
  write_file_atomic(c.out_dir / "run_manifest.json", manifest.dump(1) + "\n");
  return report;
}

/// flatten (when a taxonomy is configured), train, annotate, index, eval.
inline EvalReport run_all(const RunConfig& c) {
  if (c.taxonomy) cmd_flatten(c);
  cmd_train(c);
  cmd_annotate(c);
  cmd_index(c);
  return cmd_eval(c);
}

}  // namespace synhash::pipeline
