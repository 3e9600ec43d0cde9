#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "synhash/annotate.hpp"
#include "synhash/common.hpp"
#include "synhash/corpus.hpp"
#include "synhash/eurovoc.hpp"
#include "synhash/hashing.hpp"
#include "synhash/index.hpp"

namespace synhash {

/// Documents of one combination, e.g. {"es", "en"}.
struct EvalConfig {
  std::vector<std::string> languages;
  LabelScheme scheme = LabelScheme::synset;
  std::size_t query_count = 1000;
  std::vector<int> ks{3, 5, 10};
  std::uint64_t seed = 1;
};

/// Everything the harness needs about one language edition.
struct LanguageArtifacts {
  std::string lang;
  std::vector<Document> docs;
  std::vector<HashExpression> hashes;  // ids as in docs; docs without a hash are skipped
};

struct EvalResult {
  std::string combination;
  LabelScheme scheme = LabelScheme::synset;
  std::size_t query_count = 0;
  std::size_t evaluated = 0;
  std::size_t skipped_no_ground_truth = 0;
  std::size_t skipped_no_hash = 0;
  std::map<int, double> precision;  // k -> mean precision@k
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<EvalResult> results;
};

inline std::string combination_name(const std::vector<std::string>& langs) {
  std::string out;
  for (const auto& l : langs) out += (out.empty() ? "" : "-") + l;
  return out;
}

/// Ids of the other documents that share at least one mapped category with
/// the query. Empty when the query has no mappable code.
inline std::set<std::string> ground_truth(const Document& query, std::span<const Document> corpus,
                                          const CategoryMapping& mapping) {
  const auto mine = map_codes(query.codes, mapping).categories;
  std::set<std::string> out;
  if (mine.empty()) return out;
  for (const auto& d : corpus) {
    if (d.id == query.id) continue;
    for (const auto& c : map_codes(d.codes, mapping).categories) {
      if (mine.contains(c)) {
        out.insert(d.id);
        break;
      }
    }
  }
  return out;
}

/// |top-k ∩ relevant| / k; missing ranks count as misses.
inline double precision_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, int k) {
  if (k < 1) throw UsageError("k must be >= 1");
  const std::size_t n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += relevant.contains(ranked[i]) ? 1 : 0;
  return static_cast<double>(hits) / k;
}

/// Pooled retrieval experiment over the languages of `cfg`: documents of all
/// languages share one index under "lang:id" keys; query_count documents are
/// drawn without replacement and each is scored against its ground truth.
inline EvalResult run_experiment(const EvalConfig& cfg, std::span<const LanguageArtifacts> artifacts,
                                 const CategoryMapping& mapping) {
  if (cfg.ks.empty()) throw UsageError("ks must not be empty");
  if (cfg.query_count < 1) throw UsageError("query_count must be >= 1");
  for (int k : cfg.ks)
    if (k < 1) throw UsageError("every k must be >= 1");

  struct Entry {
    std::string key;
    std::set<std::string> categories;
    const HashExpression* hash = nullptr;
  };
  std::vector<Entry> pool;
  std::optional<InvertedIndex> index;
  for (const auto& lang : cfg.languages) {
    auto it = std::find_if(artifacts.begin(), artifacts.end(), [&](const auto& a) { return a.lang == lang; });
    if (it == artifacts.end()) throw DataError("no artifacts loaded for language '" + lang + "'");
    std::unordered_map<std::string, const HashExpression*> by_id;
    for (const auto& h : it->hashes) by_id[h.doc_id] = &h;
    for (const auto& d : it->docs) {
      Entry e;
      e.key = lang + ":" + d.id;
      e.categories = map_codes(d.codes, mapping).categories;
      if (auto h = by_id.find(d.id); h != by_id.end()) {
        e.hash = h->second;
        if (!index) index.emplace(e.hash->num_levels());
        HashExpression pooled = *e.hash;
        pooled.doc_id = e.key;
        index->add_document(std::move(pooled));
      }
      pool.push_back(std::move(e));
    }
  }
  if (pool.empty()) throw DataError("combination " + combination_name(cfg.languages) + " has an empty pooled corpus");
  std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });

  std::map<std::string, std::vector<std::size_t>> by_category;
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (const auto& c : pool[i].categories) by_category[c].push_back(i);

  // Partial Fisher-Yates over pool positions, then evaluate in id order.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t n_queries = std::min(cfg.query_count, pool.size());
  if (n_queries < cfg.query_count)
    log::warn("query_count " + std::to_string(cfg.query_count) + " exceeds pool size " +
              std::to_string(pool.size()) + "; querying every document once");
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < n_queries; ++i) std::swap(order[i], order[i + rng.below(pool.size() - i)]);
  order.resize(n_queries);
  std::sort(order.begin(), order.end());

  EvalResult res;
  res.combination = combination_name(cfg.languages);
  res.scheme = cfg.scheme;
  res.query_count = n_queries;
  const int k_max = *std::max_element(cfg.ks.begin(), cfg.ks.end());
  std::map<int, double> sums;
  for (int k : cfg.ks) sums[k] = 0.0;

  for (std::size_t qi : order) {
    const Entry& q = pool[qi];
    std::set<std::string> relevant;
    for (const auto& c : q.categories)
      for (std::size_t j : by_category[c])
        if (j != qi) relevant.insert(pool[j].key);
    if (relevant.empty()) {
      ++res.skipped_no_ground_truth;
      continue;
    }
    if (q.hash == nullptr) {
      ++res.skipped_no_hash;
      continue;
    }
    HashExpression query = *q.hash;
    query.doc_id = q.key;
    const auto hits = index->query(query, static_cast<std::size_t>(k_max));
    std::vector<std::string> ranked;
    for (const auto& r : hits.ranked) ranked.push_back(r.doc_id);
    for (int k : cfg.ks) sums[k] += precision_at_k(ranked, relevant, k);
    ++res.evaluated;
  }
  for (int k : cfg.ks) res.precision[k] = res.evaluated ? sums[k] / static_cast<double>(res.evaluated) : 0.0;
  if (res.evaluated == 0) log::warn("combination " + res.combination + ": no query could be evaluated");
  return res;
}

namespace detail {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace detail

/// Rows p@k, one column per (combination, scheme) pair, category before
/// synset; "NA" where a scheme was not evaluated.
inline std::string report_to_tsv(const EvalReport& report) {
  std::vector<std::string> combos;
  for (const auto& r : report.results)
    if (std::find(combos.begin(), combos.end(), r.combination) == combos.end()) combos.push_back(r.combination);
  auto find = [&](const std::string& c, LabelScheme s) -> const EvalResult* {
    for (const auto& r : report.results)
      if (r.combination == c && r.scheme == s) return &r;
    return nullptr;
  };
  const LabelScheme schemes[] = {LabelScheme::category, LabelScheme::synset};
  std::string out = "metric";
  for (const auto& c : combos)
    for (auto s : schemes) out += "\t" + c + ":" + to_string(s);
  out += "\n";
  for (int k : report.ks) {
    out += "p@" + std::to_string(k);
    for (const auto& c : combos)
      for (auto s : schemes) {
        const auto* r = find(c, s);
        out += "\t" + (r ? detail::fixed4(r->precision.at(k)) : std::string("NA"));
      }
    out += "\n";
  }
  return out;
}

inline std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["ks"] = report.ks;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : report.results) {
    nlohmann::ordered_json e;
    e["combination"] = r.combination;
    e["scheme"] = to_string(r.scheme);
    e["query_count"] = r.query_count;
    e["evaluated"] = r.evaluated;
    e["skipped_no_ground_truth"] = r.skipped_no_ground_truth;
    e["skipped_no_hash"] = r.skipped_no_hash;
    nlohmann::ordered_json p;
    for (const auto& [k, v] : r.precision) p["p@" + std::to_string(k)] = v;
    e["precision"] = std::move(p);
    arr.push_back(std::move(e));
  }
  j["results"] = std::move(arr);
  return j.dump(1) + "\n";
}

}  // namespace synhash
