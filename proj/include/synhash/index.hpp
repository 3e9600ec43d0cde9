#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "synhash/common.hpp"
#include "synhash/hashing.hpp"

namespace synhash {

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Ranked by score descending, ties by ascending doc id; only scores > 0.
struct QueryResult {
  std::vector<ScoredDoc> ranked;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// Per-level inverted index over hash expressions. Lookups are exact: a
/// document can only score above zero if it shares a label with the query
/// at some level, so the union of the query's postings is a lossless
/// candidate set.
///
/// const members may run concurrently; add_document needs exclusive access.
class InvertedIndex {
 public:
  using PostingKey = std::pair<int, std::string>;

  explicit InvertedIndex(int num_levels) : num_levels_(num_levels) {
    if (num_levels < 1) throw UsageError("index needs at least one level");
  }

  int num_levels() const { return num_levels_; }
  std::size_t size() const { return store_.size(); }
  const std::map<std::string, HashExpression>& store() const { return store_; }
  const std::map<PostingKey, std::vector<std::string>>& postings() const { return postings_; }

  void add_document(HashExpression hash) {
    check_levels(hash);
    if (store_.contains(hash.doc_id)) throw DataError("document '" + hash.doc_id + "' is already indexed");
    for (int i = 0; i < num_levels_; ++i) {
      for (const auto& label : hash.levels[i]) {
        auto& list = postings_[{i, label}];
        list.insert(std::lower_bound(list.begin(), list.end(), hash.doc_id), hash.doc_id);
      }
    }
    std::string id = hash.doc_id;
    store_.emplace(std::move(id), std::move(hash));
  }

  /// Documents sharing at least one (level, label) pair with the query,
  /// ascending by id.
  std::vector<std::string> candidates(const HashExpression& query) const {
    check_levels(query);
    std::vector<std::string> out;
    for (int i = 0; i < num_levels_; ++i) {
      for (const auto& label : query.levels[i]) {
        auto it = postings_.find({i, label});
        if (it != postings_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Top-k documents by similarity, excluding the query's own id.
  QueryResult query(const HashExpression& q, std::size_t k) const {
    if (k < 1) throw UsageError("k must be >= 1");
    std::vector<ScoredDoc> scored;
    for (const auto& id : candidates(q)) {
      if (id == q.doc_id) continue;
      double s = similarity(q, store_.at(id));
      if (s > 0.0) scored.push_back({id, s});
    }
    return rank(std::move(scored), k);
  }

  /// Linear scan over every stored document; the reference for query().
  QueryResult brute_force_query(const HashExpression& q, std::size_t k) const {
    check_levels(q);
    if (k < 1) throw UsageError("k must be >= 1");
    std::vector<ScoredDoc> scored;
    for (const auto& [id, h] : store_) {
      if (id == q.doc_id) continue;
      double s = similarity(q, h);
      if (s > 0.0) scored.push_back({id, s});
    }
    return rank(std::move(scored), k);
  }

  /// Fresh index built from the stored hashes alone.
  InvertedIndex rebuilt() const {
    InvertedIndex fresh(num_levels_);
    for (const auto& [id, h] : store_) fresh.add_document(h);
    return fresh;
  }

  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    return a.num_levels_ == b.num_levels_ && a.store_ == b.store_ && a.postings_ == b.postings_;
  }

 private:
  void check_levels(const HashExpression& h) const {
    if (h.num_levels() != num_levels_)
      throw DataError("hash '" + h.doc_id + "' has " + std::to_string(h.num_levels()) + " levels, index has " +
                      std::to_string(num_levels_));
  }

  static QueryResult rank(std::vector<ScoredDoc> scored, std::size_t k) {
    auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id < b.doc_id;
    };
    if (scored.size() > k) {
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), better);
      scored.resize(k);
    } else {
      std::sort(scored.begin(), scored.end(), better);
    }
    return {std::move(scored)};
  }

  int num_levels_;
  std::map<std::string, HashExpression> store_;
  std::map<PostingKey, std::vector<std::string>> postings_;
};

/// Sidecar describing a persisted hash file.
struct IndexManifest {
  int num_levels = 0;
  LabelScheme scheme = LabelScheme::synset;
  std::map<std::string, std::string> models;  // lang -> model identity
  std::map<std::string, std::string> hash_files;  // lang -> file name, relative to the manifest

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["L"] = num_levels;
    j["scheme"] = to_string(scheme);
    j["models"] = models;
    j["hash_files"] = hash_files;
    return j.dump(1) + "\n";
  }

  static IndexManifest from_json(std::string_view text) {
    try {
      auto j = nlohmann::json::parse(text);
      IndexManifest m;
      m.num_levels = j.at("L").get<int>();
      m.scheme = parse_scheme(j.at("scheme").get<std::string>());
      m.models = j.at("models").get<std::map<std::string, std::string>>();
      m.hash_files = j.value("hash_files", std::map<std::string, std::string>{});
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("manifest schema violation: ") + e.what());
    }
  }
};

inline std::string hashes_to_jsonl(const std::vector<HashExpression>& hashes) {
  std::string out;
  for (const auto& h : hashes) out += hash_to_json_line(h) + "\n";
  return out;
}

inline std::vector<HashExpression> load_hashes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hash file " + path.string());
  std::vector<HashExpression> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(hash_from_json_line(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace synhash
