#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synhash/annotate.hpp"
#include "synhash/common.hpp"
#include "synhash/corpus.hpp"

namespace synhash {

namespace fs = std::filesystem;

/// Flat `key = value` settings. Per-language paths use dotted keys
/// (`corpus.en = ...`); lists are comma separated or written as ["a", "b"].
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::string& origin = "config") {
    KeyValueConfig cfg;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    std::string section;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos && line.find('"') > hash) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw DataError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = detail::trim(line.substr(0, eq));
      if (!section.empty()) key = section + "." + key;
      cfg.set(key, detail::trim(line.substr(eq + 1)));
    }
    return cfg;
  }

  static KeyValueConfig load(const fs::path& path) {
    auto cfg = parse(read_file(path), path.string());
    cfg.base_dir_ = path.parent_path();
    return cfg;
  }

  void set(const std::string& key, std::string value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    values_[key] = std::move(value);
  }

  bool has(const std::string& key) const { return values_.contains(key); }
  const fs::path& base_dir() const { return base_dir_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      long long x = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return x;
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "' must be an integer, got '" + *v + "'");
    }
  }

  double get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      double x = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return x;
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "' must be a number, got '" + *v + "'");
    }
  }

  std::vector<std::string> get_list(const std::string& key, std::vector<std::string> fallback = {}) const {
    auto v = get(key);
    if (!v) return fallback;
    std::string s = *v;
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      auto comma = s.find(',', pos);
      std::string item = detail::trim(s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (item.size() >= 2 && item.front() == '"' && item.back() == '"') item = item.substr(1, item.size() - 2);
      if (!item.empty()) out.push_back(item);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  /// Paths are resolved against the directory of the config file.
  fs::path get_path(const std::string& key) const {
    auto v = get(key);
    if (!v) throw UsageError("config key '" + key + "' is required");
    fs::path p(*v);
    return p.is_absolute() ? p : base_dir_ / p;
  }

 private:
  std::map<std::string, std::string> values_;
  fs::path base_dir_;
};

/// Validated settings for a full pipeline run.
struct RunConfig {
  std::vector<std::string> languages;
  std::map<std::string, fs::path> corpus;
  std::map<std::string, fs::path> stopwords;
  std::map<std::string, fs::path> omw;
  std::optional<fs::path> taxonomy;
  fs::path out_dir = "out";

  int num_topics = 100;
  double alpha = 0.5;
  double beta = 0.01;
  int sweeps = 1000;
  int infer_sweeps = 50;
  std::uint64_t seed = 1;
  std::size_t min_df = 1;
  double max_df_ratio = 1.0;
  std::size_t min_len = 2;

  std::size_t top_n = 5;
  int levels = 3;
  int depth = 1;
  std::vector<LabelScheme> schemes{LabelScheme::synset};
  std::vector<int> ks{3, 5, 10};
  std::size_t query_count = 1000;
  std::vector<std::vector<std::string>> combinations;

  bool has_scheme(LabelScheme s) const {
    return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
  }

  /// Seed for one pipeline stage; every stage draws from the config seed.
  std::uint64_t stage_seed(std::string_view stage) const { return splitmix64(seed ^ fnv1a64(stage)); }

  static RunConfig from(const KeyValueConfig& kv) {
    RunConfig c;
    c.languages = kv.get_list("languages");
    if (c.languages.empty()) throw UsageError("config key 'languages' is required");
    for (const auto& l : c.languages) {
      c.corpus[l] = kv.get_path("corpus." + l);
      if (kv.has("stopwords." + l)) c.stopwords[l] = kv.get_path("stopwords." + l);
      if (kv.has("omw." + l)) c.omw[l] = kv.get_path("omw." + l);
    }
    if (kv.has("taxonomy")) c.taxonomy = kv.get_path("taxonomy");
    c.out_dir = kv.has("out_dir") ? kv.get_path("out_dir") : kv.base_dir() / "out";

    c.num_topics = static_cast<int>(kv.get_int("K", c.num_topics));
    c.alpha = kv.get_double("alpha", 50.0 / c.num_topics);
    c.beta = kv.get_double("beta", c.beta);
    c.sweeps = static_cast<int>(kv.get_int("sweeps", c.sweeps));
    c.infer_sweeps = static_cast<int>(kv.get_int("infer_sweeps", c.infer_sweeps));
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long long>(c.seed)));
    auto count = [&](const std::string& key, long long fallback) {
      long long v = kv.get_int(key, fallback);
      if (v < 0) throw UsageError("config key '" + key + "' must not be negative");
      return static_cast<std::size_t>(v);
    };
    c.min_df = count("min_df", 1);
    c.max_df_ratio = kv.get_double("max_df_ratio", c.max_df_ratio);
    c.min_len = count("min_len", 2);
    c.top_n = count("top_n", 5);
    c.levels = static_cast<int>(kv.get_int("L", c.levels));
    c.depth = static_cast<int>(kv.get_int("depth", c.depth));
    c.query_count = count("query_count", 1000);

    c.schemes.clear();
    for (const auto& s : kv.get_list("scheme", {"synset"})) {
      if (s == "both") {
        c.schemes = {LabelScheme::category, LabelScheme::synset};
        break;
      }
      c.schemes.push_back(parse_scheme(s));
    }
    c.ks.clear();
    for (const auto& k : kv.get_list("ks", {"3", "5", "10"})) {
      try {
        c.ks.push_back(std::stoi(k));
      } catch (const std::exception&) {
        throw UsageError("ks entries must be integers, got '" + k + "'");
      }
    }
    for (const auto& combo : kv.get_list("combinations")) {
      std::vector<std::string> langs;
      std::size_t pos = 0;
      while (pos <= combo.size()) {
        auto plus = combo.find('+', pos);
        langs.push_back(detail::trim(combo.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos)));
        if (plus == std::string::npos) break;
        pos = plus + 1;
      }
      c.combinations.push_back(std::move(langs));
    }
    if (c.combinations.empty())
      for (const auto& l : c.languages) c.combinations.push_back({l});
    c.validate();
    return c;
  }

  void validate() const {
    if (num_topics < 1) throw UsageError("K must be >= 1");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw UsageError("alpha and beta must be > 0");
    if (sweeps < 1 || infer_sweeps < 1) throw UsageError("sweeps must be >= 1");
    if (min_len < 1) throw UsageError("min_len must be >= 1");
    if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0)) throw UsageError("max_df_ratio must lie in (0, 1]");
    if (top_n < 1) throw UsageError("top_n must be >= 1");
    if (levels < 1) throw UsageError("L must be >= 1");
    if (depth < 1) throw UsageError("depth must be >= 1");
    if (query_count < 1) throw UsageError("query_count must be >= 1");
    if (ks.empty()) throw UsageError("ks must not be empty");
    for (int k : ks)
      if (k < 1) throw UsageError("every k must be >= 1");
    if (schemes.empty()) throw UsageError("scheme must name at least one of synset, category");
    for (const auto& combo : combinations)
      for (const auto& l : combo)
        if (std::find(languages.begin(), languages.end(), l) == languages.end())
          throw UsageError("combination uses undeclared language '" + l + "'");
  }

  /// Existence check for every referenced input file.
  void check_files() const {
    auto need = [](const fs::path& p) {
      if (!fs::exists(p)) throw DataError("missing file " + p.string());
    };
    for (const auto& [l, p] : corpus) need(p);
    for (const auto& [l, p] : stopwords) need(p);
    for (const auto& [l, p] : omw) need(p);
    if (taxonomy) need(*taxonomy);
  }
};

}  // namespace synhash
