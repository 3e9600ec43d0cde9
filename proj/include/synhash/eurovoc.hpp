#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "synhash/common.hpp"
#include "synhash/corpus.hpp"

namespace synhash {

/// Thesaurus forest: every concept has at most one broader concept and
/// reaches a root (domain) by following them.
class Taxonomy {
 public:
  Taxonomy() = default;

  /// `broader` maps each concept to its parent, or to "" for roots.
  explicit Taxonomy(std::map<std::string, std::string> broader) : broader_(std::move(broader)) {
    for (const auto& [c, p] : broader_) {
      if (c.empty()) throw DataError("empty concept id");
      if (p.empty()) {
        domains_.insert(c);
      } else {
        if (!broader_.contains(p)) throw DataError("concept '" + c + "' has unknown parent '" + p + "' (orphan)");
        children_[p].push_back(c);
      }
    }
    for (auto& [p, kids] : children_) std::sort(kids.begin(), kids.end());
    compute_depths();
  }

  const std::map<std::string, std::string>& broader() const { return broader_; }
  const std::set<std::string>& domains() const { return domains_; }
  bool contains(const std::string& c) const { return broader_.contains(c); }
  std::size_t size() const { return broader_.size(); }

  int depth(const std::string& c) const { return depth_.at(c); }

  const std::vector<std::string>& children(const std::string& c) const {
    static const std::vector<std::string> kNone;
    auto it = children_.find(c);
    return it == children_.end() ? kNone : it->second;
  }

  std::optional<std::string> parent(const std::string& c) const {
    const auto& p = broader_.at(c);
    if (p.empty()) return std::nullopt;
    return p;
  }

  bool is_ancestor(const std::string& anc, const std::string& c) const {
    for (auto p = parent(c); p; p = parent(*p))
      if (*p == anc) return true;
    return false;
  }

  /// Ancestor of c at the given depth (c itself when depth(c) == d).
  std::string ancestor_at(const std::string& c, int d) const {
    std::string cur = c;
    while (depth(cur) > d) cur = broader_.at(cur);
    return cur;
  }

  std::vector<std::string> subtree(const std::string& c) const {
    std::vector<std::string> out{c};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (const auto& k : children(out[i])) out.push_back(k);
    return out;
  }

 private:
  void compute_depths() {
    std::vector<std::string> frontier(domains_.begin(), domains_.end());
    for (const auto& r : frontier) depth_[r] = 0;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      for (const auto& k : children(frontier[i])) {
        depth_[k] = depth_[frontier[i]] + 1;
        frontier.push_back(k);
      }
    }
    // Concepts unreachable from a root sit on a cycle (or hang off one).
    if (depth_.size() != broader_.size()) {
      for (const auto& [c, p] : broader_)
        if (!depth_.contains(c)) throw DataError("taxonomy has a cycle through concept '" + c + "'");
    }
  }

  std::map<std::string, std::string> broader_;
  std::set<std::string> domains_;
  std::map<std::string, std::vector<std::string>> children_;
  std::map<std::string, int> depth_;
};

/// Reads "concept_id TAB parent_id" lines; roots have an empty parent.
inline Taxonomy load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open taxonomy " + path.string());
  std::map<std::string, std::string> broader;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line[0] == '#') continue;
    auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    auto tab = line.find('\t');
    std::string concept_id = detail::trim(line.substr(0, tab));
    std::string parent = tab == std::string::npos ? "" : detail::trim(line.substr(tab + 1));
    if (concept_id.empty()) throw DataError(where + "empty concept id");
    if (parent.find('\t') != std::string::npos) throw DataError(where + "expected two columns");
    if (!broader.emplace(concept_id, parent).second)
      throw DataError(where + "concept '" + concept_id + "' listed twice");
  }
  return Taxonomy(std::move(broader));
}

/// Flat, mutually independent category set and the concept -> category map.
struct CategoryMapping {
  int depth = 0;
  std::set<std::string> categories;
  std::map<std::string, std::string> to_category;
  /// Known concepts without a category (roots, interior concepts above the cut).
  std::set<std::string> unmapped;
  /// Corpus codes on interior concepts that could not become categories
  /// because a category below them is also in use.
  std::set<std::string> conflicts;

  /// Throws for unknown concepts and for unmapped ones.
  const std::string& category_of(const std::string& concept_id) const {
    auto it = to_category.find(concept_id);
    if (it != to_category.end()) return it->second;
    if (unmapped.contains(concept_id))
      throw DataError("concept '" + concept_id + "' lies above the category cut and has no category");
    throw DataError("unknown concept id '" + concept_id + "'");
  }

  std::vector<std::string> sorted_categories() const { return {categories.begin(), categories.end()}; }
};

/// Cuts the forest at `depth`. Concepts at the cut, and leaves above it, are
/// the categories; deeper concepts map to their ancestor at the cut. Roots are
/// never categories. An interior concept above the cut that occurs in
/// `corpus_codes` becomes a category absorbing its whole subtree, unless some
/// other corpus code already maps inside that subtree; such codes are listed
/// in `conflicts`. Interior concepts are resolved deepest first.
inline CategoryMapping flatten(const Taxonomy& tax, int depth, const std::set<std::string>& corpus_codes = {}) {
  if (depth < 1) throw UsageError("flatten depth must be >= 1");
  CategoryMapping m;
  m.depth = depth;
  std::vector<std::string> interior;
  for (const auto& [c, p] : tax.broader()) {
    const int d = tax.depth(c);
    const bool leaf = tax.children(c).empty();
    if (d >= depth) {
      std::string cat = tax.ancestor_at(c, depth);
      m.to_category[c] = cat;
      m.categories.insert(cat);
    } else if (p.empty()) {
      m.unmapped.insert(c);
    } else if (leaf) {
      m.to_category[c] = c;
      m.categories.insert(c);
    } else {
      m.unmapped.insert(c);
      if (corpus_codes.contains(c)) interior.push_back(c);
    }
  }
  std::stable_sort(interior.begin(), interior.end(),
                   [&](const std::string& a, const std::string& b) { return tax.depth(a) > tax.depth(b); });
  for (const auto& c : interior) {
    const auto sub = tax.subtree(c);
    const bool in_use = std::any_of(sub.begin() + 1, sub.end(), [&](const std::string& x) {
      return corpus_codes.contains(x) && m.to_category.contains(x);
    });
    if (in_use) {
      m.conflicts.insert(c);
      continue;
    }
    for (const auto& x : sub) {
      if (m.categories.erase(x) == 0) m.unmapped.erase(x);
      m.to_category[x] = c;
    }
    m.unmapped.erase(c);
    m.categories.insert(c);
  }
  return m;
}

struct MappedCodes {
  std::set<std::string> categories;
  std::vector<std::string> unmappable;
};

/// Maps document codes onto categories; codes without a category are
/// reported in `unmappable`, unknown codes throw.
inline MappedCodes map_codes(const std::set<std::string>& codes, const CategoryMapping& mapping) {
  MappedCodes out;
  for (const auto& c : codes) {
    auto it = mapping.to_category.find(c);
    if (it != mapping.to_category.end()) {
      out.categories.insert(it->second);
    } else if (mapping.unmapped.contains(c)) {
      out.unmappable.push_back(c);
    } else {
      throw DataError("unknown concept id '" + c + "'");
    }
  }
  return out;
}

inline std::string mapping_to_json(const CategoryMapping& m) {
  nlohmann::ordered_json j;
  j["depth"] = m.depth;
  j["categories"] = m.sorted_categories();
  j["to_category"] = m.to_category;
  j["unmapped"] = m.unmapped;
  j["conflicts"] = m.conflicts;
  return j.dump(1) + "\n";
}

inline CategoryMapping mapping_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    CategoryMapping m;
    m.depth = j.at("depth").get<int>();
    m.categories = j.at("categories").get<std::set<std::string>>();
    m.to_category = j.at("to_category").get<std::map<std::string, std::string>>();
    m.unmapped = j.value("unmapped", std::set<std::string>{});
    m.conflicts = j.value("conflicts", std::set<std::string>{});
    for (const auto& [c, cat] : m.to_category)
      if (!m.categories.contains(cat)) throw DataError("mapping target '" + cat + "' is not a category");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("mapping file schema violation: ") + e.what());
  }
}

}  // namespace synhash
