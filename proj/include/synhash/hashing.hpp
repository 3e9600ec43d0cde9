#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synhash/annotate.hpp"
#include "synhash/common.hpp"
#include "synhash/topicmodel.hpp"

namespace synhash {

/// A document as L label sets, level 0 holding the labels of its most
/// important topics.
struct HashExpression {
  std::string doc_id;
  std::vector<LabelSet> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }

  friend bool operator==(const HashExpression&, const HashExpression&) = default;
};

using TopicLevels = std::vector<std::vector<int>>;

namespace detail {

// Optimal partition of `values` (sorted descending, distinct) with
// multiplicities `weights` into `groups` contiguous runs minimizing the
// within-run sum of squares. Returns the start index of each run.
inline std::vector<std::size_t> kmeans_1d(const std::vector<double>& values, const std::vector<double>& weights,
                                          std::size_t groups) {
  const std::size_t m = values.size();
  std::vector<double> sw(m + 1, 0.0), swx(m + 1, 0.0), swxx(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    sw[i + 1] = sw[i] + weights[i];
    swx[i + 1] = swx[i] + weights[i] * values[i];
    swxx[i + 1] = swxx[i] + weights[i] * values[i] * values[i];
  }
  // Sum of squares of run [a, b).
  auto cost = [&](std::size_t a, std::size_t b) {
    const double w = sw[b] - sw[a];
    const double s = swx[b] - swx[a];
    return std::max(0.0, (swxx[b] - swxx[a]) - s * s / w);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[g][j]: cost of splitting the first j values into g runs.
  std::vector<std::vector<double>> best(groups + 1, std::vector<double>(m + 1, kInf));
  std::vector<std::vector<std::size_t>> split(groups + 1, std::vector<std::size_t>(m + 1, 0));
  best[0][0] = 0.0;
  for (std::size_t g = 1; g <= groups; ++g) {
    for (std::size_t j = g; j <= m; ++j) {
      for (std::size_t i = g - 1; i < j; ++i) {
        if (best[g - 1][i] == kInf) continue;
        double c = best[g - 1][i] + cost(i, j);
        if (c < best[g][j]) {
          best[g][j] = c;
          split[g][j] = i;
        }
      }
    }
  }
  std::vector<std::size_t> starts(groups);
  std::size_t j = m;
  for (std::size_t g = groups; g >= 1; --g) {
    starts[g - 1] = split[g][j];
    j = split[g][j];
  }
  return starts;
}

}  // namespace detail

/// Splits the topics of a document into L importance levels:
/// topics below uniform mass (theta_k < 1/K) are dropped, the remaining
/// masses are clustered by exact 1-D k-means into min(L, #distinct values)
/// groups, and groups are ordered by descending mean. Trailing levels stay
/// empty. Topic ids inside a level are ascending.
inline TopicLevels assign_levels(const DocTopicDist& dist, int num_levels) {
  if (num_levels < 1) throw UsageError("number of levels must be >= 1");
  const int k_count = dist.num_topics();
  TopicLevels levels(num_levels);
  if (k_count == 0) return levels;
  const double threshold = 1.0 / k_count;

  std::vector<int> survivors;
  for (int k = 0; k < k_count; ++k)
    if (dist.theta[k] >= threshold * (1.0 - 1e-12)) survivors.push_back(k);
  if (survivors.empty()) {
    log::warn("no topic reaches uniform mass; hash levels left empty");
    return levels;
  }

  std::vector<double> values;
  std::vector<double> weights;
  {
    std::vector<double> sorted;
    for (int k : survivors) sorted.push_back(dist.theta[k]);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (double v : sorted) {
      if (!values.empty() && values.back() == v) {
        weights.back() += 1.0;
      } else {
        values.push_back(v);
        weights.push_back(1.0);
      }
    }
  }
  const std::size_t groups = std::min<std::size_t>(static_cast<std::size_t>(num_levels), values.size());
  const auto starts = detail::kmeans_1d(values, weights, groups);

  // Run g covers values[starts[g], starts[g+1]); map each survivor by value.
  for (int k : survivors) {
    const double v = dist.theta[k];
    auto pos = static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), v, std::greater<>()) - values.begin());
    std::size_t g = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), pos) - starts.begin()) - 1;
    levels[g].push_back(k);
  }
  return levels;
}

/// Level i of the hash is the union of the labels of the topics that
/// assign_levels put at level i.
inline HashExpression build_hash(std::string doc_id, const DocTopicDist& dist, const TopicLabelSet& labels,
                                 int num_levels) {
  if (labels.num_topics() != dist.num_topics())
    throw DataError("label set covers " + std::to_string(labels.num_topics()) + " topics but the distribution has " +
                    std::to_string(dist.num_topics()));
  HashExpression h;
  h.doc_id = std::move(doc_id);
  h.levels.resize(num_levels);
  const auto levels = assign_levels(dist, num_levels);
  for (int i = 0; i < num_levels; ++i)
    for (int k : levels[i]) h.levels[i].insert(labels.labels[k].begin(), labels.labels[k].end());
  return h;
}

/// |A ∩ B| / |A ∪ B|, with two empty sets scoring 0.
inline double jaccard(const LabelSet& a, const LabelSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

/// Sum of the per-level Jaccard indices; lies in [0, L].
inline double similarity(const HashExpression& a, const HashExpression& b) {
  if (a.num_levels() != b.num_levels())
    throw DataError("hash expressions have different level counts (" + std::to_string(a.num_levels()) + " vs " +
                    std::to_string(b.num_levels()) + ")");
  double s = 0.0;
  for (int i = 0; i < a.num_levels(); ++i) s += jaccard(a.levels[i], b.levels[i]);
  return s;
}

inline double distance(const HashExpression& a, const HashExpression& b) {
  return a.num_levels() - similarity(a, b);
}

inline std::string hash_to_json_line(const HashExpression& h) {
  nlohmann::ordered_json j;
  j["doc_id"] = h.doc_id;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : h.levels) levels.push_back(std::vector<std::string>(l.begin(), l.end()));
  j["levels"] = std::move(levels);
  return j.dump();
}

inline HashExpression hash_from_json_line(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    HashExpression h;
    h.doc_id = j.at("doc_id").get<std::string>();
    for (const auto& level : j.at("levels")) {
      LabelSet s;
      for (const auto& l : level) s.insert(l.get<std::string>());
      h.levels.push_back(std::move(s));
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed hash record: ") + e.what());
  }
}

}  // namespace synhash
