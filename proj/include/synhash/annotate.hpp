#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synhash/common.hpp"
#include "synhash/lexicon.hpp"
#include "synhash/topicmodel.hpp"

namespace synhash {

enum class LabelScheme { synset, category };

inline std::string to_string(LabelScheme s) { return s == LabelScheme::synset ? "synset" : "category"; }

inline LabelScheme parse_scheme(std::string_view s) {
  if (s == "synset") return LabelScheme::synset;
  if (s == "category") return LabelScheme::category;
  throw UsageError("unknown label scheme '" + std::string(s) + "'");
}

using LabelSet = std::set<std::string>;

/// Cross-lingual labels for every topic of one model.
struct TopicLabelSet {
  LabelScheme scheme = LabelScheme::synset;
  std::string lang;
  std::string model_id;  // model_identity() of the annotated model
  int top_n = 0;         // 0 for the category scheme
  std::vector<LabelSet> labels;

  int num_topics() const { return static_cast<int>(labels.size()); }

  friend bool operator==(const TopicLabelSet&, const TopicLabelSet&) = default;
};

/// Union of the synsets of each topic's top-n words. Words missing from the
/// lexicon contribute nothing; a topic can end up unlabeled.
inline TopicLabelSet annotate_topics_synset(const TopicModel& model, const SynsetLexicon& lexicon,
                                            std::size_t n = 5) {
  if (!lexicon.langs().contains(model.lang))
    throw UsageError("lexicon has no entries for language '" + model.lang + "'");
  TopicLabelSet out;
  out.scheme = LabelScheme::synset;
  out.lang = model.lang;
  out.model_id = model_identity(model);
  out.top_n = static_cast<int>(n);
  out.labels.resize(model.num_topics);
  for (int k = 0; k < model.num_topics; ++k) {
    for (const auto& [word, p] : top_words(model, k, n))
      for (const auto& s : lexicon.synsets_of(word, model.lang)) out.labels[k].insert(s.str());
    if (out.labels[k].empty())
      log::warn("topic " + std::to_string(k) + " of the " + model.lang + " model has no synset for its top words");
  }
  return out;
}

inline TopicLabelSet annotate_topics_category(const TopicModel& model) {
  if (!model.category_of) throw UsageError("model has no topic/category binding (not a labeled model)");
  TopicLabelSet out;
  out.scheme = LabelScheme::category;
  out.lang = model.lang;
  out.model_id = model_identity(model);
  for (const auto& c : *model.category_of) out.labels.push_back({c});
  return out;
}

inline std::string labels_to_json(const TopicLabelSet& ls) {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(ls.scheme);
  j["lang"] = ls.lang;
  j["model"] = ls.model_id;
  j["n"] = ls.top_n;
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < ls.labels.size(); ++k)
    labels[std::to_string(k)] = std::vector<std::string>(ls.labels[k].begin(), ls.labels[k].end());
  j["labels"] = std::move(labels);
  return j.dump(1) + "\n";
}

inline TopicLabelSet labels_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    TopicLabelSet ls;
    ls.scheme = parse_scheme(j.at("scheme").get<std::string>());
    ls.lang = j.at("lang").get<std::string>();
    ls.model_id = j.value("model", "");
    ls.top_n = j.value("n", 0);
    const auto& labels = j.at("labels");
    ls.labels.resize(labels.size());
    for (const auto& [key, arr] : labels.items()) {
      std::size_t k = std::stoul(key);
      if (k >= ls.labels.size()) throw DataError("label topic ids must be 0..K-1");
      for (const auto& l : arr) ls.labels[k].insert(l.get<std::string>());
    }
    if (ls.scheme == LabelScheme::category)
      for (const auto& s : ls.labels)
        if (s.size() != 1) throw DataError("category label sets must be singletons");
    return ls;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("label file schema violation: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("label file: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw DataError("label file: topic keys must be integers");
  }
}

}  // namespace synhash
