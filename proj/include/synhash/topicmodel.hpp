#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "synhash/common.hpp"
#include "synhash/corpus.hpp"

namespace synhash {

/// Thrown by infer_theta when none of the lemmas is in the model vocabulary.
/// Callers typically skip such documents.
class NoInVocabularyError : public DataError {
 public:
  using DataError::DataError;
};

/// Per-language topic model. phi is stored row-major, K rows of V entries.
struct TopicModel {
  static constexpr int kFormatVersion = 1;

  std::string lang;
  int num_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int sweeps = 0;
  Vocabulary vocab;
  std::vector<double> phi;
  /// Topic k is bound to category_of[k] (LabeledLDA only).
  std::optional<std::vector<std::string>> category_of;

  std::size_t vocab_size() const { return vocab.size(); }

  std::span<const double> topic(int k) const {
    return {phi.data() + static_cast<std::size_t>(k) * vocab.size(), vocab.size()};
  }
};

struct DocTopicDist {
  std::vector<double> theta;

  int num_topics() const { return static_cast<int>(theta.size()); }
};

struct LdaParams {
  int num_topics = 100;
  double alpha = 0.5;  // callers usually pass 50 / num_topics
  double beta = 0.01;
  int sweeps = 1000;
  std::uint64_t seed = 1;
};

/// Read-only view of the sampler counts, handed to sweep observers.
class SamplerState {
 public:
  int num_docs() const { return static_cast<int>(tokens_.size()); }
  int num_topics() const { return k_; }
  int vocab_size() const { return v_; }
  int sweep() const { return sweep_; }

  std::span<const int> tokens(int d) const { return tokens_[d]; }
  std::span<const int> assignments(int d) const { return z_[d]; }
  int doc_topic(int d, int k) const { return n_dk_[static_cast<std::size_t>(d) * k_ + k]; }
  int topic_word(int k, int w) const { return n_kw_[static_cast<std::size_t>(k) * v_ + w]; }
  int topic_total(int k) const { return n_k_[k]; }
  /// Empty when every topic is allowed.
  std::span<const int> allowed(int d) const {
    return allowed_.empty() ? std::span<const int>{} : std::span<const int>(allowed_[d]);
  }

 protected:
  int k_ = 0;
  int v_ = 0;
  int sweep_ = 0;
  std::vector<std::vector<int>> tokens_;
  std::vector<std::vector<int>> z_;
  std::vector<std::vector<int>> allowed_;
  std::vector<int> n_dk_;
  std::vector<int> n_kw_;
  std::vector<int> n_k_;
};

using SweepObserver = std::function<void(const SamplerState&)>;

namespace detail {

class GibbsSampler : public SamplerState {
 public:
  GibbsSampler(std::vector<std::vector<int>> tokens, std::vector<std::vector<int>> allowed, int num_topics,
               int vocab_size, double alpha, double beta, std::uint64_t seed)
      : alpha_(alpha), beta_(beta), rng_(seed) {
    k_ = num_topics;
    v_ = vocab_size;
    tokens_ = std::move(tokens);
    allowed_ = std::move(allowed);
    n_dk_.assign(tokens_.size() * static_cast<std::size_t>(k_), 0);
    n_kw_.assign(static_cast<std::size_t>(k_) * v_, 0);
    n_k_.assign(k_, 0);
    z_.resize(tokens_.size());
    for (int d = 0; d < num_docs(); ++d) {
      z_[d].resize(tokens_[d].size());
      for (std::size_t i = 0; i < tokens_[d].size(); ++i) {
        int k = allowed_.empty() ? static_cast<int>(rng_.below(k_))
                                 : allowed_[d][rng_.below(allowed_[d].size())];
        z_[d][i] = k;
        add(d, tokens_[d][i], k, +1);
      }
    }
    weights_.resize(k_);
  }

  void sweep_once() {
    const double vbeta = v_ * beta_;
    for (int d = 0; d < num_docs(); ++d) {
      const auto& toks = tokens_[d];
      for (std::size_t i = 0; i < toks.size(); ++i) {
        const int w = toks[i];
        add(d, w, z_[d][i], -1);
        int k_new;
        if (allowed_.empty()) {
          double total = 0.0;
          for (int k = 0; k < k_; ++k) {
            total += (doc_topic(d, k) + alpha_) * (topic_word(k, w) + beta_) / (n_k_[k] + vbeta);
            weights_[k] = total;
          }
          k_new = draw(total, k_);
        } else {
          const auto& labels = allowed_[d];
          const int n = static_cast<int>(labels.size());
          double total = 0.0;
          for (int j = 0; j < n; ++j) {
            int k = labels[j];
            total += (doc_topic(d, k) + alpha_) * (topic_word(k, w) + beta_) / (n_k_[k] + vbeta);
            weights_[j] = total;
          }
          k_new = labels[draw(total, n)];
        }
        z_[d][i] = k_new;
        add(d, w, k_new, +1);
      }
    }
    ++sweep_;
  }

  /// Point estimate (n_kw + beta) / (n_k + V beta) from the current state.
  std::vector<double> phi() const {
    std::vector<double> out(static_cast<std::size_t>(k_) * v_);
    const double vbeta = v_ * beta_;
    for (int k = 0; k < k_; ++k)
      for (int w = 0; w < v_; ++w)
        out[static_cast<std::size_t>(k) * v_ + w] = (topic_word(k, w) + beta_) / (n_k_[k] + vbeta);
    return out;
  }

 private:
  void add(int d, int w, int k, int delta) {
    n_dk_[static_cast<std::size_t>(d) * k_ + k] += delta;
    n_kw_[static_cast<std::size_t>(k) * v_ + w] += delta;
    n_k_[k] += delta;
  }

  // Index of the first cumulative weight above u * total.
  int draw(double total, int n) {
    const double u = rng_.uniform() * total;
    auto it = std::upper_bound(weights_.begin(), weights_.begin() + n, u);
    return std::min(static_cast<int>(it - weights_.begin()), n - 1);
  }

  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<double> weights_;
};

inline void check_params(const LdaParams& p) {
  if (p.num_topics < 1) throw UsageError("number of topics must be >= 1");
  if (!(p.alpha > 0.0)) throw UsageError("alpha must be > 0");
  if (!(p.beta > 0.0)) throw UsageError("beta must be > 0");
  if (p.sweeps < 1) throw UsageError("sweeps must be >= 1");
}

inline std::vector<std::vector<int>> encode_corpus(std::span<const Document> docs, const Vocabulary& vocab) {
  if (docs.empty()) throw DataError("empty effective corpus: no documents");
  if (vocab.empty()) throw DataError("empty vocabulary");
  std::vector<std::vector<int>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    auto ids = vocab.encode(d.lemmas);
    if (ids.empty())
      throw DataError("vocabulary/document mismatch: document '" + d.id + "' has no in-vocabulary lemma");
    out.push_back(std::move(ids));
  }
  return out;
}

inline TopicModel run_sampler(GibbsSampler& sampler, const LdaParams& p, const Vocabulary& vocab,
                              std::string lang, const SweepObserver& observer) {
  for (int s = 0; s < p.sweeps; ++s) {
    sampler.sweep_once();
    if (observer) observer(sampler);
  }
  TopicModel m;
  m.lang = std::move(lang);
  m.num_topics = p.num_topics;
  m.alpha = p.alpha;
  m.beta = p.beta;
  m.seed = p.seed;
  m.sweeps = p.sweeps;
  m.vocab = vocab;
  m.phi = sampler.phi();
  return m;
}

}  // namespace detail

/// Collapsed Gibbs LDA. Out-of-vocabulary lemmas are dropped; each document
/// must keep at least one token. The observer, if any, runs after each sweep.
inline TopicModel train_lda(std::span<const Document> docs, const Vocabulary& vocab, const LdaParams& params,
                            const SweepObserver& observer = {}) {
  detail::check_params(params);
  auto tokens = detail::encode_corpus(docs, vocab);
  detail::GibbsSampler sampler(std::move(tokens), {}, params.num_topics, static_cast<int>(vocab.size()),
                               params.alpha, params.beta, params.seed);
  return detail::run_sampler(sampler, params, vocab, docs.front().lang, observer);
}

/// LabeledLDA: one topic per category (in the given order); a token of
/// document d may only take topics from d's `codes`, which here hold
/// category ids. params.num_topics is ignored.
inline TopicModel train_labeled_lda(std::span<const Document> docs, const Vocabulary& vocab,
                                    const std::vector<std::string>& categories, LdaParams params,
                                    const SweepObserver& observer = {}) {
  if (categories.empty()) throw UsageError("labeled LDA needs at least one category");
  params.num_topics = static_cast<int>(categories.size());
  detail::check_params(params);
  std::unordered_map<std::string, int> cat_index;
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (!cat_index.emplace(categories[i], static_cast<int>(i)).second)
      throw UsageError("duplicate category '" + categories[i] + "'");

  std::vector<std::vector<int>> allowed;
  allowed.reserve(docs.size());
  for (const auto& d : docs) {
    if (d.codes.empty()) throw DataError("document '" + d.id + "' has an empty category set");
    std::vector<int> labels;
    for (const auto& c : d.codes) {
      auto it = cat_index.find(c);
      if (it == cat_index.end()) throw DataError("document '" + d.id + "' has unknown category '" + c + "'");
      labels.push_back(it->second);
    }
    std::sort(labels.begin(), labels.end());
    allowed.push_back(std::move(labels));
  }
  auto tokens = detail::encode_corpus(docs, vocab);
  detail::GibbsSampler sampler(std::move(tokens), std::move(allowed), params.num_topics,
                               static_cast<int>(vocab.size()), params.alpha, params.beta, params.seed);
  auto model = detail::run_sampler(sampler, params, vocab, docs.front().lang, observer);
  model.category_of = categories;
  return model;
}

/// Fold-in Gibbs sampling with phi held fixed.
inline DocTopicDist infer_theta(const TopicModel& model, std::span<const std::string> lemmas, int sweeps,
                                std::uint64_t seed) {
  if (sweeps < 1) throw UsageError("sweeps must be >= 1");
  const auto tokens = model.vocab.encode(lemmas);
  if (tokens.empty()) throw NoInVocabularyError("no lemma of the document is in the model vocabulary");
  const int k_count = model.num_topics;
  const std::size_t v = model.vocab_size();
  Rng rng(seed);
  std::vector<int> z(tokens.size());
  std::vector<int> n_k(k_count, 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    z[i] = static_cast<int>(rng.below(k_count));
    ++n_k[z[i]];
  }
  std::vector<double> cum(k_count);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      --n_k[z[i]];
      double total = 0.0;
      for (int k = 0; k < k_count; ++k) {
        total += (n_k[k] + model.alpha) * model.phi[static_cast<std::size_t>(k) * v + tokens[i]];
        cum[k] = total;
      }
      const double u = rng.uniform() * total;
      int k_new = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      k_new = std::min(k_new, k_count - 1);
      z[i] = k_new;
      ++n_k[k_new];
    }
  }
  DocTopicDist dist;
  dist.theta.resize(k_count);
  const double denom = static_cast<double>(tokens.size()) + k_count * model.alpha;
  for (int k = 0; k < k_count; ++k) dist.theta[k] = (n_k[k] + model.alpha) / denom;
  return dist;
}

/// The n most probable words of a topic, descending; ties go to the
/// lexicographically smaller lemma.
inline std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, int topic, std::size_t n) {
  if (topic < 0 || topic >= model.num_topics)
    throw UsageError("topic " + std::to_string(topic) + " out of range [0, " +
                     std::to_string(model.num_topics) + ")");
  if (n < 1 || n > model.vocab_size()) throw UsageError("top_words: n must lie in [1, V]");
  auto row = model.topic(topic);
  std::vector<int> ids(row.size());
  std::iota(ids.begin(), ids.end(), 0);
  // Vocabulary ids are in lexicographic order, so the id breaks ties.
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(), [&](int a, int b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(model.vocab.term(ids[i]), row[ids[i]]);
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

/// Serializes a model with every real number at 17 significant digits.
inline std::string model_to_json(const TopicModel& m) {
  std::string out;
  out.reserve(m.phi.size() * 24 + m.vocab_size() * 12 + 256);
  out += "{\"format_version\":" + std::to_string(TopicModel::kFormatVersion);
  out += ",\"lang\":" + detail::json_string(m.lang);
  out += ",\"K\":" + std::to_string(m.num_topics);
  out += ",\"alpha\":" + detail::format_double(m.alpha);
  out += ",\"beta\":" + detail::format_double(m.beta);
  out += ",\"seed\":" + std::to_string(m.seed);
  out += ",\"sweeps\":" + std::to_string(m.sweeps);
  out += ",\"rng\":" + detail::json_string(Rng::kAlgorithm);
  out += ",\"vocab\":[";
  for (std::size_t i = 0; i < m.vocab_size(); ++i) {
    if (i) out += ',';
    out += detail::json_string(m.vocab.term(static_cast<int>(i)));
  }
  out += "],\"phi\":[";
  for (int k = 0; k < m.num_topics; ++k) {
    if (k) out += ",\n";
    out += '[';
    auto row = m.topic(k);
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (w) out += ',';
      out += detail::format_double(row[w]);
    }
    out += ']';
  }
  out += ']';
  if (m.category_of) {
    out += ",\"category_of\":[";
    for (std::size_t i = 0; i < m.category_of->size(); ++i) {
      if (i) out += ',';
      out += detail::json_string((*m.category_of)[i]);
    }
    out += ']';
  }
  out += "}\n";
  return out;
}

inline TopicModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != TopicModel::kFormatVersion)
      throw DataError("unsupported model format_version");
    TopicModel m;
    m.lang = j.at("lang").get<std::string>();
    m.num_topics = j.at("K").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.sweeps = j.value("sweeps", 0);
    m.vocab = Vocabulary(j.at("vocab").get<std::vector<std::string>>());
    const auto& phi = j.at("phi");
    if (static_cast<int>(phi.size()) != m.num_topics) throw DataError("phi must have K rows");
    m.phi.reserve(static_cast<std::size_t>(m.num_topics) * m.vocab_size());
    for (const auto& row : phi) {
      if (row.size() != m.vocab_size()) throw DataError("phi row length differs from vocabulary size");
      for (const auto& x : row) m.phi.push_back(x.get<double>());
    }
    if (j.contains("category_of")) {
      auto cats = j["category_of"].get<std::vector<std::string>>();
      if (static_cast<int>(cats.size()) != m.num_topics) throw DataError("category_of must have K entries");
      m.category_of = std::move(cats);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file schema violation: ") + e.what());
  }
}

/// Stable identity of a model, derived from its serialized form.
inline std::string model_identity(const TopicModel& m) { return hex64(fnv1a64(model_to_json(m))); }

}  // namespace synhash
