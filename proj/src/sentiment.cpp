#include "sentidrop/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sentidrop/error.hpp"
#include "sentidrop/rng.hpp"
#include "sentidrop/stats.hpp"

namespace sentidrop::senti {

namespace {
constexpr const char* kModule = "sentiment";
constexpr size_t kNumClasses = 3;  // negative, neutral, positive

using SparseDoc = std::vector<std::pair<size_t, double>>;  // (vocab index, count)

std::vector<std::string> tokenize(const std::string& text, const ScorerConfig& cfg,
                                  const std::unordered_set<std::string>& stopwords) {
  std::string normalized;
  normalized.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      normalized.push_back(cfg.lowercase ? static_cast<char>(std::tolower(c))
                                         : static_cast<char>(c));
    } else if (c == '\'') {
      continue;  // don't -> dont
    } else {
      normalized.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  std::istringstream in(normalized);
  std::string tok;
  while (in >> tok) {
    if (!stopwords.count(tok)) tokens.push_back(tok);
  }
  return tokens;
}

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        const std::vector<int>& orders) {
  std::vector<std::string> grams;
  for (int order : orders) {
    if (order < 1 || tokens.size() < static_cast<size_t>(order)) continue;
    for (size_t i = 0; i + static_cast<size_t>(order) <= tokens.size(); ++i) {
      std::string g = tokens[i];
      for (int k = 1; k < order; ++k) {
        g += '_';
        g += tokens[i + static_cast<size_t>(k)];
      }
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

size_t class_index(Polarity p) { return static_cast<size_t>(p); }

Polarity class_from_index(size_t i) { return static_cast<Polarity>(i); }

std::array<double, 3> softmax3(const std::array<double, 3>& logits) {
  double mx = std::max({logits[0], logits[1], logits[2]});
  std::array<double, 3> p;
  double sum = 0.0;
  for (size_t c = 0; c < 3; ++c) {
    p[c] = std::exp(logits[c] - mx);
    sum += p[c];
  }
  for (size_t c = 0; c < 3; ++c) p[c] /= sum;
  return p;
}

struct Corpus {
  std::map<std::string, size_t> vocabulary;
  std::vector<SparseDoc> docs;
  std::vector<size_t> labels;
};

Corpus build_corpus(const std::vector<const core::Comment*>& labeled, const ScorerConfig& cfg) {
  std::unordered_set<std::string> stop(cfg.stopwords.begin(), cfg.stopwords.end());

  // Token counting in a std::map keeps vocabulary indices deterministic.
  std::map<std::string, size_t> counts;
  std::vector<std::vector<std::string>> doc_grams;
  doc_grams.reserve(labeled.size());
  for (const auto* c : labeled) {
    auto grams = extract_ngrams(tokenize(c->text, cfg, stop), cfg.ngram_orders);
    for (const auto& g : grams) ++counts[g];
    doc_grams.push_back(std::move(grams));
  }

  Corpus corpus;
  for (const auto& [gram, cnt] : counts) {
    if (cnt >= cfg.min_token_count) {
      corpus.vocabulary.emplace(gram, corpus.vocabulary.size());
    }
  }
  for (size_t d = 0; d < labeled.size(); ++d) {
    std::map<size_t, double> sparse;
    for (const auto& g : doc_grams[d]) {
      auto it = corpus.vocabulary.find(g);
      if (it != corpus.vocabulary.end()) sparse[it->second] += 1.0;
    }
    corpus.docs.emplace_back(sparse.begin(), sparse.end());
    corpus.labels.push_back(class_index(polarity_from_string(*labeled[d]->gold_label)));
  }
  return corpus;
}

struct FitResult {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
};

// Full-batch gradient descent on L2-regularized multinomial cross-entropy.
FitResult fit_multinomial(const std::vector<SparseDoc>& docs, const std::vector<size_t>& labels,
                          const std::vector<size_t>& train_idx, size_t vocab_size,
                          const ScorerConfig& cfg) {
  FitResult fit;
  fit.weights.assign(kNumClasses, std::vector<double>(vocab_size, 0.0));
  fit.bias.assign(kNumClasses, 0.0);
  if (train_idx.empty()) return fit;

  double n = static_cast<double>(train_idx.size());
  std::vector<std::vector<double>> grad_w(kNumClasses, std::vector<double>(vocab_size, 0.0));
  std::vector<double> grad_b(kNumClasses, 0.0);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);

    for (size_t idx : train_idx) {
      const SparseDoc& doc = docs[idx];
      std::array<double, 3> logits = {fit.bias[0], fit.bias[1], fit.bias[2]};
      for (const auto& [j, cnt] : doc) {
        for (size_t c = 0; c < kNumClasses; ++c) logits[c] += fit.weights[c][j] * cnt;
      }
      auto p = softmax3(logits);
      for (size_t c = 0; c < kNumClasses; ++c) {
        double r = (p[c] - (labels[idx] == c ? 1.0 : 0.0)) / n;
        grad_b[c] += r;
        for (const auto& [j, cnt] : doc) grad_w[c][j] += r * cnt;
      }
    }
    for (size_t c = 0; c < kNumClasses; ++c) {
      fit.bias[c] -= cfg.learning_rate * grad_b[c];
      for (size_t j = 0; j < vocab_size; ++j) {
        fit.weights[c][j] -=
            cfg.learning_rate * (grad_w[c][j] + cfg.l2_lambda * fit.weights[c][j]);
      }
    }
  }
  return fit;
}

size_t predict_class(const FitResult& fit, const SparseDoc& doc) {
  std::array<double, 3> logits = {fit.bias[0], fit.bias[1], fit.bias[2]};
  for (const auto& [j, cnt] : doc) {
    for (size_t c = 0; c < kNumClasses; ++c) logits[c] += fit.weights[c][j] * cnt;
  }
  size_t best = 0;
  for (size_t c = 1; c < kNumClasses; ++c) {
    if (logits[c] > logits[best]) best = c;
  }
  return best;
}

}  // namespace

std::string to_string(Polarity p) {
  switch (p) {
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::positive: return "positive";
  }
  return "neutral";
}

Polarity polarity_from_string(const std::string& s) {
  if (s == "negative") return Polarity::negative;
  if (s == "neutral") return Polarity::neutral;
  if (s == "positive") return Polarity::positive;
  throw Error("BadGoldLabel", kModule, "unknown polarity '" + s + "'");
}

nlohmann::json TTestResult::to_json() const {
  return {{"t_statistic", t_statistic},
          {"degrees_of_freedom", degrees_of_freedom},
          {"p_value_two_sided", p_value_two_sided},
          {"mean_difference", mean_difference},
          {"sample_stddev", sample_stddev},
          {"mu0", mu0}};
}

nlohmann::json SentimentScorer::to_json() const {
  nlohmann::json vocab = nlohmann::json::object();
  for (const auto& [gram, idx] : vocabulary) vocab[gram] = idx;
  return {{"format_version", 1},
          {"vocabulary", vocab},
          {"weights", weights},
          {"bias", bias},
          {"held_out_accuracy", held_out_accuracy},
          {"config",
           {{"lowercase", config.lowercase},
            {"stopwords", config.stopwords},
            {"ngram_orders", config.ngram_orders},
            {"min_token_count", config.min_token_count},
            {"l2_lambda", config.l2_lambda},
            {"learning_rate", config.learning_rate},
            {"max_epochs", config.max_epochs},
            {"positive_threshold", config.thresholds.positive},
            {"negative_threshold", config.thresholds.negative},
            {"seed", config.seed}}}};
}

SentimentScorer SentimentScorer::from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1) {
    throw Error("UnknownModelVersion", kModule, "unsupported scorer format version");
  }
  SentimentScorer s;
  for (const auto& [gram, idx] : j.at("vocabulary").items()) {
    s.vocabulary[gram] = idx.get<size_t>();
  }
  s.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  s.bias = j.at("bias").get<std::vector<double>>();
  s.held_out_accuracy = j.at("held_out_accuracy").get<double>();
  const auto& c = j.at("config");
  s.config.lowercase = c.at("lowercase").get<bool>();
  s.config.stopwords = c.at("stopwords").get<std::vector<std::string>>();
  s.config.ngram_orders = c.at("ngram_orders").get<std::vector<int>>();
  s.config.min_token_count = c.at("min_token_count").get<size_t>();
  s.config.l2_lambda = c.at("l2_lambda").get<double>();
  s.config.learning_rate = c.at("learning_rate").get<double>();
  s.config.max_epochs = c.at("max_epochs").get<int>();
  s.config.thresholds.positive = c.at("positive_threshold").get<double>();
  s.config.thresholds.negative = c.at("negative_threshold").get<double>();
  s.config.seed = c.at("seed").get<uint64_t>();
  return s;
}

SentimentScorer train_scorer(const core::CommentSet& labeled, const ScorerConfig& config) {
  std::vector<const core::Comment*> docs;
  for (const auto& c : labeled.comments) {
    if (c.gold_label) docs.push_back(&c);
  }

  std::array<size_t, 3> class_counts = {0, 0, 0};
  for (const auto* c : docs) ++class_counts[class_index(polarity_from_string(*c->gold_label))];
  for (size_t c = 0; c < kNumClasses; ++c) {
    if (class_counts[c] == 0) {
      throw Error("MissingClass", kModule,
                  "no training examples for class '" + to_string(class_from_index(c)) + "'");
    }
  }

  Corpus corpus = build_corpus(docs, config);

  // Stratified 80/20 split for the reported held-out accuracy.
  Rng rng(config.seed);
  std::vector<size_t> train_idx, holdout_idx;
  for (size_t c = 0; c < kNumClasses; ++c) {
    std::vector<size_t> members;
    for (size_t d = 0; d < corpus.labels.size(); ++d) {
      if (corpus.labels[d] == c) members.push_back(d);
    }
    Rng class_rng = rng.child(c);
    class_rng.shuffle(members);
    size_t n_train = (members.size() * 4 + 4) / 5;  // ceil(0.8k), keeps >= 1 in train
    for (size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? train_idx : holdout_idx).push_back(members[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(holdout_idx.begin(), holdout_idx.end());

  FitResult split_fit =
      fit_multinomial(corpus.docs, corpus.labels, train_idx, corpus.vocabulary.size(), config);
  double held_out_accuracy;
  {
    const std::vector<size_t>& eval_idx = holdout_idx.empty() ? train_idx : holdout_idx;
    size_t correct = 0;
    for (size_t idx : eval_idx) {
      if (predict_class(split_fit, corpus.docs[idx]) == corpus.labels[idx]) ++correct;
    }
    held_out_accuracy = static_cast<double>(correct) / static_cast<double>(eval_idx.size());
  }

  // Final model refit on the full labeled set.
  std::vector<size_t> all_idx(corpus.docs.size());
  for (size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = i;
  FitResult fit =
      fit_multinomial(corpus.docs, corpus.labels, all_idx, corpus.vocabulary.size(), config);

  SentimentScorer scorer;
  scorer.vocabulary = std::move(corpus.vocabulary);
  scorer.weights = std::move(fit.weights);
  scorer.bias = std::move(fit.bias);
  scorer.config = config;
  scorer.held_out_accuracy = held_out_accuracy;
  return scorer;
}

double score_from_probs(double p_positive, double p_negative) {
  return p_positive - p_negative;
}

SentimentScore score(const SentimentScorer& scorer, const core::Comment& c) {
  SentimentScore out;
  out.student_id = c.student_id;
  out.timestamp = c.timestamp;

  std::unordered_set<std::string> stop(scorer.config.stopwords.begin(),
                                       scorer.config.stopwords.end());
  auto tokens = tokenize(c.text, scorer.config, stop);
  if (tokens.empty()) {
    out.score = 0.0;
    out.polarity = Polarity::neutral;
    return out;
  }
  auto grams = extract_ngrams(tokens, scorer.config.ngram_orders);

  std::array<double, 3> logits = {scorer.bias[0], scorer.bias[1], scorer.bias[2]};
  std::map<size_t, double> counts;
  for (const auto& g : grams) {
    auto it = scorer.vocabulary.find(g);
    if (it != scorer.vocabulary.end()) counts[it->second] += 1.0;
  }
  for (const auto& [j, cnt] : counts) {
    for (size_t cls = 0; cls < kNumClasses; ++cls) logits[cls] += scorer.weights[cls][j] * cnt;
  }
  auto p = softmax3(logits);
  out.score = score_from_probs(p[class_index(Polarity::positive)],
                               p[class_index(Polarity::negative)]);
  out.polarity = scorer.config.thresholds.classify(out.score);
  return out;
}

std::vector<SentimentScore> score_all(const SentimentScorer& scorer, const core::CommentSet& cs) {
  std::vector<SentimentScore> out;
  out.reserve(cs.size());
  for (const auto& c : cs.comments) out.push_back(score(scorer, c));
  return out;
}

std::vector<MonthlySentiment> aggregate_monthly(const std::vector<SentimentScore>& scores) {
  std::map<std::pair<std::string, timeutil::YearMonth>, std::pair<double, size_t>> groups;
  for (const auto& s : scores) {
    auto& g = groups[{s.student_id, timeutil::year_month_utc(s.timestamp)}];
    g.first += s.score;
    g.second += 1;
  }
  std::vector<MonthlySentiment> out;
  out.reserve(groups.size());
  for (const auto& [key, agg] : groups) {
    out.push_back({key.first, key.second, agg.first / static_cast<double>(agg.second), agg.second});
  }
  return out;
}

TTestResult paired_ttest(const std::vector<double>& differences, double mu0) {
  size_t n = differences.size();
  if (n < 2) {
    throw Error("DegenerateSample", kModule,
                "paired t-test needs n >= 2, got " + std::to_string(n));
  }
  double mean = 0.0;
  for (double d : differences) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : differences) ss += (d - mean) * (d - mean);
  double s = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.degrees_of_freedom = static_cast<int>(n) - 1;
  r.mean_difference = mean;
  r.sample_stddev = s;
  r.mu0 = mu0;
  if (s == 0.0) {
    if (mean != mu0) {
      throw Error("ZeroVariance", kModule,
                  "all differences identical but mean differs from mu0; t is undefined");
    }
    r.t_statistic = 0.0;
    r.p_value_two_sided = 1.0;
    return r;
  }
  r.t_statistic = (mean - mu0) / (s / std::sqrt(static_cast<double>(n)));
  r.p_value_two_sided =
      stats::student_t_two_sided_p(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
  return r;
}

std::vector<double> SentimentFeatureTable::neutral_row() const {
  return std::vector<double>(columns.size(), 0.0);
}

size_t SentimentFeatureTable::column_index(const std::string& name) const {
  for (size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  throw Error("SchemaMismatch", kModule, "no sentiment column named '" + name + "'");
}

SentimentFeatureTable sentiment_features(const std::vector<SentimentScore>& scores,
                                         timeutil::YearMonth term_start_month,
                                         const SentimentFeatureOptions& opts) {
  SentimentFeatureTable table;
  table.columns = {"sa_mean_score",      "sa_first_month_score", "sa_last_month_score",
                   "sa_comment_count",   "sa_negative_fraction", "sa_has_comments"};
  if (opts.add_first_last_diff) table.columns.push_back("sa_first_last_diff");

  struct Acc {
    double sum = 0.0;
    size_t count = 0;
    size_t negatives = 0;
    std::map<timeutil::YearMonth, std::pair<double, size_t>> months;
  };
  std::map<std::string, Acc> by_student;
  for (const auto& s : scores) {
    auto& acc = by_student[s.student_id];
    acc.sum += s.score;
    acc.count += 1;
    if (s.polarity == Polarity::negative) ++acc.negatives;
    auto& mo = acc.months[timeutil::year_month_utc(s.timestamp)];
    mo.first += s.score;
    mo.second += 1;
  }

  for (const auto& [id, acc] : by_student) {
    double count = static_cast<double>(acc.count);
    double mean = acc.sum / count;
    double first_month = 0.0;
    auto it0 = acc.months.find(term_start_month);
    if (it0 != acc.months.end()) {
      first_month = it0->second.first / static_cast<double>(it0->second.second);
    }
    const auto& last = *acc.months.rbegin();
    double last_month = last.second.first / static_cast<double>(last.second.second);

    std::vector<double> row = {mean,
                               first_month,
                               last_month,
                               count,
                               static_cast<double>(acc.negatives) / count,
                               1.0};
    if (opts.add_first_last_diff) {
      const auto& first_observed = *acc.months.begin();
      double first_observed_mean =
          first_observed.second.first / static_cast<double>(first_observed.second.second);
      row.push_back(acc.months.size() >= 2 ? first_observed_mean - last_month : 0.0);
    }
    table.rows.emplace(id, std::move(row));
  }
  return table;
}

SentimentFeatureTable sentiment_features(const core::CommentSet& cs, const SentimentScorer& scorer,
                                         timeutil::YearMonth term_start_month,
                                         const SentimentFeatureOptions& opts) {
  return sentiment_features(score_all(scorer, cs), term_start_month, opts);
}

TemporalReport temporal_risk(const SentimentFeatureTable& features,
                             const std::map<std::string, int>& labels,
                             const ClassThresholds& thresholds) {
  size_t first_idx = features.column_index("sa_first_month_score");
  size_t negfrac_idx = features.column_index("sa_negative_fraction");
  size_t has_idx = features.column_index("sa_has_comments");

  TemporalReport rep;
  size_t early_drop = 0, late_drop = 0, never_drop = 0;
  for (const auto& [id, label] : labels) {
    auto it = features.rows.find(id);
    bool early = false, late = false;
    if (it != features.rows.end() && it->second[has_idx] > 0.0) {
      early = thresholds.classify(it->second[first_idx]) == Polarity::negative;
      late = !early && it->second[negfrac_idx] > 0.0;
    }
    if (early) {
      ++rep.early_negative_count;
      early_drop += static_cast<size_t>(label);
    } else if (late) {
      ++rep.late_negative_count;
      late_drop += static_cast<size_t>(label);
    } else {
      ++rep.never_negative_count;
      never_drop += static_cast<size_t>(label);
    }
  }
  auto rate = [](size_t drops, size_t count) {
    return count == 0 ? 0.0 : static_cast<double>(drops) / static_cast<double>(count);
  };
  rep.early_negative_rate = rate(early_drop, rep.early_negative_count);
  rep.late_negative_rate = rate(late_drop, rep.late_negative_count);
  rep.never_negative_rate = rate(never_drop, rep.never_negative_count);
  return rep;
}

nlohmann::json TemporalReport::to_json() const {
  return {{"early_negative", {{"dropout_rate", early_negative_rate}, {"count", early_negative_count}}},
          {"late_negative", {{"dropout_rate", late_negative_rate}, {"count", late_negative_count}}},
          {"never_negative", {{"dropout_rate", never_negative_rate}, {"count", never_negative_count}}}};
}

std::vector<SentimentScore> load_external_scores(const std::string& path,
                                                 const ClassThresholds& thresholds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("IoError", kModule, "cannot open file: " + path);
  }
  std::vector<SentimentScore> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw Error("MalformedJson", kModule, "line " + std::to_string(line_no) + ": invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("student_id") || !obj.contains("timestamp") ||
        !obj.contains("score") || !obj["student_id"].is_string() ||
        !obj["timestamp"].is_string() || !obj["score"].is_number()) {
      throw Error("MalformedJson", kModule,
                  "line " + std::to_string(line_no) +
                      ": expected {student_id, timestamp, score}");
    }
    SentimentScore s;
    s.student_id = obj["student_id"].get<std::string>();
    if (!timeutil::try_parse_iso8601(obj["timestamp"].get<std::string>(), s.timestamp)) {
      throw Error("BadTimestamp", kModule,
                  "line " + std::to_string(line_no) + ": bad timestamp");
    }
    s.score = obj["score"].get<double>();
    if (s.score < -1.0 || s.score > 1.0) {
      throw Error("OutOfRange", kModule,
                  "line " + std::to_string(line_no) + ": score outside [-1, 1]");
    }
    s.polarity = thresholds.classify(s.score);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const SentimentScore& a, const SentimentScore& b) {
    if (a.student_id != b.student_id) return a.student_id < b.student_id;
    return a.timestamp < b.timestamp;
  });
  return out;
}

void save_scores(const std::vector<SentimentScore>& scores, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("IoError", kModule, "cannot write file: " + path);
  }
  for (const auto& s : scores) {
    nlohmann::json obj;
    obj["student_id"] = s.student_id;
    obj["timestamp"] = timeutil::format_iso8601(s.timestamp);
    obj["score"] = s.score;
    out << obj.dump() << '\n';
  }
}

std::vector<double> first_last_month_differences(const std::vector<SentimentScore>& scores) {
  std::map<std::string, std::map<timeutil::YearMonth, std::pair<double, size_t>>> by_student;
  for (const auto& s : scores) {
    auto& mo = by_student[s.student_id][timeutil::year_month_utc(s.timestamp)];
    mo.first += s.score;
    mo.second += 1;
  }
  std::vector<double> diffs;
  for (const auto& [id, months] : by_student) {
    if (months.size() < 2) continue;
    const auto& first = *months.begin();
    const auto& last = *months.rbegin();
    diffs.push_back(first.second.first / static_cast<double>(first.second.second) -
                    last.second.first / static_cast<double>(last.second.second));
  }
  return diffs;
}

}  // namespace sentidrop::senti
