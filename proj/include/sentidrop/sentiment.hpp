#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentidrop/core_data.hpp"
#include "sentidrop/timeutil.hpp"

namespace sentidrop::senti {

enum class Polarity { negative, neutral, positive };

std::string to_string(Polarity p);
Polarity polarity_from_string(const std::string& s);

struct ClassThresholds {
  // score >= positive -> positive; score <= negative -> negative; else neutral.
  double positive = 0.2;
  double negative = -0.2;

  Polarity classify(double score) const {
    if (score >= positive) return Polarity::positive;
    if (score <= negative) return Polarity::negative;
    return Polarity::neutral;
  }
};

struct SentimentScore {
  std::string student_id;
  int64_t timestamp = 0;
  double score = 0.0;  // in [-1, 1]
  Polarity polarity = Polarity::neutral;
};

struct MonthlySentiment {
  std::string student_id;
  timeutil::YearMonth month;
  double mean_score = 0.0;
  size_t comment_count = 0;
};

struct TTestResult {
  double t_statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value_two_sided = 1.0;
  double mean_difference = 0.0;
  double sample_stddev = 0.0;  // n-1 denominator
  double mu0 = 0.0;

  nlohmann::json to_json() const;
};

struct ScorerConfig {
  bool lowercase = true;
  std::vector<std::string> stopwords;  // removed before n-gram extraction
  std::vector<int> ngram_orders = {1, 2};
  size_t min_token_count = 1;  // vocabulary pruning
  double l2_lambda = 1e-3;
  double learning_rate = 0.5;
  int max_epochs = 200;
  ClassThresholds thresholds;
  uint64_t seed = 0;
};

// Linear bag-of-n-grams classifier over {negative, neutral, positive}.
// Stands in for any external sentiment model behind the same contract;
// scoring a frozen scorer is a pure function of the text.
struct SentimentScorer {
  std::map<std::string, size_t> vocabulary;  // n-gram -> index
  std::vector<std::vector<double>> weights;  // [3][vocab size]
  std::vector<double> bias;                  // [3]
  ScorerConfig config;
  double held_out_accuracy = 0.0;  // internal 80/20 split, for reporting

  nlohmann::json to_json() const;
  static SentimentScorer from_json(const nlohmann::json& j);
};

SentimentScorer train_scorer(const core::CommentSet& labeled, const ScorerConfig& config);

SentimentScore score(const SentimentScorer& scorer, const core::Comment& c);
std::vector<SentimentScore> score_all(const SentimentScorer& scorer, const core::CommentSet& cs);

// Class probabilities -> polarity score. Exposed because the score contract
// (p_pos - p_neg) is independent of the scorer internals.
double score_from_probs(double p_positive, double p_negative);

std::vector<MonthlySentiment> aggregate_monthly(const std::vector<SentimentScore>& scores);

TTestResult paired_ttest(const std::vector<double>& differences, double mu0);

// Per-student feature block derived from scored comments.
struct SentimentFeatureTable {
  std::vector<std::string> columns;
  std::map<std::string, std::vector<double>> rows;  // student_id -> values

  std::vector<double> neutral_row() const;  // all-zero scores, has_comments = 0
  size_t column_index(const std::string& name) const;
};

struct SentimentFeatureOptions {
  bool add_first_last_diff = false;
};

SentimentFeatureTable sentiment_features(const std::vector<SentimentScore>& scores,
                                         timeutil::YearMonth term_start_month,
                                         const SentimentFeatureOptions& opts = {});
// Convenience overload matching the pipeline flow (score, then derive).
SentimentFeatureTable sentiment_features(const core::CommentSet& cs, const SentimentScorer& scorer,
                                         timeutil::YearMonth term_start_month,
                                         const SentimentFeatureOptions& opts = {});

struct TemporalReport {
  // Dropout rate and group size for students whose first-term-month mean
  // sentiment classifies negative, students negative only later, and
  // students never negative.
  double early_negative_rate = 0.0;
  size_t early_negative_count = 0;
  double late_negative_rate = 0.0;
  size_t late_negative_count = 0;
  double never_negative_rate = 0.0;
  size_t never_negative_count = 0;

  nlohmann::json to_json() const;
};

TemporalReport temporal_risk(const SentimentFeatureTable& features,
                             const std::map<std::string, int>& labels,
                             const ClassThresholds& thresholds);

// External model scores: JSONL {"student_id", "timestamp", "score"}.
std::vector<SentimentScore> load_external_scores(const std::string& path,
                                                 const ClassThresholds& thresholds);
void save_scores(const std::vector<SentimentScore>& scores, const std::string& path);

// Per-student (first observed month mean - last observed month mean), for
// students with comments in at least two distinct months. Feeds the paired
// t-test with mu0 = 0 in the CLI pipeline.
std::vector<double> first_last_month_differences(const std::vector<SentimentScore>& scores);

}  // namespace sentidrop::senti
