#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentidrop/core_data.hpp"
#include "sentidrop/matrix.hpp"

namespace sentidrop::prep {

// All statistics here use the population (divide-by-n) standard deviation,
// so flag_outliers and the zscore scaler share one convention.

struct ImputationLog {
  struct Entry {
    std::string feature;
    size_t fill_count = 0;
    double fill_value = 0.0;
  };
  std::vector<Entry> entries;  // one per feature, in column order

  nlohmann::json to_json() const;
  static ImputationLog from_json(const nlohmann::json& j);
};

enum class ScaleMethod { zscore, minmax, none };

std::string to_string(ScaleMethod m);
ScaleMethod scale_method_from_string(const std::string& s);

struct ScalerParams {
  struct Feature {
    double mean = 0.0;
    double stddev = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
    bool constant = false;  // passed through unscaled
  };
  ScaleMethod method = ScaleMethod::none;
  std::vector<std::string> feature_names;
  std::vector<Feature> per_feature;

  nlohmann::json to_json() const;
  static ScalerParams from_json(const nlohmann::json& j);
};

// Replaces each masked cell by the per-feature mean over observed cells.
std::pair<core::FeatureMatrix, ImputationLog> impute_mean(const core::FeatureMatrix& fm);

// Re-applies a fitted log to new data (fills masked cells with the stored
// per-feature value; counts in the returned log reflect the new data).
std::pair<core::FeatureMatrix, ImputationLog> apply_imputation(const core::FeatureMatrix& fm,
                                                               const ImputationLog& log);

// Cell flagged iff |value - column mean| / column stddev > threshold.
// Constant columns flag nothing. Requires a fully imputed matrix.
std::vector<uint8_t> flag_outliers(const core::FeatureMatrix& fm, double threshold);

std::pair<core::FeatureMatrix, ScalerParams> normalize(const core::FeatureMatrix& fm,
                                                       ScaleMethod method);
core::FeatureMatrix apply_scaler(const core::FeatureMatrix& fm, const ScalerParams& params);
core::FeatureMatrix invert_scaler(const core::FeatureMatrix& fm, const ScalerParams& params);

// Pearson correlation. Constant columns correlate 0 with everything by
// convention; the diagonal is exactly 1. When `label` is given it is
// appended as the last row/column.
Matrix correlation_matrix(const core::FeatureMatrix& fm,
                          const std::vector<double>* label = nullptr);

}  // namespace sentidrop::prep
