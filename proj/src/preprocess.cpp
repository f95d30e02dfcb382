#include "sentidrop/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "sentidrop/error.hpp"

namespace sentidrop::prep {

namespace {
constexpr const char* kModule = "preprocess";

struct ColumnStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

ColumnStats column_stats(const core::FeatureMatrix& fm, size_t j) {
  ColumnStats s;
  size_t n = fm.n();
  double sum = 0.0;
  s.min = fm.values.at(0, j);
  s.max = s.min;
  for (size_t i = 0; i < n; ++i) {
    double v = fm.values.at(i, j);
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = fm.values.at(i, j) - s.mean;
    ss += d * d;
  }
  s.stddev = std::sqrt(ss / static_cast<double>(n));
  return s;
}

void require_imputed(const core::FeatureMatrix& fm, const char* op) {
  if (fm.any_missing()) {
    throw Error("NotImputed", kModule, std::string(op) + " requires a fully imputed matrix");
  }
}
}  // namespace

nlohmann::json ImputationLog::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"feature", e.feature}, {"fill_count", e.fill_count}, {"fill_value", e.fill_value}});
  }
  return nlohmann::json{{"entries", arr}};
}

ImputationLog ImputationLog::from_json(const nlohmann::json& j) {
  ImputationLog log;
  for (const auto& e : j.at("entries")) {
    log.entries.push_back({e.at("feature").get<std::string>(), e.at("fill_count").get<size_t>(),
                           e.at("fill_value").get<double>()});
  }
  return log;
}

std::string to_string(ScaleMethod m) {
  switch (m) {
    case ScaleMethod::zscore: return "zscore";
    case ScaleMethod::minmax: return "minmax";
    case ScaleMethod::none: return "none";
  }
  return "none";
}

ScaleMethod scale_method_from_string(const std::string& s) {
  if (s == "zscore") return ScaleMethod::zscore;
  if (s == "minmax") return ScaleMethod::minmax;
  if (s == "none") return ScaleMethod::none;
  throw Error("ConfigError", kModule, "unknown normalization method '" + s + "'");
}

nlohmann::json ScalerParams::to_json() const {
  nlohmann::json feats = nlohmann::json::array();
  for (size_t j = 0; j < per_feature.size(); ++j) {
    const auto& f = per_feature[j];
    feats.push_back({{"name", feature_names[j]},
                     {"mean", f.mean},
                     {"stddev", f.stddev},
                     {"min", f.min},
                     {"max", f.max},
                     {"constant", f.constant}});
  }
  return nlohmann::json{{"method", to_string(method)}, {"features", feats}};
}

ScalerParams ScalerParams::from_json(const nlohmann::json& j) {
  ScalerParams p;
  p.method = scale_method_from_string(j.at("method").get<std::string>());
  for (const auto& f : j.at("features")) {
    p.feature_names.push_back(f.at("name").get<std::string>());
    p.per_feature.push_back({f.at("mean").get<double>(), f.at("stddev").get<double>(),
                             f.at("min").get<double>(), f.at("max").get<double>(),
                             f.at("constant").get<bool>()});
  }
  return p;
}

std::pair<core::FeatureMatrix, ImputationLog> impute_mean(const core::FeatureMatrix& fm) {
  ImputationLog log;
  core::FeatureMatrix out = fm;
  size_t n = fm.n(), m = fm.m();
  for (size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    size_t observed = 0;
    for (size_t i = 0; i < n; ++i) {
      if (!fm.missing(i, j)) {
        sum += fm.values.at(i, j);
        ++observed;
      }
    }
    if (observed == 0) {
      throw Error("AllMissingFeature", kModule,
                  "feature '" + fm.column_names[j] + "' has no observed values");
    }
    double mean = sum / static_cast<double>(observed);
    size_t filled = 0;
    for (size_t i = 0; i < n; ++i) {
      if (fm.missing(i, j)) {
        out.values.at(i, j) = mean;
        out.missing_mask[i * m + j] = 0;
        ++filled;
      }
    }
    log.entries.push_back({fm.column_names[j], filled, mean});
  }
  return {std::move(out), std::move(log)};
}

std::pair<core::FeatureMatrix, ImputationLog> apply_imputation(const core::FeatureMatrix& fm,
                                                               const ImputationLog& log) {
  if (log.entries.size() != fm.m()) {
    throw Error("SchemaMismatch", kModule, "imputation log does not match matrix columns");
  }
  core::FeatureMatrix out = fm;
  ImputationLog applied;
  size_t n = fm.n(), m = fm.m();
  for (size_t j = 0; j < m; ++j) {
    if (log.entries[j].feature != fm.column_names[j]) {
      throw Error("SchemaMismatch", kModule,
                  "imputation log column '" + log.entries[j].feature + "' does not match '" +
                      fm.column_names[j] + "'");
    }
    size_t filled = 0;
    for (size_t i = 0; i < n; ++i) {
      if (fm.missing(i, j)) {
        out.values.at(i, j) = log.entries[j].fill_value;
        out.missing_mask[i * m + j] = 0;
        ++filled;
      }
    }
    applied.entries.push_back({fm.column_names[j], filled, log.entries[j].fill_value});
  }
  return {std::move(out), std::move(applied)};
}

std::vector<uint8_t> flag_outliers(const core::FeatureMatrix& fm, double threshold) {
  if (!(threshold > 0.0)) {
    throw Error("InvalidThreshold", kModule, "outlier threshold must be > 0");
  }
  require_imputed(fm, "flag_outliers");
  size_t n = fm.n(), m = fm.m();
  std::vector<uint8_t> flags(n * m, 0);
  for (size_t j = 0; j < m; ++j) {
    ColumnStats s = column_stats(fm, j);
    if (s.stddev == 0.0) continue;
    for (size_t i = 0; i < n; ++i) {
      double z = std::abs(fm.values.at(i, j) - s.mean) / s.stddev;
      if (z > threshold) flags[i * m + j] = 1;
    }
  }
  return flags;
}

std::pair<core::FeatureMatrix, ScalerParams> normalize(const core::FeatureMatrix& fm,
                                                       ScaleMethod method) {
  require_imputed(fm, "normalize");
  ScalerParams params;
  params.method = method;
  params.feature_names = fm.column_names;
  params.per_feature.resize(fm.m());
  for (size_t j = 0; j < fm.m(); ++j) {
    ColumnStats s = column_stats(fm, j);
    auto& f = params.per_feature[j];
    f.mean = s.mean;
    f.stddev = s.stddev;
    f.min = s.min;
    f.max = s.max;
    f.constant = s.stddev == 0.0;
  }
  // Compute the output through apply_scaler so re-applying stored params to
  // the training matrix reproduces it bit for bit.
  return {apply_scaler(fm, params), std::move(params)};
}

core::FeatureMatrix apply_scaler(const core::FeatureMatrix& fm, const ScalerParams& params) {
  if (params.feature_names != fm.column_names) {
    throw Error("SchemaMismatch", kModule, "scaler params do not match matrix columns");
  }
  core::FeatureMatrix out = fm;
  if (params.method == ScaleMethod::none) return out;
  for (size_t j = 0; j < fm.m(); ++j) {
    const auto& f = params.per_feature[j];
    if (f.constant) continue;
    for (size_t i = 0; i < fm.n(); ++i) {
      double v = fm.values.at(i, j);
      out.values.at(i, j) = params.method == ScaleMethod::zscore
                                ? (v - f.mean) / f.stddev
                                : (v - f.min) / (f.max - f.min);
    }
  }
  return out;
}

core::FeatureMatrix invert_scaler(const core::FeatureMatrix& fm, const ScalerParams& params) {
  if (params.feature_names != fm.column_names) {
    throw Error("SchemaMismatch", kModule, "scaler params do not match matrix columns");
  }
  core::FeatureMatrix out = fm;
  if (params.method == ScaleMethod::none) return out;
  for (size_t j = 0; j < fm.m(); ++j) {
    const auto& f = params.per_feature[j];
    if (f.constant) continue;
    for (size_t i = 0; i < fm.n(); ++i) {
      double v = fm.values.at(i, j);
      out.values.at(i, j) = params.method == ScaleMethod::zscore
                                ? v * f.stddev + f.mean
                                : v * (f.max - f.min) + f.min;
    }
  }
  return out;
}

Matrix correlation_matrix(const core::FeatureMatrix& fm, const std::vector<double>* label) {
  require_imputed(fm, "correlation_matrix");
  size_t n = fm.n();
  size_t m = fm.m() + (label ? 1 : 0);
  if (label && label->size() != n) {
    throw Error("LengthMismatch", kModule, "label column length does not match matrix rows");
  }

  // Columnwise centered values and population stddevs.
  Matrix centered(m, n);
  std::vector<double> stddev(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    auto value = [&](size_t i) {
      return j < fm.m() ? fm.values.at(i, j) : (*label)[i];
    };
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += value(i);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = value(i) - mean;
      centered.at(j, i) = d;
      ss += d * d;
    }
    stddev[j] = std::sqrt(ss / static_cast<double>(n));
  }

  Matrix corr(m, m, 0.0);
  for (size_t a = 0; a < m; ++a) {
    corr.at(a, a) = 1.0;
    if (stddev[a] == 0.0) continue;
    for (size_t b = a + 1; b < m; ++b) {
      if (stddev[b] == 0.0) continue;
      double cov = 0.0;
      for (size_t i = 0; i < n; ++i) cov += centered.at(a, i) * centered.at(b, i);
      cov /= static_cast<double>(n);
      double r = cov / (stddev[a] * stddev[b]);
      r = std::clamp(r, -1.0, 1.0);
      corr.at(a, b) = r;
      corr.at(b, a) = r;
    }
  }
  return corr;
}

}  // namespace sentidrop::prep
