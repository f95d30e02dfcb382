#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentidrop/matrix.hpp"
#include "sentidrop/timeutil.hpp"

namespace sentidrop::core {

// Tabular features plus missing-value mask. Masked cells hold NaN and are
// never read by consumers; training requires a fully imputed matrix.
struct FeatureMatrix {
  Matrix values;
  std::vector<uint8_t> missing_mask;  // row-major, parallel to values.data
  std::vector<std::string> column_names;

  size_t n() const { return values.rows; }
  size_t m() const { return values.cols; }
  bool missing(size_t i, size_t j) const { return missing_mask[i * values.cols + j] != 0; }
  bool any_missing() const;
};

struct StudentRecord {
  std::string student_id;
  std::map<std::string, std::optional<double>> features;
  std::optional<int> label;  // 1 = dropout, 0 = active
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> student_ids;
  std::vector<std::optional<int>> labels;
  Matrix values;                      // n x m, NaN where masked
  std::vector<uint8_t> missing_mask;  // n x m

  size_t n() const { return student_ids.size(); }
  size_t m() const { return feature_names.size(); }

  StudentRecord record(size_t i) const;
  FeatureMatrix feature_matrix() const;
  bool has_labels() const;
  std::vector<int> label_vector() const;  // throws if any label missing

  bool operator==(const Dataset&) const = default;
};

struct Comment {
  std::string student_id;
  int64_t timestamp = 0;  // UTC epoch seconds
  std::string text;
  std::optional<std::string> gold_label;  // "positive" | "neutral" | "negative"
  size_t source_line = 0;
};

struct CommentSet {
  std::vector<Comment> comments;  // sorted by (student_id, timestamp, source_line)

  size_t size() const { return comments.size(); }
  bool empty() const { return comments.empty(); }
};

struct ValidationReport {
  std::vector<std::string> orphan_comment_ids;  // in comments but not dataset
  std::map<std::string, double> missing_rate_per_feature;
  size_t labeled_count = 0;
  double positive_rate = 0.0;  // among labeled records
  size_t n = 0;
  size_t m = 0;
};

// CSV: header row, `student_id` first column, optional `label` last column,
// RFC-4180 quoting, empty cells = missing.
Dataset load_tabular(const std::string& path,
                     const std::vector<std::string>* expected_features = nullptr);
void save_tabular(const Dataset& ds, const std::string& path);

// JSONL, one object per line: {student_id, timestamp, text[, gold_label]}.
CommentSet load_comments(const std::string& path);
void save_comments(const CommentSet& cs, const std::string& path);

ValidationReport validate(const Dataset& ds, const CommentSet& cs);

}  // namespace sentidrop::core
