#include "sentidrop/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sentidrop/csvio.hpp"
#include "sentidrop/error.hpp"

namespace sentidrop::core {

namespace {
constexpr const char* kModule = "core_data";
const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}
}  // namespace

bool FeatureMatrix::any_missing() const {
  return std::any_of(missing_mask.begin(), missing_mask.end(),
                     [](uint8_t b) { return b != 0; });
}

StudentRecord Dataset::record(size_t i) const {
  StudentRecord rec;
  rec.student_id = student_ids[i];
  rec.label = labels[i];
  for (size_t j = 0; j < m(); ++j) {
    rec.features[feature_names[j]] =
        missing_mask[i * m() + j] ? std::nullopt : std::optional<double>(values.at(i, j));
  }
  return rec;
}

FeatureMatrix Dataset::feature_matrix() const {
  return FeatureMatrix{values, missing_mask, feature_names};
}

bool Dataset::has_labels() const {
  return !labels.empty() &&
         std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
}

std::vector<int> Dataset::label_vector() const {
  std::vector<int> y;
  y.reserve(n());
  for (size_t i = 0; i < n(); ++i) {
    if (!labels[i]) {
      throw Error("MissingLabel", kModule, "record '" + student_ids[i] + "' has no label");
    }
    y.push_back(*labels[i]);
  }
  return y;
}

Dataset load_tabular(const std::string& path, const std::vector<std::string>* expected_features) {
  auto rows = csvio::read_file(path);
  // Drop fully blank rows (e.g. a trailing newline).
  std::erase_if(rows, [](const std::vector<std::string>& r) {
    return r.size() == 1 && is_blank(r[0]);
  });
  if (rows.empty()) {
    throw Error("MissingColumn", kModule, "empty file, no header row: " + path);
  }

  const auto& header = rows[0];
  if (header.empty() || header[0] != "student_id") {
    throw Error("MissingColumn", kModule, "first column must be 'student_id'");
  }
  bool has_label_col = header.size() >= 2 && header.back() == "label";
  size_t m = header.size() - 1 - (has_label_col ? 1 : 0);

  Dataset ds;
  ds.feature_names.assign(header.begin() + 1, header.end() - (has_label_col ? 1 : 0));
  for (const auto& name : ds.feature_names) {
    if (name == "student_id" || name == "label" || name.empty()) {
      throw Error("SchemaMismatch", kModule, "invalid feature column name: '" + name + "'");
    }
  }
  {
    std::set<std::string> uniq(ds.feature_names.begin(), ds.feature_names.end());
    if (uniq.size() != ds.feature_names.size()) {
      throw Error("SchemaMismatch", kModule, "duplicate feature column names");
    }
  }
  if (expected_features && *expected_features != ds.feature_names) {
    std::ostringstream msg;
    msg << "feature columns do not match expected schema (got " << m << " columns)";
    throw Error("SchemaMismatch", kModule, msg.str());
  }

  size_t n = rows.size() - 1;
  ds.values = Matrix(n, m, kNaN);
  ds.missing_mask.assign(n * m, 0);
  ds.student_ids.reserve(n);
  ds.labels.assign(n, std::nullopt);

  std::unordered_set<std::string> seen_ids;
  seen_ids.reserve(n);
  for (size_t r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    size_t csv_line = r + 2;  // 1-based, counting the header
    if (row.size() != header.size()) {
      std::ostringstream msg;
      msg << "row " << csv_line << " has " << row.size() << " fields, expected " << header.size();
      throw Error("SchemaMismatch", kModule, msg.str());
    }
    const std::string& id = row[0];
    if (is_blank(id)) {
      throw Error("MissingColumn", kModule, "blank student_id at row " + std::to_string(csv_line));
    }
    if (!seen_ids.insert(id).second) {
      throw Error("DuplicateStudentId", kModule, "duplicate student_id '" + id + "'");
    }
    ds.student_ids.push_back(id);

    for (size_t j = 0; j < m; ++j) {
      const std::string& cell = row[j + 1];
      if (is_blank(cell)) {
        ds.missing_mask[r * m + j] = 1;
        continue;
      }
      double v = 0.0;
      if (!csvio::parse_double(cell, v)) {
        std::ostringstream msg;
        msg << "non-numeric cell at row " << csv_line << ", column '" << ds.feature_names[j]
            << "': '" << cell << "'";
        throw Error("NonNumericCell", kModule, msg.str());
      }
      ds.values.at(r, j) = v;
    }

    if (has_label_col) {
      const std::string& cell = row.back();
      if (!is_blank(cell)) {
        double v = 0.0;
        if (!csvio::parse_double(cell, v) || (v != 0.0 && v != 1.0)) {
          throw Error("BadLabel", kModule,
                      "label must be 0 or 1 at row " + std::to_string(csv_line) + ": '" + cell + "'");
        }
        ds.labels[r] = static_cast<int>(v);
      }
    }
  }
  return ds;
}

void save_tabular(const Dataset& ds, const std::string& path) {
  bool any_label =
      std::any_of(ds.labels.begin(), ds.labels.end(), [](const auto& l) { return l.has_value(); });

  std::vector<std::vector<std::string>> rows;
  rows.reserve(ds.n() + 1);
  std::vector<std::string> header;
  header.push_back("student_id");
  header.insert(header.end(), ds.feature_names.begin(), ds.feature_names.end());
  if (any_label) header.push_back("label");
  rows.push_back(std::move(header));

  for (size_t i = 0; i < ds.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(ds.m() + 2);
    row.push_back(ds.student_ids[i]);
    for (size_t j = 0; j < ds.m(); ++j) {
      row.push_back(ds.missing_mask[i * ds.m() + j] ? std::string()
                                                    : csvio::format_double(ds.values.at(i, j)));
    }
    if (any_label) {
      row.push_back(ds.labels[i] ? std::to_string(*ds.labels[i]) : std::string());
    }
    rows.push_back(std::move(row));
  }
  csvio::write_file(path, rows);
}

CommentSet load_comments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("IoError", kModule, "cannot open file: " + path);
  }
  CommentSet cs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw Error("MalformedJson", kModule, "line " + std::to_string(line_no) + ": invalid JSON");
    }
    if (!obj.is_object() || !obj.contains("student_id") || !obj.contains("timestamp") ||
        !obj.contains("text") || !obj["student_id"].is_string() || !obj["text"].is_string() ||
        !obj["timestamp"].is_string()) {
      throw Error("MalformedJson", kModule,
                  "line " + std::to_string(line_no) +
                      ": expected string fields student_id, timestamp, text");
    }

    Comment c;
    c.student_id = obj["student_id"].get<std::string>();
    c.text = obj["text"].get<std::string>();
    c.source_line = line_no;
    if (!timeutil::try_parse_iso8601(obj["timestamp"].get<std::string>(), c.timestamp)) {
      throw Error("BadTimestamp", kModule,
                  "line " + std::to_string(line_no) + ": bad timestamp '" +
                      obj["timestamp"].get<std::string>() + "'");
    }
    if (is_blank(c.text)) {
      throw Error("EmptyText", kModule, "line " + std::to_string(line_no) + ": empty text");
    }
    if (obj.contains("gold_label")) {
      if (!obj["gold_label"].is_string()) {
        throw Error("MalformedJson", kModule,
                    "line " + std::to_string(line_no) + ": gold_label must be a string");
      }
      std::string g = obj["gold_label"].get<std::string>();
      if (g != "positive" && g != "neutral" && g != "negative") {
        throw Error("BadGoldLabel", kModule,
                    "line " + std::to_string(line_no) + ": gold_label '" + g + "'");
      }
      c.gold_label = g;
    }
    cs.comments.push_back(std::move(c));
  }

  std::sort(cs.comments.begin(), cs.comments.end(), [](const Comment& a, const Comment& b) {
    if (a.student_id != b.student_id) return a.student_id < b.student_id;
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.source_line < b.source_line;
  });
  return cs;
}

void save_comments(const CommentSet& cs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("IoError", kModule, "cannot write file: " + path);
  }
  for (const auto& c : cs.comments) {
    nlohmann::json obj;
    obj["student_id"] = c.student_id;
    obj["timestamp"] = timeutil::format_iso8601(c.timestamp);
    obj["text"] = c.text;
    if (c.gold_label) obj["gold_label"] = *c.gold_label;
    out << obj.dump() << '\n';
  }
}

ValidationReport validate(const Dataset& ds, const CommentSet& cs) {
  ValidationReport rep;
  rep.n = ds.n();
  rep.m = ds.m();

  std::unordered_set<std::string> ids(ds.student_ids.begin(), ds.student_ids.end());
  std::set<std::string> orphans;
  for (const auto& c : cs.comments) {
    if (!ids.count(c.student_id)) orphans.insert(c.student_id);
  }
  rep.orphan_comment_ids.assign(orphans.begin(), orphans.end());

  for (size_t j = 0; j < ds.m(); ++j) {
    size_t miss = 0;
    for (size_t i = 0; i < ds.n(); ++i) miss += ds.missing_mask[i * ds.m() + j];
    rep.missing_rate_per_feature[ds.feature_names[j]] =
        ds.n() == 0 ? 0.0 : static_cast<double>(miss) / static_cast<double>(ds.n());
  }

  size_t positives = 0;
  for (const auto& l : ds.labels) {
    if (l) {
      ++rep.labeled_count;
      positives += static_cast<size_t>(*l);
    }
  }
  rep.positive_rate = rep.labeled_count == 0
                          ? 0.0
                          : static_cast<double>(positives) / static_cast<double>(rep.labeled_count);
  return rep;
}

}  // namespace sentidrop::core
