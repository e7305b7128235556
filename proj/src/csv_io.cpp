#include "ordrisk/csv_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ordrisk {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_double(const std::string& field, std::size_t line_no,
                    const std::string& column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || field.empty()) {
    std::ostringstream os;
    os << "load_csv: cannot parse '" << field << "' as a number at line "
       << line_no << ", column '" << column << "'";
    throw std::invalid_argument(os.str());
  }
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "load_csv: non-finite value at line " << line_no << ", column '"
       << column << "'";
    throw std::invalid_argument(os.str());
  }
  return v;
}

}  // namespace

ColumnTransform parse_transform(const std::string& name) {
  if (name == "identity" || name == "id") return ColumnTransform::identity;
  if (name == "log") return ColumnTransform::log_e;
  throw std::invalid_argument(
      "parse_transform: unknown transform '" + name + "' (use identity or log)");
}

std::string to_string(ColumnTransform t) {
  return t == ColumnTransform::identity ? "identity" : "log";
}

LoadedDataset load_csv(const std::string& path, const LoadConfig& cfg) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_csv: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("load_csv: '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line, cfg.delimiter);
  std::unordered_map<std::string, std::size_t> col_index;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!col_index.emplace(header[j], j).second) {
      throw std::invalid_argument("load_csv: duplicate column '" + header[j] +
                                  "' in '" + path + "'");
    }
  }
  const auto find_col = [&](const std::string& name) {
    const auto it = col_index.find(name);
    if (it == col_index.end()) {
      throw std::invalid_argument("load_csv: column '" + name +
                                  "' not found in '" + path + "'");
    }
    return it->second;
  };
  const std::size_t label_col = find_col(cfg.label_column);

  std::vector<FeatureSpec> features = cfg.features;
  if (features.empty()) {
    for (const std::string& name : header) {
      if (name == cfg.label_column) continue;
      features.push_back(FeatureSpec{name, ColumnTransform::identity});
    }
  }
  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(features.size());
  for (const FeatureSpec& f : features) feature_cols.push_back(find_col(f.column));

  LoadedDataset out;
  out.drops.dropped_by_column.reserve(features.size());
  for (const FeatureSpec& f : features) {
    if (f.transform == ColumnTransform::log_e) {
      out.drops.dropped_by_column.emplace_back(f.column, 0);
    }
  }
  const auto drop_slot = [&](const std::string& column) -> std::size_t& {
    for (auto& entry : out.drops.dropped_by_column) {
      if (entry.first == column) return entry.second;
    }
    out.drops.dropped_by_column.emplace_back(column, 0);
    return out.drops.dropped_by_column.back().second;
  };

  std::vector<double> values;  // row-major kept rows
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++out.drops.rows_parsed;
    const std::vector<std::string> fields = split_line(line, cfg.delimiter);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "load_csv: line " << line_no << " has " << fields.size()
         << " fields, expected " << header.size();
      throw std::invalid_argument(os.str());
    }
    std::vector<double> row(features.size());
    bool dropped = false;
    for (std::size_t j = 0; j < features.size() && !dropped; ++j) {
      const double raw =
          parse_double(fields[feature_cols[j]], line_no, features[j].column);
      if (features[j].transform == ColumnTransform::log_e) {
        if (!(raw > 0.0)) {
          ++drop_slot(features[j].column);
          dropped = true;
          break;
        }
        row[j] = std::log(raw);
      } else {
        row[j] = raw;
      }
    }
    if (dropped) {
      ++out.drops.rows_dropped;
      continue;
    }
    labels.push_back(fields[label_col] == cfg.positive_token ? 1 : 0);
    values.insert(values.end(), row.begin(), row.end());
    ++out.drops.rows_kept;
  }
  if (out.drops.rows_kept == 0) {
    throw std::invalid_argument("load_csv: no usable rows in '" + path + "'");
  }

  const std::size_t n = out.drops.rows_kept;
  const std::size_t p_raw = features.size();
  const std::size_t p = p_raw + (cfg.add_intercept ? 1 : 0);
  out.data.features.resize(static_cast<Eigen::Index>(n),
                           static_cast<Eigen::Index>(p));
  out.data.labels.resize(static_cast<Eigen::Index>(n));
  out.data.feature_names.clear();
  out.data.feature_names.reserve(p);
  if (cfg.add_intercept) out.data.feature_names.emplace_back("intercept");
  for (const FeatureSpec& f : features) {
    out.data.feature_names.push_back(f.transform == ColumnTransform::log_e
                                         ? "log(" + f.column + ")"
                                         : f.column);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index ei = static_cast<Eigen::Index>(i);
    std::size_t j = 0;
    if (cfg.add_intercept) out.data.features(ei, 0) = 1.0;
    for (; j < p_raw; ++j) {
      out.data.features(ei, static_cast<Eigen::Index>(j + (cfg.add_intercept ? 1 : 0))) =
          values[i * p_raw + j];
    }
    out.data.labels[ei] = labels[i];
  }
  out.data.validate();
  return out;
}

std::vector<FeatureSpec> wdbc_default_features() {
  return {
      {"worst-texture", ColumnTransform::identity},
      {"worst-area", ColumnTransform::log_e},
      {"worst-smoothness", ColumnTransform::identity},
      {"worst-compactness", ColumnTransform::log_e},
      {"worst-concave-points", ColumnTransform::log_e},
      {"worst-symmetry", ColumnTransform::log_e},
  };
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace ordrisk
