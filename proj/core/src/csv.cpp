#include "evsefl/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evsefl/errors.hpp"

namespace evsefl {

namespace {

// Comma-splitting with basic double-quote support; no embedded newlines.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  std::size_t last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || errno == ERANGE) return false;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return false;
  out = v;
  return true;
}

}  // namespace

std::string IngestReport::to_json() const {
  nlohmann::json j;
  j["path"] = path;
  j["rows_read"] = rows_read;
  j["rows_dropped"] = rows_dropped;
  j["rows_kept"] = rows_read - rows_dropped;
  j["feature_count"] = feature_count;
  j["class_counts"] = {{"benign", class_counts[0]},
                       {"dos", class_counts[1]},
                       {"recon", class_counts[2]}};
  j["skipped_columns"] = skipped_columns;
  return j.dump(2);
}

std::string IngestReport::to_text() const {
  std::ostringstream out;
  out << path << ": read " << rows_read << " rows, dropped " << rows_dropped
      << ", kept " << (rows_read - rows_dropped) << " with " << feature_count
      << " features; classes benign=" << class_counts[0]
      << " dos=" << class_counts[1] << " recon=" << class_counts[2];
  if (!skipped_columns.empty())
    out << "; skipped " << skipped_columns.size() << " non-numeric column(s)";
  return out.str();
}

ModalityDataset load_csv(const std::string& path, const CsvSchema& schema,
                         Modality modality, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path);

  std::string header_line;
  if (!std::getline(in, header_line))
    throw IngestError(path + " is empty (no header row)");
  const std::vector<std::string> header = split_csv_line(header_line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == schema.label_column) {
      label_idx = i;
      break;
    }
  }
  if (label_idx == header.size())
    throw IngestError(path + ": label column '" + schema.label_column +
                      "' not found in header");

  // Candidate feature columns: the explicit list, or everything but the label.
  std::vector<std::size_t> candidates;
  if (schema.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (i != label_idx) candidates.push_back(i);
  } else {
    for (const std::string& name : schema.feature_columns) {
      bool found = false;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) {
          candidates.push_back(i);
          found = true;
          break;
        }
      }
      if (!found)
        throw IngestError(path + ": feature column '" + name +
                          "' not found in header");
    }
  }
  const bool auto_mode = schema.feature_columns.empty();

  // Column-major parse. NaN marks a missing/non-finite cell; auto mode
  // drops a column entirely once any cell fails to parse.
  std::vector<std::vector<double>> columns(candidates.size());
  std::vector<bool> numeric(candidates.size(), true);
  std::vector<int> row_labels;
  std::size_t rows_read = 0;

  std::string line;
  std::size_t line_no = 1;  // header was line 1
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected " << header.size()
          << " cells, got " << cells.size();
      throw IngestError(msg.str());
    }
    ++rows_read;

    const std::string label_value = trim(cells[label_idx]);
    const auto it = schema.label_value_map.find(label_value);
    if (it == schema.label_value_map.end()) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": unknown label value '" << label_value
          << "'";
      throw IngestError(msg.str());
    }
    if (it->second < 0 || it->second >= kNumClasses) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": label '" << label_value
          << "' maps to class " << it->second << " outside [0, " << kNumClasses
          << ")";
      throw IngestError(msg.str());
    }
    row_labels.push_back(it->second);

    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (auto_mode && !numeric[k]) continue;
      const std::string cell = trim(cells[candidates[k]]);
      double value;
      if (cell.empty()) {
        columns[k].push_back(std::nan(""));
      } else if (!parse_double(cell, value) || !std::isfinite(value)) {
        if (auto_mode) {
          numeric[k] = false;
          columns[k].clear();
        } else {
          columns[k].push_back(std::nan(""));
        }
      } else {
        columns[k].push_back(value);
      }
    }
  }

  if (rows_read == 0) throw IngestError(path + " has no data rows");

  std::vector<std::size_t> kept_cols;
  std::vector<std::string> skipped;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!auto_mode || numeric[k])
      kept_cols.push_back(k);
    else
      skipped.push_back(trim(header[candidates[k]]));
  }
  if (kept_cols.empty()) throw IngestError(path + ": no numeric feature columns");

  // Drop rows that have a missing cell in any kept column.
  std::vector<std::size_t> kept_rows;
  for (std::size_t r = 0; r < rows_read; ++r) {
    bool ok = true;
    for (std::size_t k : kept_cols) {
      if (std::isnan(columns[k][r])) {
        ok = false;
        break;
      }
    }
    if (ok) kept_rows.push_back(r);
  }
  const std::size_t dropped = rows_read - kept_rows.size();
  if (kept_rows.empty())
    throw IngestError(path + ": every row had missing values");

  ModalityDataset ds;
  ds.modality = modality;
  ds.features = Tensor({kept_rows.size(), kept_cols.size()});
  ds.labels.resize(kept_rows.size());
  for (std::size_t k : kept_cols)
    ds.feature_names.push_back(trim(header[candidates[k]]));
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    const std::size_t r = kept_rows[i];
    ds.labels[i] = row_labels[r];
    for (std::size_t j = 0; j < kept_cols.size(); ++j)
      ds.features.at(i, j) = columns[kept_cols[j]][r];
  }

  if (report) {
    report->path = path;
    report->rows_read = rows_read;
    report->rows_dropped = dropped;
    report->feature_count = kept_cols.size();
    report->skipped_columns = skipped;
    report->class_counts = {};
    for (int label : ds.labels)
      report->class_counts[static_cast<std::size_t>(label)] += 1;
  }
  return ds;
}

}  // namespace evsefl
