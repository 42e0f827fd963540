#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "evsefl/dataset.hpp"

namespace evsefl {

/// How to interpret a feature CSV.
/// feature_columns empty means auto-detect: every column (other than the
/// label) whose non-missing cells all parse as finite numbers is kept;
/// the rest are skipped and reported.
struct CsvSchema {
  std::string label_column = "Label";
  std::vector<std::string> feature_columns;
  std::map<std::string, int> label_value_map = {
      {"Benign", 0}, {"DoS", 1}, {"Recon", 2}};
};

/// What happened during one load_csv call.
struct IngestReport {
  std::string path;
  std::size_t rows_read = 0;     // data rows seen (excluding header)
  std::size_t rows_dropped = 0;  // rows with missing/non-finite feature cells
  std::array<std::size_t, kNumClasses> class_counts{};
  std::size_t feature_count = 0;
  std::vector<std::string> skipped_columns;  // non-numeric, auto mode only

  std::string to_json() const;
  std::string to_text() const;
};

/// Load one modality's feature table from a UTF-8, comma-separated file
/// with a header row. Rows containing missing or non-finite values in a
/// selected feature column are dropped and counted. Label strings are
/// mapped through schema.label_value_map; anything unmapped is an
/// IngestError naming the value and row.
ModalityDataset load_csv(const std::string& path, const CsvSchema& schema,
                         Modality modality, IngestReport* report = nullptr);

}  // namespace evsefl
