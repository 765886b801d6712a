#pragma once

#include <string>
#include <vector>

#include "trda/moments.hpp"

namespace trda {

struct CsvLoadReport {
  LabeledDataset data;
  std::vector<std::string> feature_names;   // surviving columns, file order
  std::vector<std::string> class_names;     // label index -> class string
  int n_rows_dropped = 0;                   // rows with missing values
  std::vector<std::string> dropped_columns; // zero-Qn (near-constant) variables
};

// Reads a headered CSV, drops rows with missing values (empty, NA, NaN, ?),
// removes variables whose Qn scale is zero, and maps the label column's
// distinct values (sorted) to 0-based group indices. Throws
// std::invalid_argument with row/column coordinates on unparseable cells and
// when fewer than two classes survive.
CsvLoadReport load_csv(const std::string& path, const std::string& label_column);

// Writes content to a temporary file in the target directory and renames it
// over path, so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

// One-line machine-readable error payload for the command-line tools.
std::string error_json(const std::string& kind, const std::string& message);

}  // namespace trda
