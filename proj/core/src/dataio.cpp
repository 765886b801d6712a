#include "trda/dataio.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trda {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
         cell == "?";
}

double parse_cell(const std::string& cell, int line_no, const std::string& column) {
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(cell.c_str(), &end);
  if (errno != 0 || end == cell.c_str() || *end != '\0') {
    throw std::invalid_argument("load_csv: cannot parse numeric cell '" + cell + "' at line " +
                                std::to_string(line_no) + ", column '" + column + "'");
  }
  return value;
}

}  // namespace

CsvLoadReport load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file '" + path + "'");
  const std::vector<std::string> header = split_csv_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw std::invalid_argument("load_csv: label column '" + label_column + "' not in header");
  }
  const std::size_t label_idx = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  int dropped_rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("load_csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
    }
    if (std::any_of(cells.begin(), cells.end(),
                    [](const std::string& c) { return is_missing(c); })) {
      ++dropped_rows;
      continue;
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      row.push_back(parse_cell(cells[c], line_no, header[c]));
    }
    rows.push_back(std::move(row));
    row_labels.push_back(cells[label_idx]);
  }
  if (rows.empty()) throw std::invalid_argument("load_csv: no complete rows in '" + path + "'");

  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) feature_names.push_back(header[c]);
  }

  CsvLoadReport report;
  report.n_rows_dropped = dropped_rows;

  const std::size_t n = rows.size();
  std::vector<std::size_t> kept_cols;
  for (std::size_t c = 0; c < feature_names.size(); ++c) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = rows[i][c];
    if (qn_scale(col) > 0.0) {
      kept_cols.push_back(c);
    } else {
      report.dropped_columns.push_back(feature_names[c]);
    }
  }
  if (kept_cols.empty()) {
    throw std::invalid_argument("load_csv: every variable has zero Qn scale");
  }

  std::map<std::string, int> label_map;
  for (const auto& l : row_labels) label_map.emplace(l, 0);
  if (label_map.size() < 2) {
    throw std::invalid_argument("load_csv: fewer than 2 classes survive");
  }
  int next = 0;
  for (auto& [name, idx] : label_map) {
    idx = next++;
    report.class_names.push_back(name);
  }

  report.data.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kept_cols.size()));
  report.data.labels.resize(n);
  report.data.n_groups = next;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < kept_cols.size(); ++c) {
      report.data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          rows[i][kept_cols[c]];
    }
    report.data.labels[i] = label_map.at(row_labels[i]);
  }
  for (std::size_t c : kept_cols) report.feature_names.push_back(feature_names[c]);
  return report;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open temporary file '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path +
                             "': " + ec.message());
  }
}

std::string error_json(const std::string& kind, const std::string& message) {
  nlohmann::json j;
  j["error"] = kind;
  j["message"] = message;
  return j.dump();
}

}  // namespace trda
