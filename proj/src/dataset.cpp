#include "syhd/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "syhd/errors.hpp"
#include "syhd/numfmt.hpp"

namespace syhd {

namespace {

bool is_separator(char c) { return c == ',' || c == ' ' || c == '\t'; }

// Splits a line into double cells; throws ParseError(line_no) on bad cells.
void parse_cells(const std::string& line, std::size_t line_no, std::vector<double>& out) {
  out.clear();
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && is_separator(*p)) ++p;
    if (p >= end) break;
    if (*p == '+' && p + 1 < end) ++p;  // from_chars rejects an explicit plus
    double value = 0.0;
    const auto res = std::from_chars(p, end, value);
    if (res.ec != std::errc()) {
      throw ParseError("unparsable numeric cell starting at '" +
                           std::string(p, std::min<std::size_t>(end - p, 12)) + "'",
                       line_no);
    }
    if (!std::isfinite(value)) throw ParseError("non-finite value", line_no);
    out.push_back(value);
    p = res.ptr;
    if (p < end && !is_separator(*p)) {
      throw ParseError("unexpected character '" + std::string(1, *p) + "' after number", line_no);
    }
  }
}

long long to_integral_label(double v, std::size_t line_no) {
  const double rounded = std::nearbyint(v);
  if (std::abs(v - rounded) > 1e-9 || std::abs(rounded) > 9e15) {
    throw ParseError("label " + to_shortest(v) + " is not an integer", line_no);
  }
  return static_cast<long long>(rounded);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (in.bad()) throw IoError("read failure on " + path);
  return lines;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return is_separator(c); });
}

}  // namespace

Dataset load_csv_dataset(const std::string& path) {
  const auto lines = read_lines(path);
  Dataset ds;
  std::vector<std::vector<double>> rows;
  std::vector<double> cells;
  std::size_t width = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const std::size_t line_no = i + 1;
    parse_cells(lines[i], line_no, cells);
    if (cells.size() < 2) throw ParseError("need at least one feature and a label", line_no);
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError("ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width),
                       line_no);
    }
    ds.raw_labels.push_back(to_integral_label(cells.back(), line_no));
    cells.pop_back();
    rows.push_back(cells);
  }
  if (rows.empty()) throw ParseError("no data rows in " + path);
  ds.x = Matrix(rows.size(), width - 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), ds.x.row(r).begin());
  }
  return ds;
}

Dataset load_xy_dataset(const std::string& features_path, const std::string& labels_path) {
  const auto xlines = read_lines(features_path);
  Dataset ds;
  std::vector<std::vector<double>> rows;
  std::vector<double> cells;
  std::size_t width = 0;
  for (std::size_t i = 0; i < xlines.size(); ++i) {
    if (blank(xlines[i])) continue;
    const std::size_t line_no = i + 1;
    parse_cells(xlines[i], line_no, cells);
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError("ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width),
                       line_no);
    }
    rows.push_back(cells);
  }
  if (rows.empty()) throw ParseError("no data rows in " + features_path);

  const auto ylines = read_lines(labels_path);
  for (std::size_t i = 0; i < ylines.size(); ++i) {
    if (blank(ylines[i])) continue;
    const std::size_t line_no = i + 1;
    parse_cells(ylines[i], line_no, cells);
    if (cells.size() != 1) throw ParseError("expected one label per line", line_no);
    ds.raw_labels.push_back(to_integral_label(cells[0], line_no));
  }
  if (ds.raw_labels.size() != rows.size()) {
    throw ParseError("feature file has " + std::to_string(rows.size()) + " rows but label file has " +
                     std::to_string(ds.raw_labels.size()));
  }
  ds.x = Matrix(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), ds.x.row(r).begin());
  }
  return ds;
}

Dataset load_dataset(const std::string& features_path,
                     const std::optional<std::string>& labels_path) {
  return labels_path ? load_xy_dataset(features_path, *labels_path)
                     : load_csv_dataset(features_path);
}

void align_labels(std::vector<Dataset*> datasets) {
  std::map<long long, int> mapping;
  for (const Dataset* ds : datasets) {
    for (const long long v : ds->raw_labels) mapping.emplace(v, 0);
  }
  if (mapping.empty()) throw std::invalid_argument("no labels to align");
  int next = 1;
  std::vector<long long> values;
  for (auto& [value, dense] : mapping) {
    dense = next++;
    values.push_back(value);
  }
  for (Dataset* ds : datasets) {
    ds->y.resize(ds->raw_labels.size());
    for (std::size_t i = 0; i < ds->raw_labels.size(); ++i) {
      ds->y[i] = mapping.at(ds->raw_labels[i]);
    }
    ds->label_values = values;
    ds->class_count = static_cast<int>(values.size());
  }
}

void save_csv_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t r = 0; r < ds.x.rows(); ++r) {
    const auto row = ds.x.row(r);
    std::string line;
    for (const double v : row) {
      line += to_shortest(v);
      line += ',';
    }
    line += std::to_string(ds.raw_labels[r]);
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace syhd
