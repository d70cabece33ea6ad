#pragma once

#include "tailfx/common.hpp"
#include "tailfx/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tailfx {

// CSV parse failure; carries the 1-based line number.
class CsvError : public Error {
 public:
  CsvError(const std::string& what, std::size_t line)
      : Error("csv line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A dataset in the CLI's CSV convention: required columns y (outcome) and
// t (treatment); every remaining column is a confounder, kept in header
// order.
struct CsvDataset {
  std::vector<std::string> confounder_names;
  ObservationSet data;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

inline CsvDataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty input", 1);
  const std::vector<std::string> raw_header = detail::split_csv_line(line);

  std::vector<std::string> header;
  header.reserve(raw_header.size());
  std::set<std::string> seen;
  for (const std::string& h : raw_header) {
    const std::string name = detail::trim(h);
    if (name.empty()) throw CsvError("empty column name", 1);
    if (!seen.insert(name).second)
      throw CsvError("duplicate column name '" + name + "'", 1);
    header.push_back(name);
  }

  std::ptrdiff_t y_col = -1, t_col = -1;
  CsvDataset out;
  std::vector<std::ptrdiff_t> confounder_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "y") {
      y_col = static_cast<std::ptrdiff_t>(j);
    } else if (header[j] == "t") {
      t_col = static_cast<std::ptrdiff_t>(j);
    } else {
      out.confounder_names.push_back(header[j]);
      confounder_cols.push_back(static_cast<std::ptrdiff_t>(j));
    }
  }
  if (y_col < 0) throw CsvError("missing required column 'y'", 1);
  if (t_col < 0) throw CsvError("missing required column 't'", 1);
  if (confounder_cols.empty())
    throw CsvError("need at least one confounder column besides y and t", 1);

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw CsvError("expected " + std::to_string(header.size()) +
                         " fields, got " + std::to_string(fields.size()),
                     line_no);
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string cell = detail::trim(fields[j]);
      std::size_t consumed = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &consumed);
      } catch (const std::exception&) {
        throw CsvError("cannot parse '" + cell + "' in column '" + header[j] +
                           "'",
                       line_no);
      }
      if (consumed != cell.size())
        throw CsvError("trailing garbage in '" + cell + "'", line_no);
      if (!std::isfinite(value))
        throw CsvError("non-finite value in column '" + header[j] + "'",
                       line_no);
      row[j] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError("no data rows", line_no);

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(confounder_cols.size());
  out.data.confounders.resize(n, d);
  out.data.treatment.resize(n);
  out.data.outcome.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.data.outcome[i] = rows[i][static_cast<std::size_t>(y_col)];
    out.data.treatment[i] = rows[i][static_cast<std::size_t>(t_col)];
    for (Eigen::Index j = 0; j < d; ++j)
      out.data.confounders(i, j) =
          rows[i][static_cast<std::size_t>(confounder_cols[j])];
  }
  return out;
}

// Writes the dataset in the same convention: header y,t,<confounders...>,
// doubles rendered with shortest-round-trip %.17g so rewrites are
// byte-identical.
inline void write_csv(const CsvDataset& dataset, std::ostream& os) {
  os << "y,t";
  for (const std::string& name : dataset.confounder_names) os << ',' << name;
  os << '\n';
  char buf[40];
  const auto n = dataset.data.size();
  const auto d = dataset.data.confounders.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", dataset.data.outcome[i]);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", dataset.data.treatment[i]);
    os << ',' << buf;
    for (Eigen::Index j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", dataset.data.confounders(i, j));
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace tailfx
