#include "accrue/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace accrue {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path,
                    std::size_t line_no, const char* what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": cannot parse " + what + " value '" + s + "'");
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what +
                             " value is not finite");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ":1: missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 3 || header[header.size() - 2] != "m" ||
      header.back() != "y") {
    throw std::runtime_error(path + ":1: header must be x_1,...,x_d,m,y");
  }
  const std::size_t d = header.size() - 2;
  for (std::size_t i = 0; i < d; ++i) {
    if (header[i] != "x_" + std::to_string(i + 1)) {
      throw std::runtime_error(path + ":1: expected column 'x_" +
                               std::to_string(i + 1) + "', got '" + header[i] +
                               "'");
    }
  }

  Dataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != d + 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(d + 2) + " fields, got " +
                               std::to_string(fields.size()));
    }
    PairRecord rec;
    rec.x.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      rec.x[i] = parse_double(fields[i], path, line_no, "input");
    }
    rec.m = parse_double(fields[d], path, line_no, "prediction");
    rec.y = parse_double(fields[d + 1], path, line_no, "observation");
    data.records.push_back(std::move(rec));
  }
  if (data.records.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }
  return data;
}

void write_data_csv(std::ostream& out, const Dataset& data) {
  if (data.records.empty()) {
    throw std::invalid_argument("write_data_csv: empty dataset");
  }
  const std::size_t d = data.dim();
  if (d == 0) throw std::invalid_argument("write_data_csv: zero-dimensional input");

  for (std::size_t i = 0; i < d; ++i) {
    out << "x_" << (i + 1) << ',';
  }
  out << "m,y\n";
  for (const PairRecord& rec : data.records) {
    if (rec.x.size() != d) {
      throw std::invalid_argument("write_data_csv: ragged input dimensions");
    }
    for (double xi : rec.x) out << format_double(xi) << ',';
    out << format_double(rec.m) << ',' << format_double(rec.y) << '\n';
  }
  if (!out) throw std::runtime_error("write_data_csv: stream write failed");
}

void write_data_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_data_csv(out, data);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace accrue
