#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "randpoly/experiments.hpp"

namespace randpoly::csv {

/// 17 significant digits round-trip any double.
inline std::string format(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string trials_csv(std::span<const TrialRecord> records) {
  std::string out = "n,trial,value,aux\n";
  for (const auto& r : records) {
    out += std::to_string(r.n) + ',' + std::to_string(r.trial) + ',' + format(r.value) + ',';
    if (r.aux) out += format(*r.aux);
    out += '\n';
  }
  return out;
}

inline std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "n,trials,mean,var,ci_half,scaled_mean,scaled_var,seconds\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.trials) + ',' + format(r.mean) + ',' + format(r.var) + ',' +
           format(r.ci_half) + ',' + format(r.scaled_mean) + ',' + format(r.scaled_var) + ',' + format(r.seconds) + '\n';
  }
  return out;
}

/// Writes through a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw Error(ErrorKind::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename into '" + path.string() + "': " + ec.message());
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> column(const std::string& name) const {
    std::size_t idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) idx = i;
    }
    if (idx == header.size()) throw Error(ErrorKind::ConfigError, "no column '" + name + "'");
    std::vector<double> out;
    for (const auto& row : rows) {
      if (idx >= row.size()) throw Error(ErrorKind::ConfigError, "short row in CSV");
      try {
        out.push_back(std::stod(row[idx]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigError, "non-numeric entry '" + row[idx] + "' in column '" + name + "'");
      }
    }
    return out;
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot read '" + path.string() + "'");
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (first) throw Error(ErrorKind::ConfigError, "empty CSV '" + path.string() + "'");
  return t;
}

}  // namespace randpoly::csv
