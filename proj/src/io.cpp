#include "treeinv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace treeinv {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string json_digest(const nlohmann::json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

nlohmann::json sample_meta(const SampleSet& s) {
  const std::string hash = s.params_hash.empty() ? json_digest(s.config) : s.params_hash;
  return {{"statistic", s.statistic}, {"seed", s.seed}, {"params_hash", hash}, {"config", s.config}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_samples_csv(std::ostream& out, const SampleSet& s) {
  out << "# " << sample_meta(s).dump() << "\n";
  out << "replicate,value\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) out << i << ',' << format_number(s.values[i]) << '\n';
}

void write_columns_csv(std::ostream& out, const nlohmann::json& meta, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns) {
  if (names.size() != columns.size()) throw std::invalid_argument("write_columns_csv: names/columns mismatch");
  out << "# " << meta.dump() << "\n";
  out << "replicate";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns[0]->size();
  for (std::size_t i = 0; i < rows; ++i) {
    out << i;
    for (const auto* c : columns) out << ',' << format_number((*c)[i]);
    out << '\n';
  }
}

SampleSet read_samples_csv(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  SampleSet s;
  std::string line;
  std::vector<std::string> header;
  std::size_t col = 1;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      try {
        const auto meta = nlohmann::json::parse(line.substr(1));
        s.statistic = meta.value("statistic", "");
        s.seed = meta.value("seed", std::uint64_t{0});
        s.params_hash = meta.value("params_hash", "");
        s.config = meta.contains("config") ? meta["config"] : meta;
      } catch (const nlohmann::json::exception&) {
        // free-form comment
      }
      continue;
    }
    if (header.empty()) {
      header = split_csv_line(line);
      const std::string want = column.empty() ? "value" : column;
      const auto it = std::find(header.begin(), header.end(), want);
      if (it != header.end()) {
        col = static_cast<std::size_t>(it - header.begin());
      } else if (!column.empty()) {
        throw std::invalid_argument(path + ": no column named \"" + column + "\"");
      } else if (header.size() < 2) {
        throw std::invalid_argument(path + ": expected at least two columns");
      }
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() <= col) throw std::invalid_argument(path + ": short row at line " + std::to_string(line_no));
    double v = 0;
    const auto& cell = cells[col];
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      throw std::invalid_argument(path + ": bad number \"" + cell + "\" at line " + std::to_string(line_no));
    s.values.push_back(v);
  }
  if (header.empty()) throw std::invalid_argument(path + ": missing CSV header");
  if (!column.empty() && s.statistic.empty()) s.statistic = column;
  return s;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("error writing output file: " + path);
}

}  // namespace treeinv
