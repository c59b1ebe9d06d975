#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "treeinv/stats.hpp"

namespace treeinv {

/// Shortest decimal that reads back to the same double.
std::string format_number(double x);

/// 16-hex-digit FNV-1a digest of the compact JSON text.
std::string json_digest(const nlohmann::json& j);

/// CSV with a leading "# {json}" metadata line, then `replicate,value`.
void write_samples_csv(std::ostream& out, const SampleSet& s);

/// CSV of several equally long columns, indexed by replicate.
void write_columns_csv(std::ostream& out, const nlohmann::json& meta, const std::vector<std::string>& names,
                       const std::vector<const std::vector<double>*>& columns);

/// Reads a CSV written by write_samples_csv or write_columns_csv. `column` selects a
/// column by name; empty means "value", or else the second column.
SampleSet read_samples_csv(const std::string& path, const std::string& column = {});

/// Writes to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

}  // namespace treeinv
