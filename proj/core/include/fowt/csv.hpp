#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fowt::csv {

/// Shortest text that round-trips the double exactly.
std::string format(double value);

/// Splits one CSV line on commas and trims surrounding whitespace of each cell.
std::vector<std::string> split(const std::string& line);

/// Parses a double, throwing fowt::Error(Input) with context on failure.
double to_double(const std::string& cell, const std::string& context);
int to_int(const std::string& cell, const std::string& context);

/// Reads all non-empty lines; the first is returned as the header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read(std::istream& is);

/// Column index of `name` in the header, or throws.
std::size_t column(const Table& table, const std::string& name);

}  // namespace fowt::csv
