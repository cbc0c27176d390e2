#include "fowt/csv.hpp"

#include <charconv>
#include <istream>

#include "fowt/error.hpp"

namespace fowt::csv {

std::string format(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {
std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& cell, const std::string& context) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, v);
  require(res.ec == std::errc() && res.ptr == last, ErrorKind::Input,
          "cannot parse '" + cell + "' as a number (" + context + ")");
  return v;
}

int to_int(const std::string& cell, const std::string& context) {
  int v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, v);
  require(res.ec == std::errc() && res.ptr == last, ErrorKind::Input,
          "cannot parse '" + cell + "' as an integer (" + context + ")");
  return v;
}

Table read(std::istream& is) {
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    if (!have_header) {
      t.header = split(line);
      have_header = true;
    } else {
      t.rows.push_back(split(line));
    }
  }
  require(have_header, ErrorKind::Input, "empty CSV input");
  return t;
}

std::size_t column(const Table& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == name) return i;
  throw Error(ErrorKind::Input, "CSV column '" + name + "' not found");
}

}  // namespace fowt::csv
