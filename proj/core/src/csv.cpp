#include "pardyn/csv.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "pardyn/common.hpp"

namespace pardyn {

std::string format_sci(double v) { return fmt::format("{:.5e}", v); }

std::string csv_to_string(const CsvTable& table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += row[i];
    }
    out.push_back('\n');
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(fmt::format("cannot open '{}' for writing", path));
  const std::string body = csv_to_string(table);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw FormatError(fmt::format("failed writing '{}'", path));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  if (first) throw FormatError("CSV body has no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_csv(buf.str());
}

bool csv_equal_masked(const std::string& a, const std::string& b) {
  CsvTable ta, tb;
  try {
    ta = parse_csv(a);
    tb = parse_csv(b);
  } catch (const FormatError&) {
    return false;
  }
  if (ta.header != tb.header) return false;
  if (ta.rows.size() != tb.rows.size()) return false;
  std::vector<bool> masked(ta.header.size(), false);
  for (std::size_t c = 0; c < ta.header.size(); ++c) {
    const std::string& name = ta.header[c];
    masked[c] = name.size() >= 2 && name.compare(name.size() - 2, 2, "_s") == 0;
  }
  for (std::size_t r = 0; r < ta.rows.size(); ++r) {
    const auto& ra = ta.rows[r];
    const auto& rb = tb.rows[r];
    if (ra.size() != rb.size() || ra.size() != ta.header.size()) return false;
    for (std::size_t c = 0; c < ra.size(); ++c) {
      if (!masked[c] && ra[c] != rb[c]) return false;
    }
  }
  return true;
}

}  // namespace pardyn
