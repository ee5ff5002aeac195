#pragma once

#include <string>
#include <vector>

namespace pardyn {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Scientific notation with six significant digits; every floating-point cell the
// tools emit goes through this (reruns must be byte-identical).
std::string format_sci(double v);

std::string csv_to_string(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Compares two CSV bodies cell by cell, ignoring the contents (not the presence) of
// timing columns, i.e. header names ending in "_s". Used by the reproducibility
// checks: reruns agree byte-for-byte except for wall-clock cells.
bool csv_equal_masked(const std::string& a, const std::string& b);

}  // namespace pardyn
