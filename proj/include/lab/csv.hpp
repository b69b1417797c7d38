#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lab {

// Column-named numeric table; the interchange format for every experiment.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

// Writes with %.17g so identical runs are byte-identical. Write-then-rename.
void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

void write_text_atomic(const std::string& text,
                       const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace lab
