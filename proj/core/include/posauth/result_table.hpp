#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace posauth {

using Cell = std::variant<std::string, double>;

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string code_version;
};

/// Tabular experiment output. Rows must match the column count.
class ResultTable {
 public:
  ResultTable(std::string kind, std::vector<std::string> columns, Provenance provenance);

  void add_row(std::vector<Cell> row);

  const std::string& kind() const { return kind_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t column_index(const std::string& name) const;
  double number(std::size_t row, const std::string& column) const;
  const std::string& text(std::size_t row, const std::string& column) const;

  /// Table restricted to the named columns, in the given order.
  ResultTable project(const std::string& kind, const std::vector<std::string>& columns) const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
  std::string metadata_json() const;
  /// Writes the CSV and a `<name>.meta.json` provenance sidecar.
  void save(const std::filesystem::path& csv_path) const;

 private:
  std::string kind_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  Provenance provenance_;
};

std::string code_version();

}  // namespace posauth
