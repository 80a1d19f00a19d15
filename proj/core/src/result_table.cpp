#include "posauth/result_table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "posauth/error.hpp"
#include "posauth/text.hpp"

#ifndef POSAUTH_VERSION
#define POSAUTH_VERSION "unknown"
#endif

namespace posauth {

std::string code_version() { return POSAUTH_VERSION; }

ResultTable::ResultTable(std::string kind, std::vector<std::string> columns,
                         Provenance provenance)
    : kind_(std::move(kind)), columns_(std::move(columns)), provenance_(std::move(provenance)) {
  if (columns_.empty()) throw InvalidArgument("result table needs at least one column");
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw InvalidArgument("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

double ResultTable::number(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row).at(column_index(column));
  if (const double* v = std::get_if<double>(&c)) return *v;
  throw InvalidArgument("column '" + column + "' is not numeric");
}

const std::string& ResultTable::text(std::size_t row, const std::string& column) const {
  const Cell& c = rows_.at(row).at(column_index(column));
  if (const std::string* v = std::get_if<std::string>(&c)) return *v;
  throw InvalidArgument("column '" + column + "' is not text");
}

ResultTable ResultTable::project(const std::string& kind,
                                 const std::vector<std::string>& columns) const {
  std::vector<std::size_t> index;
  for (const auto& c : columns) index.push_back(column_index(c));
  ResultTable out(kind, columns, provenance_);
  for (const auto& row : rows_) {
    std::vector<Cell> cells;
    for (std::size_t i : index) cells.push_back(row[i]);
    out.add_row(std::move(cells));
  }
  return out;
}

void ResultTable::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << columns_[i];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (const double* v = std::get_if<double>(&row[i])) {
        out << format_double(*v);
      } else {
        out << std::get<std::string>(row[i]);
      }
    }
    out << '\n';
  }
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string ResultTable::metadata_json() const {
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << provenance_.config_hash;
  const nlohmann::json j = {{"kind", kind_},
                            {"columns", columns_},
                            {"rows", rows_.size()},
                            {"config_hash", hash.str()},
                            {"seed", provenance_.seed},
                            {"code_version", provenance_.code_version}};
  return j.dump(1);
}

void ResultTable::save(const std::filesystem::path& csv_path) const {
  write_csv(csv_path);
  std::filesystem::path meta = csv_path;
  meta.replace_extension(".meta.json");
  std::ofstream out(meta, std::ios::binary);
  if (!out) throw IoError("cannot open '" + meta.string() + "' for writing");
  out << metadata_json() << '\n';
}

}  // namespace posauth
