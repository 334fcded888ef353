#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace eqlab {

/// Shortest round-trip decimal form ("%.17g"); "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double x);

/// A named CSV table. Rows are stored as already formatted fields.
class Table {
 public:
  Table(std::string name, std::vector<std::string> header);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  /// Throws ContractError unless the row has one field per column.
  void add_row(std::vector<std::string> fields);

  /// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote,
  /// CR or LF, quotes doubled.
  std::string to_csv() const;

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Scatter of point clouds or a line plot with a logarithmic y axis.
struct Plot {
  enum class Kind { Scatter, LogLinear };
  std::string name;
  Kind kind = Kind::Scatter;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string render_svg(const Plot& plot);

struct ExperimentReport {
  std::string subcommand;
  nlohmann::json config;  // the parsed config document
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<Plot> plots;
  nlohmann::json notes = nlohmann::json::object();

  bool all_pass() const;
  const Table& table(const std::string& name) const;
  nlohmann::json summary() const;
};

/// Writes summary.json, <table>.csv for each table and, when requested,
/// <plot>.svg. Creates the directory if needed.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir, bool plots);

}  // namespace eqlab
