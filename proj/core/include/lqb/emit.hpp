#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lqb/sweep.hpp"

namespace lqb {

inline constexpr std::string_view kSweepCsvHeader =
    "nth,omega_over_2pi_mhz,delta_over_2pi_mhz,epsilon,delta,delta_slow,delta_l2,e_s_ev,tau_s_us,"
    "p_s_ev_per_us,c_l1,s_von,overshoot,status";

enum class Format { kCsv, kJson };

[[nodiscard]] Format parse_format(std::string_view name);
[[nodiscard]] std::string_view extension(Format format);

/// Empty, number, flag or text.
using Cell = std::variant<std::monostate, double, bool, std::string>;

/// Dotted keys ("fixed.gamma20") become nested objects in JSON.
using Metadata = std::vector<std::pair<std::string, Cell>>;

/// A named-column dataset. Every row has columns.size() cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Metadata metadata;

  void add_row(std::vector<Cell> row);
};

/// 12 significant digits, '.' separator; nan/inf spelled out.
[[nodiscard]] std::string format_number(double v);

/// Header plus one line per row, '\n' terminated. Text cells containing
/// ',' or '"' are quoted.
void write_csv(std::ostream& os, const Table& table);

/// {"metadata": {...}, "records": [{column: value}, ...]} plus any extra
/// named tables as record arrays. Non-finite numbers become null.
void write_json(std::ostream& os, const Table& table,
                const std::vector<std::pair<std::string, const Table*>>& extra = {});

void write_table(std::ostream& os, const Table& table, Format format);
/// Throws std::runtime_error if the file cannot be written.
void write_table(const std::filesystem::path& path, const Table& table, Format format);

/// Rows of the fixed sweep schema. With `json_fields`, lambda_slow_real and
/// lambda_slow_imag are appended when requested.
[[nodiscard]] Table sweep_table(const SweepResult& result, bool json_fields = false);
[[nodiscard]] Table ep_curve_table(const SweepResult& result);
[[nodiscard]] Metadata sweep_metadata(const SweepMetadata& meta, bool include_timing);

/// CSV: the fixed schema only. JSON: records, metadata and the EP curve.
void emit(std::ostream& os, const SweepResult& result, Format format, bool include_timing = false);
void emit(const std::filesystem::path& path, const SweepResult& result, Format format,
          bool include_timing = false);

/// Minimal reader for files produced by write_csv.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] CsvData read_csv(std::istream& is);

/// Inverse of the sweep CSV schema.
[[nodiscard]] std::vector<SweepRow> parse_sweep_csv(std::istream& is);

}  // namespace lqb
