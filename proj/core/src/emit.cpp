#include "lqb/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "json.hpp"
#include "lqb/errors.hpp"

namespace lqb {

namespace {

using nlohmann::ordered_json;

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }
  return {};
}

ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    // Same 12 significant digits as the CSV output.
    return std::strtod(format_number(*d).c_str(), nullptr);
  }
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

ordered_json records(const Table& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json rec = ordered_json::object();
    for (std::size_t i = 0; i < t.columns.size(); ++i) rec[t.columns[i]] = json_cell(row[i]);
    arr.push_back(std::move(rec));
  }
  return arr;
}

ordered_json nested(const Metadata& meta) {
  ordered_json root = ordered_json::object();
  for (const auto& [key, value] : meta) {
    ordered_json* node = &root;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      start = dot + 1;
    }
    (*node)[key.substr(start)] = json_cell(value);
  }
  return root;
}

Cell opt(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{};
}

void check_stream(const std::ostream& os, const std::filesystem::path& path) {
  if (!os) throw std::runtime_error(fmt::format("failed to write '{}'", path.string()));
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw InvalidArgument(fmt::format("unknown format '{}' (expected csv or json)", name));
}

std::string_view extension(Format format) { return format == Format::kJson ? ".json" : ".csv"; }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument(fmt::format("row has {} cells, table has {} columns", row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.12g}", v);
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    os << (i ? "," : "") << table.columns[i];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& table,
                const std::vector<std::pair<std::string, const Table*>>& extra) {
  ordered_json doc = ordered_json::object();
  doc["metadata"] = nested(table.metadata);
  if (!table.columns.empty()) doc["records"] = records(table);
  for (const auto& [name, t] : extra) {
    if (t) doc[name] = records(*t);
  }
  os << doc.dump(2) << '\n';
}

void write_table(std::ostream& os, const Table& table, Format format) {
  if (format == Format::kJson) {
    write_json(os, table);
  } else {
    write_csv(os, table);
  }
}

void write_table(const std::filesystem::path& path, const Table& table, Format format) {
  std::ofstream os(path, std::ios::binary);
  check_stream(os, path);
  write_table(os, table, format);
  os.flush();
  check_stream(os, path);
}

Table sweep_table(const SweepResult& result, bool json_fields) {
  Table t;
  for (std::size_t start = 0; start <= kSweepCsvHeader.size();) {
    std::size_t comma = kSweepCsvHeader.find(',', start);
    if (comma == std::string_view::npos) comma = kSweepCsvHeader.size();
    t.columns.emplace_back(kSweepCsvHeader.substr(start, comma - start));
    start = comma + 1;
  }
  const auto& ms = result.metadata.spec.metrics;
  auto requested = [&](Metric m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); };
  const bool lre = json_fields && requested(Metric::kLambdaSlowReal);
  const bool lim = json_fields && requested(Metric::kLambdaSlowImag);
  if (lre) t.columns.emplace_back("lambda_slow_real");
  if (lim) t.columns.emplace_back("lambda_slow_imag");

  for (const SweepRow& r : result.rows) {
    std::vector<Cell> row{r.n_th, r.omega_over_2pi_mhz, r.delta_over_2pi_mhz, r.epsilon,
                          opt(r.delta), opt(r.delta_slow), opt(r.delta_l2), opt(r.e_s),
                          opt(r.tau_s), opt(r.p_s), opt(r.c_l1), opt(r.s_von),
                          r.overshoot ? Cell{*r.overshoot} : Cell{}, r.status};
    if (lre) row.emplace_back(opt(r.lambda_slow_real));
    if (lim) row.emplace_back(opt(r.lambda_slow_imag));
    t.add_row(std::move(row));
  }
  t.metadata = sweep_metadata(result.metadata, false);
  return t;
}

Table ep_curve_table(const SweepResult& result) {
  Table t;
  t.columns = {"nth_ep", "omega_over_2pi_mhz"};
  for (const EpPoint& e : result.ep_curve) t.add_row({e.n_th, e.omega_over_2pi_mhz});
  return t;
}

Metadata sweep_metadata(const SweepMetadata& meta, bool include_timing) {
  const SweepSpec& s = meta.spec;
  Metadata m;
  m.emplace_back("tool_version", meta.tool_version);
  m.emplace_back("fixed.gamma20_per_us", s.fixed.gamma20);
  m.emplace_back("fixed.gamma21_per_us", s.fixed.gamma21);
  m.emplace_back("fixed.gamma10_per_us", s.fixed.gamma10);
  m.emplace_back("fixed.nth", s.fixed.n_th);
  m.emplace_back("fixed.omega_over_2pi_mhz", angular_to_mhz(s.fixed.omega_rabi));
  m.emplace_back("fixed.delta_over_2pi_mhz", angular_to_mhz(s.fixed.delta));
  m.emplace_back("fixed.e1_ev", s.fixed.e1);
  m.emplace_back("fixed.e2_ev", s.fixed.e2);
  m.emplace_back("fixed.epsilon", s.epsilon);
  int k = 1;
  for (const Axis* a : {&s.axis1, &s.axis2}) {
    const std::string p = fmt::format("axis{}.", k++);
    m.emplace_back(p + "param", std::string(to_string(a->param)));
    m.emplace_back(p + "min", a->min);
    m.emplace_back(p + "max", a->max);
    m.emplace_back(p + "count", static_cast<double>(a->count));
    m.emplace_back(p + "spacing", std::string(to_string(a->spacing)));
  }
  std::string metrics;
  for (Metric x : s.metrics) metrics += (metrics.empty() ? "" : ",") + std::string(to_string(x));
  m.emplace_back("metrics", metrics);
  m.emplace_back("dynamics.t_max_us", s.dynamics.t_max);
  m.emplace_back("dynamics.gap_multiples", s.dynamics.gap_multiples);
  m.emplace_back("dynamics.points", static_cast<double>(s.dynamics.points));
  m.emplace_back("ep_curve", s.ep_curve);
  if (include_timing) {
    m.emplace_back("threads", static_cast<double>(meta.threads));
    m.emplace_back("wall_time_s", meta.wall_time_s);
  }
  return m;
}

void emit(std::ostream& os, const SweepResult& result, Format format, bool include_timing) {
  if (format == Format::kCsv) {
    write_csv(os, sweep_table(result));
    return;
  }
  Table t = sweep_table(result, true);
  t.metadata = sweep_metadata(result.metadata, include_timing);
  const Table ep = ep_curve_table(result);
  if (result.metadata.spec.ep_curve) {
    write_json(os, t, {{"ep_curve", &ep}});
  } else {
    write_json(os, t);
  }
}

void emit(const std::filesystem::path& path, const SweepResult& result, Format format,
          bool include_timing) {
  std::ofstream os(path, std::ios::binary);
  check_stream(os, path);
  emit(os, result, format, include_timing);
  os.flush();
  check_stream(os, path);
}

CsvData read_csv(std::istream& is) {
  CsvData data;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(std::move(cur));
    if (first) {
      data.header = std::move(cells);
      first = false;
    } else {
      data.rows.push_back(std::move(cells));
    }
  }
  return data;
}

std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
  const CsvData data = read_csv(is);
  std::string header;
  for (std::size_t i = 0; i < data.header.size(); ++i) header += (i ? "," : "") + data.header[i];
  if (header != kSweepCsvHeader) throw InvalidArgument("not a sweep CSV: header mismatch");

  auto num = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw InvalidArgument(fmt::format("bad number '{}'", s));
    return v;
  };
  auto onum = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return num(s);
  };

  std::vector<SweepRow> out;
  for (const auto& c : data.rows) {
    if (c.size() != data.header.size()) throw InvalidArgument("sweep CSV row has the wrong cell count");
    SweepRow r;
    r.n_th = num(c[0]);
    r.omega_over_2pi_mhz = num(c[1]);
    r.delta_over_2pi_mhz = num(c[2]);
    r.epsilon = num(c[3]);
    r.delta = onum(c[4]);
    r.delta_slow = onum(c[5]);
    r.delta_l2 = onum(c[6]);
    r.e_s = onum(c[7]);
    r.tau_s = onum(c[8]);
    r.p_s = onum(c[9]);
    r.c_l1 = onum(c[10]);
    r.s_von = onum(c[11]);
    if (c[12] == "true") {
      r.overshoot = true;
    } else if (c[12] == "false") {
      r.overshoot = false;
    } else if (!c[12].empty()) {
      throw InvalidArgument(fmt::format("bad overshoot value '{}'", c[12]));
    }
    r.status = c[13];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lqb
