#include "csrgame/output.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "csrgame/errors.hpp"

namespace csrgame {

namespace {

std::string number(double value) { return fmt::format("{:.17g}", value); }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, int line, const char* column) {
  try {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("column '{}' has invalid number '{}'", column, field), line, column);
  }
}

}  // namespace

std::string format_csv(const Trajectory& tr) {
  const int T = tr.horizon();
  std::string out = std::string(kCsvHeader) + "\n";
  for (int t = 0; t < T; ++t) {
    const auto& c = tr.controls[t];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", t + 1, number(tr.x[t]),
                       number(c.supplier), number(c.manufacturer), number(c.retailer),
                       number(tr.q[t]), number(tr.p_s[t]), number(tr.p_m[t]), number(tr.p_r[t]),
                       number(tr.u[t]), number(tr.u_prime[t]));
  }
  out += fmt::format("{},{},,,,,{},{},{},{},{}\n", T + 1, number(tr.x[T]), number(tr.p_s[T]),
                     number(tr.p_m[T]), number(tr.p_r[T]), number(tr.u[T]),
                     number(tr.u_prime[T]));
  return out;
}

Trajectory parse_csv(const std::string& text) {
  static constexpr const char* kColumns[] = {"t",   "x",   "i_s", "i_m", "i_r",    "q",
                                             "p_s", "p_m", "p_r", "u",   "u_prime"};
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError("missing or unexpected CSV header", 1);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_fields(line));
    if (rows.back().size() != std::size(kColumns)) {
      throw ParseError(fmt::format("expected {} columns, found {}", std::size(kColumns),
                                   rows.back().size()),
                       static_cast<int>(rows.size()) + 1);
    }
  }
  if (rows.size() < 2) throw ParseError("CSV needs at least one period and the terminal row", 0);

  const int T = static_cast<int>(rows.size()) - 1;
  Trajectory tr = Trajectory::zeros(T);
  for (int r = 0; r <= T; ++r) {
    const auto& f = rows[r];
    const int line_no = r + 2;
    auto value = [&](int column) { return parse_number(f[column], line_no, kColumns[column]); };
    if (static_cast<int>(value(0)) != r + 1) {
      throw ParseError(fmt::format("expected t = {}", r + 1), line_no, "t");
    }
    tr.x[r] = value(1);
    tr.p_s[r] = value(6);
    tr.p_m[r] = value(7);
    tr.p_r[r] = value(8);
    tr.u[r] = value(9);
    tr.u_prime[r] = value(10);
    if (r < T) {
      tr.controls[r] = {value(2), value(3), value(4)};
      tr.q[r] = value(5);
    } else {
      for (int column = 2; column <= 5; ++column) {
        if (!f[column].empty()) {
          throw ParseError("terminal row must leave control fields empty", line_no,
                           kColumns[column]);
        }
      }
    }
  }
  return tr;
}

void emit_csv(const Trajectory& trajectory, const std::filesystem::path& path) {
  write_file(path, format_csv(trajectory));
}

Trajectory read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string format_report(const SolveReport& r) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::string out;
  auto line = [&out](const char* key, const std::string& value) {
    out += fmt::format("{}: {}\n", key, value);
  };
  line("scenario", r.scenario_name);
  line("solver_path", r.solver_path);
  line("horizon_T", std::to_string(r.horizon));
  line("quantity", number(r.quantity));
  line("residual_max", number(r.residual_max));
  line("residual_rms", number(r.residual_rms));
  line("tolerance", number(r.tolerance));
  line("within_tolerance", flag(r.within_tolerance()));
  line("inner_level_delta", number(r.inner_level_delta));
  line("objective_supplier", number(r.objective_supplier));
  line("objective_manufacturer", number(r.objective_manufacturer));
  line("objective_retailer", number(r.objective_retailer));
  line("convexity_warning", flag(r.convexity_warning));
  line("negative_investment_warning", flag(r.negative_investment_warning));
  line("seed", std::to_string(r.seed));
  if (r.oracle) {
    line("oracle_delta", number(r.oracle->max_delta));
    line("oracle_dense_residual_max", number(r.oracle->dense_residual_max));
    line("oracle_retailer_stationarity", number(r.oracle->retailer_stationarity));
    line("oracle_manufacturer_stationarity", number(r.oracle->manufacturer_stationarity));
    line("oracle_supplier_stationarity", number(r.oracle->supplier_stationarity));
  }
  return out;
}

void emit_report(const SolveReport& report, const std::filesystem::path& path) {
  write_file(path, format_report(report));
}

}  // namespace csrgame
