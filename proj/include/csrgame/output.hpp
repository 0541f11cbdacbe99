#pragma once

#include <filesystem>
#include <string>

#include "csrgame/report.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame {

inline constexpr const char* kCsvHeader = "t,x,i_s,i_m,i_r,q,p_s,p_m,p_r,u,u_prime";

/// One row per period t = 1..T, then a terminal row for t = T+1 carrying the
/// terminal stock, costates and multipliers with the control fields empty.
/// Numbers use 17 significant digits.
std::string format_csv(const Trajectory& trajectory);

/// Inverse of format_csv. Nesting multipliers are not serialized and come
/// back as zeros. Throws ParseError on malformed input.
Trajectory parse_csv(const std::string& text);

void emit_csv(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory read_csv(const std::filesystem::path& path);

/// `key: value` lines in a fixed order. The oracle_* fields appear only when
/// the oracle ran; elapsed time is never written.
std::string format_report(const SolveReport& report);

void emit_report(const SolveReport& report, const std::filesystem::path& path);

}  // namespace csrgame
