#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "onevision/sim/run.hpp"

namespace onevision::sim {

/// RunLog container layout:
///   bytes 0..5   "OVLOG1"
///   u32 LE       header length L
///   L bytes      UTF-8 JSON header: config entries, layout, metrics,
///                diagnostics, realization seed and a block table
///                [{name, start, ticks, dim}]
///   blocks       packed little-endian f64 in block-table order, row-major
///                (tick by tick)
/// Replan traces are not serialized.
inline constexpr std::string_view kLogMagic = "OVLOG1";

std::string encode_log(const RunLog& log);
RunLog decode_log(std::string_view bytes);

void write_log(const std::filesystem::path& path, const RunLog& log);
RunLog read_log(const std::filesystem::path& path);

/// Long-format trajectory export, one row per (tick, source, agent):
/// `tick,source,agent,x0..,z0..,u0..`; u is empty on the final state row.
void write_trajectory_csv(std::ostream& out, const RunLog& log);

/// `%.9g` formatting shared by every CSV writer; NaN prints as `nan`.
std::string format_g9(double value);

}  // namespace onevision::sim
