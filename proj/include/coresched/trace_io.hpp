#pragma once

#include <coresched/engine.hpp>
#include <coresched/learnability.hpp>

#include <string>
#include <string_view>

namespace coresched {

enum class TraceFormat { csv, structured };

TraceFormat trace_format_from_string(std::string_view name);

/// Frozen CSV header for core-scenario/1 traces.
inline constexpr std::string_view kTraceCsvHeader =
    "t,thread_id,fraction,granted_units,processed_units,cumulative_units,true_error,observed_error,status,"
    "switching_time";

/// CSV: one row per (slot, thread), then one outcome row per thread with an
/// empty t, the final error in true_error, and status/switching_time filled.
/// Structured: JSON mirroring Trace; runtime_ms only when asked for.
std::string write_trace(const Trace& trace, TraceFormat format, bool include_runtime = false);
Trace parse_trace(std::string_view structured);

std::string write_verdict(const Verdict& verdict);
Verdict parse_verdict(std::string_view text);

/// Shortest round-trip text for a double.
std::string format_double(double value);

} // namespace coresched
