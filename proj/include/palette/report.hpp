#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "palette/eval.hpp"

namespace palette::eval {

enum class ReportFormat { tabular, structured };

/// Serializes rows deterministically. tabular = CSV with a header row,
/// '.' decimal, shortest round-trip float formatting; structured = JSON
/// nested by strategy then parameter. Throws Errc::empty_report.
std::string emit_report(std::span<const ReportRow> rows, ReportFormat format);

/// Shortest round-trip decimal rendering of a double (locale-independent).
std::string format_double(double v);

}  // namespace palette::eval

namespace palette {

/// Writes via a temporary file in the target directory plus an atomic
/// rename, so failed runs never leave partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace palette
