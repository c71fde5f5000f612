#pragma once

#include <string>
#include <vector>

#include "rvroot/config.hpp"
#include "rvroot/estimator.hpp"
#include "rvroot/experiments.hpp"

namespace rvroot {

/// printf "%.9g".
std::string format_g9(double v);

/// '#'-prefixed header lines: version, command, seed, SNR convention,
/// gating window and the canonical config.
std::vector<std::string> run_metadata(const RunConfig& cfg, const std::string& command);

/// Metadata, column header, one line per row. LF line endings.
std::string sweep_csv(const std::vector<SweepRow>& rows, SweepVariable variable,
                      const std::vector<std::string>& metadata);

/// Columns re, im, class; one line per finite root.
std::string roots_csv(const RootLocus& locus, const std::vector<std::string>& metadata);

/// x, y of the unit-circle reference curve.
std::string unit_circle_csv(const RootLocus& locus);

std::string roots_to_json(const RootDiagnostics& diag);
RootDiagnostics roots_from_json(const std::string& text);

/// Writes to a temporary file beside `path`, then renames it over `path`.
/// Throws IoError; no partial file is left behind.
void write_file_atomic(const std::string& path, const std::string& content);

/// Part of a CSV after its '#' lines.
std::string csv_body(const std::string& csv);

} // namespace rvroot
