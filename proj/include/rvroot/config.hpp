#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvroot/array_model.hpp"
#include "rvroot/experiments.hpp"

namespace rvroot {

/// Flat key = value run configuration. Keys:
///   elements, spacing_ratio, angles_deg, snapshots, noise_power, snr_db,
///   seed, sweep_variable, sweep_values, trials, tracked_source_deg,
///   output_path, format, workers
/// Lists are comma separated; ranges are start:step:stop (inclusive).
/// An snr_db range also sets sweep_variable = snr_db and sweep_values.
struct RunConfig {
    UlaConfig array;
    std::vector<double> angles_deg{30.0, 50.0};
    int snapshots = 200;
    std::optional<double> noise_power;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
    SweepVariable sweep_variable = SweepVariable::snr_db;
    std::vector<double> sweep_values;
    int trials = 1000;
    std::optional<double> tracked_source_deg;
    std::string output_path;
    std::string format = "csv";
    unsigned workers = 0;

    /// sigma_n^2 from snr_db or noise_power (0 when neither is set).
    double resolved_noise_power() const;
};

/// Parses "a,b,c", "start:step:stop", or a single number.
std::vector<double> parse_number_list(std::string_view text);

/// Sets one key. `where` prefixes error messages ("line 4", "--angles").
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where);

/// Applies every line of `text` on top of `cfg`. '#' starts a comment.
/// Unknown or repeated keys, and noise_power together with snr_db, are errors.
void parse_config_text(RunConfig& cfg, std::string_view text, const std::string& source_name);

void load_config_file(RunConfig& cfg, const std::string& path);

/// Canonical key = value text of every setting that influences results
/// (output_path and workers are omitted). Parses back to the same run.
std::string format_config(const RunConfig& cfg);

/// Validated scenario; throws ConfigError.
Scenario to_scenario(const RunConfig& cfg);

/// Validated sweep; throws ConfigError.
SweepSpec to_sweep_spec(const RunConfig& cfg);

} // namespace rvroot
