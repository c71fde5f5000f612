#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rvroot/array_model.hpp"
#include "rvroot/estimator.hpp"

namespace rvroot {

enum class SweepVariable { snr_db, snapshots };

std::string to_string(SweepVariable v);

/// Estimates farther than this from the tracked angle count as gross errors.
inline constexpr double kGatingWindowDeg = 10.0;

struct SweepSpec {
    Scenario base;
    SweepVariable variable = SweepVariable::snr_db;
    std::vector<double> values;  ///< strictly increasing
    int trials = 1000;
    double tracked_source_deg = 30.0;

    void validate() const;
    /// base with the sweep variable set to `value`.
    Scenario scenario_at(double value) const;
};

struct TrialRecord {
    bool failed = false;
    std::string failure;            ///< reason when failed
    double estimate_deg = 0.0;      ///< kept estimate nearest the tracked source
    double mirror_deg = 0.0;        ///< rejected estimate nearest its mirror
    double sq_error_true_deg2 = 0.0;
    double sq_error_mirror_deg2 = 0.0;
    bool theory_ok = false;
    double theory_mse_true_rad2 = 0.0;
    double theory_mse_mirror_rad2 = 0.0;
    double predicted_dtheta_rad = 0.0;  ///< first-order prediction for this noise draw
    double predicted_dphi_rad = 0.0;
};

struct SweepRow {
    double sweep_value = 0.0;
    double rmse_true_emp_deg = 0.0;
    double rmse_true_theory_deg = 0.0;
    double rmse_mirror_emp_deg = 0.0;
    double rmse_mirror_theory_deg = 0.0;
    int trials_used = 0;
    int failures = 0;
    bool flagged = false;  ///< failures above 10% of trials
};

/// One Monte Carlo trial. The random stream is make_stream(scenario.seed,
/// trial_index); sources are drawn first, then noise. Estimation failures and
/// gross errors are reported through `failed`, never thrown.
TrialRecord run_trial(const Scenario& scenario, double tracked_source_deg, std::uint64_t trial_index);

/// Reduces trial records (in the given order) to one row.
SweepRow aggregate(double sweep_value, const std::vector<TrialRecord>& trials);

/// Runs every (value, trial) pair on up to `workers` threads (0 = hardware
/// concurrency). Aggregation is in trial-index order, so the rows do not
/// depend on the worker count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned workers = 0);

enum class RootClass { true_root, mirror, extraneous, real_axis };

std::string to_string(RootClass c);

struct LocusPoint {
    double re = 0.0;
    double im = 0.0;
    RootClass cls = RootClass::extraneous;
};

struct RootLocus {
    std::vector<LocusPoint> roots;   ///< finite roots of q(z)
    int roots_at_infinity = 0;
    std::vector<LocusPoint> unit_circle;  ///< reference curve, class unused
    RootDiagnostics diagnostics;
};

/// Noiseless roots for sources at `angles_deg`, using the asymptotic
/// covariance A A^H (the noise subspace of Re(R) does not depend on the
/// source waveforms once they are full rank).
RootLocus root_locus(const UlaConfig& array, const std::vector<double>& angles_deg, int circle_points = 361);

} // namespace rvroot
