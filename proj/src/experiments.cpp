#include "rvroot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "rvroot/errors.hpp"
#include "rvroot/perturbation.hpp"

namespace rvroot {

namespace {

constexpr double kFlagFraction = 0.1;
constexpr double kLocusMatchTol = 1e-5;

// Index of the entry nearest `target`, or npos when the list is empty.
std::size_t nearest(const std::vector<double>& values, double target) {
    std::size_t best = values.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dist = std::abs(values[i] - target);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return best;
}

} // namespace

std::string to_string(SweepVariable v) {
    return v == SweepVariable::snr_db ? "snr_db" : "snapshots";
}

std::string to_string(RootClass c) {
    switch (c) {
    case RootClass::true_root: return "true";
    case RootClass::mirror: return "mirror";
    case RootClass::real_axis: return "real_axis";
    case RootClass::extraneous: break;
    }
    return "extraneous";
}

void SweepSpec::validate() const {
    if (trials < 1) throw ContractViolation("trials must be >= 1");
    if (values.empty()) throw ContractViolation("sweep_values must not be empty");
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) throw ContractViolation("sweep_values must be strictly increasing");
    }
    if (variable == SweepVariable::snapshots) {
        for (double v : values) {
            if (v < 1.0 || v != std::floor(v)) {
                throw ContractViolation("snapshot sweep values must be positive integers");
            }
        }
    }
    for (double v : values) scenario_at(v).validate();
    const auto& angles = base.angles_deg;
    if (std::none_of(angles.begin(), angles.end(), [&](double a) { return a == tracked_source_deg; })) {
        throw ContractViolation("tracked_source_deg " + std::to_string(tracked_source_deg) +
                                " is not one of angles_deg");
    }
}

Scenario SweepSpec::scenario_at(double value) const {
    Scenario s = base;
    if (variable == SweepVariable::snr_db) {
        s.noise_power = noise_power_from_snr_db(value);
    } else {
        s.snapshots = static_cast<int>(value);
    }
    return s;
}

TrialRecord run_trial(const Scenario& scenario, double tracked_source_deg, std::uint64_t trial_index) {
    TrialRecord rec;
    RandomStream rng = make_stream(scenario.seed, trial_index);
    const SnapshotData data = synthesize(scenario, rng);

    try {
        const PerturbationModel model(scenario, data.clean);
        const PerturbationReport rep = model.report(data.noise, scenario.noise_power);
        for (const auto& s : rep.sources) {
            if (s.theta_deg != tracked_source_deg) continue;
            rec.theory_ok = true;
            rec.theory_mse_true_rad2 = s.theoretical_mse_true_rad2;
            rec.theory_mse_mirror_rad2 = s.theoretical_mse_mirror_rad2;
            rec.predicted_dtheta_rad = s.predicted_dtheta_rad;
            rec.predicted_dphi_rad = s.predicted_dphi_rad;
        }
    } catch (const Error&) {
        rec.theory_ok = false;
    }

    try {
        const EstimationResult res = estimate(data.observed, scenario.num_sources(), scenario.array);
        const auto& kept = res.estimate.angles_deg;
        const auto& rejected = res.estimate.mirror_angles_deg;
        const std::size_t i = nearest(kept, tracked_source_deg);
        const std::size_t j = nearest(rejected, -tracked_source_deg);
        if (i == kept.size() || j == rejected.size()) throw EstimationFailure("no estimates");
        rec.estimate_deg = kept[i];
        rec.mirror_deg = rejected[j];
        const double e_true = rec.estimate_deg - tracked_source_deg;
        const double e_mirror = rec.mirror_deg + tracked_source_deg;
        if (std::abs(e_true) > kGatingWindowDeg || std::abs(e_mirror) > kGatingWindowDeg) {
            rec.failed = true;
            rec.failure = "gross error beyond the gating window";
            return rec;
        }
        rec.sq_error_true_deg2 = e_true * e_true;
        rec.sq_error_mirror_deg2 = e_mirror * e_mirror;
    } catch (const Error& e) {
        rec.failed = true;
        rec.failure = e.what();
    }
    return rec;
}

SweepRow aggregate(double sweep_value, const std::vector<TrialRecord>& trials) {
    SweepRow row;
    row.sweep_value = sweep_value;
    double se_true = 0.0, se_mirror = 0.0, th_true = 0.0, th_mirror = 0.0;
    int theory_count = 0;
    for (const auto& t : trials) {
        if (t.theory_ok) {
            th_true += t.theory_mse_true_rad2;
            th_mirror += t.theory_mse_mirror_rad2;
            ++theory_count;
        }
        if (t.failed) {
            ++row.failures;
            continue;
        }
        se_true += t.sq_error_true_deg2;
        se_mirror += t.sq_error_mirror_deg2;
        ++row.trials_used;
    }
    if (row.trials_used > 0) {
        row.rmse_true_emp_deg = std::sqrt(se_true / row.trials_used);
        row.rmse_mirror_emp_deg = std::sqrt(se_mirror / row.trials_used);
    } else {
        row.rmse_true_emp_deg = row.rmse_mirror_emp_deg = std::numeric_limits<double>::quiet_NaN();
    }
    if (theory_count > 0) {
        row.rmse_true_theory_deg = rad_to_deg(std::sqrt(th_true / theory_count));
        row.rmse_mirror_theory_deg = rad_to_deg(std::sqrt(th_mirror / theory_count));
    } else {
        row.rmse_true_theory_deg = row.rmse_mirror_theory_deg = std::numeric_limits<double>::quiet_NaN();
    }
    row.flagged = row.failures > kFlagFraction * static_cast<double>(trials.size());
    return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned workers) {
    spec.validate();
    const std::size_t n_values = spec.values.size();
    const auto n_trials = static_cast<std::size_t>(spec.trials);
    std::vector<Scenario> scenarios;
    for (double v : spec.values) scenarios.push_back(spec.scenario_at(v));

    std::vector<TrialRecord> records(n_values * n_trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job = next.fetch_add(1); job < records.size(); job = next.fetch_add(1)) {
            const std::size_t v = job / n_trials;
            const std::size_t t = job % n_trials;
            records[job] = run_trial(scenarios[v], spec.tracked_source_deg, t);
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, records.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::vector<SweepRow> rows;
    for (std::size_t v = 0; v < n_values; ++v) {
        const auto first = records.begin() + static_cast<std::ptrdiff_t>(v * n_trials);
        const std::vector<TrialRecord> slice(first, first + static_cast<std::ptrdiff_t>(n_trials));
        rows.push_back(aggregate(spec.values[v], slice));
    }
    return rows;
}

RootLocus root_locus(const UlaConfig& array, const std::vector<double>& angles_deg, int circle_points) {
    Scenario s;
    s.array = array;
    s.angles_deg = angles_deg;
    s.validate();
    const int k = s.num_sources();
    const ComplexMatrix a = steering_matrix(array, angles_deg);
    const ComplexMatrix r = a * a.adjoint();
    const SubspaceDecomp decomp = extract_subspaces(real_covariance(r), real_signal_dimension(k));
    const ComplexPolynomial q = build_polynomial(decomp);
    const std::vector<Complex> roots = polynomial_roots(q);

    RootLocus out;
    out.diagnostics = classify_roots(roots, k, array, q.leading());
    out.roots_at_infinity = out.diagnostics.roots_at_infinity;
    auto close_to_any = [](Complex z, const std::vector<Complex>& set) {
        return std::any_of(set.begin(), set.end(), [&](Complex s) { return std::abs(z - s) < kLocusMatchTol; });
    };
    for (const auto& z : roots) {
        LocusPoint p{z.real(), z.imag(), RootClass::extraneous};
        if (close_to_any(z, out.diagnostics.selected_true)) {
            p.cls = RootClass::true_root;
        } else if (close_to_any(z, out.diagnostics.selected_mirror)) {
            p.cls = RootClass::mirror;
        } else {
            for (const auto& pair : out.diagnostics.real_axis_pairs) {
                if (std::abs(z - pair.inner) < kLocusMatchTol * std::max(1.0, std::abs(pair.inner)) ||
                    std::abs(z - pair.outer) < kLocusMatchTol * std::max(1.0, std::abs(pair.outer))) {
                    p.cls = RootClass::real_axis;
                }
            }
        }
        out.roots.push_back(p);
    }
    for (int i = 0; i < circle_points; ++i) {
        const double t = 2.0 * std::numbers::pi * i / std::max(1, circle_points - 1);
        out.unit_circle.push_back({std::cos(t), std::sin(t), RootClass::extraneous});
    }
    return out;
}

} // namespace rvroot
