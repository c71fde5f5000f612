// rvroot: command-line front end for the RV-root-MUSIC estimator.
//
//   rvroot estimate [--details] [--json-roots]
//   rvroot sweep    --out results.csv
//   rvroot roots    --out roots.csv
//   rvroot verify   --level quick|full
//
// Every subcommand reads an optional --config file (key = value lines) and
// then applies flag overrides.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rvroot/config.hpp"
#include "rvroot/errors.hpp"
#include "rvroot/estimator.hpp"
#include "rvroot/experiments.hpp"
#include "rvroot/oracles.hpp"
#include "rvroot/report_io.hpp"

namespace {

enum Exit : int { ok = 0, usage = 1, estimation = 2, verification = 3, io = 4 };

struct Flags {
    std::string config;
    std::string out;
    std::vector<std::pair<std::string, std::string>> overrides;  // key, value in flag order
};

// Registers the shared flags; each value is applied through the config parser.
void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "key = value configuration file");
    cmd->add_option("--out", f.out, "output file (default: output_path, else stdout)");
    const std::pair<const char*, const char*> mapped[] = {
        {"--seed", "seed"},
        {"--trials", "trials"},
        {"--elements", "elements"},
        {"--spacing", "spacing_ratio"},
        {"--angles", "angles_deg"},
        {"--snapshots", "snapshots"},
        {"--snr", "snr_db"},
        {"--noise-power", "noise_power"},
        {"--workers", "workers"},
        {"--sweep-variable", "sweep_variable"},
        {"--sweep-values", "sweep_values"},
        {"--tracked", "tracked_source_deg"},
    };
    for (const auto& [flag, key] : mapped) {
        const std::string k = key;
        cmd->add_option_function<std::string>(
               flag, [&f, k](const std::string& v) { f.overrides.emplace_back(k, v); }, "sets config key " + k)
            ->trigger_on_parse();
    }
}

rvroot::RunConfig resolve(const Flags& f) {
    rvroot::RunConfig cfg;
    if (!f.config.empty()) rvroot::load_config_file(cfg, f.config);
    for (const auto& [key, value] : f.overrides) rvroot::apply_setting(cfg, key, value, "flag for " + key);
    if (!f.out.empty()) cfg.output_path = f.out;
    return cfg;
}

void emit(const rvroot::RunConfig& cfg, const std::string& content) {
    if (cfg.output_path.empty()) {
        std::fwrite(content.data(), 1, content.size(), stdout);
    } else {
        rvroot::write_file_atomic(cfg.output_path, content);
    }
}

std::string fixed6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string join6(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fixed6(v[i]);
    return s;
}

int cmd_estimate(const Flags& f, bool details, bool json_roots) {
    const rvroot::RunConfig cfg = resolve(f);
    const rvroot::Scenario s = rvroot::to_scenario(cfg);
    rvroot::RandomStream rng = rvroot::make_stream(s.seed, 0);
    const rvroot::SnapshotData data = rvroot::synthesize(s, rng);
    const rvroot::EstimationResult res = rvroot::estimate(data.observed, s.num_sources(), s.array);

    if (json_roots) {
        emit(cfg, rvroot::roots_to_json(res.roots) + "\n");
        return ok;
    }
    std::string out = "angles_deg: " + join6(res.estimate.angles_deg) + "\n";
    out += "mirror_deg: " + join6(res.estimate.mirror_angles_deg) + "\n";
    if (res.estimate.ambiguous) out += "note: CBF tie between a candidate and its mirror; kept the positive angle\n";
    for (const auto& w : res.subspaces.warnings) out += "warning: " + w + "\n";
    if (details) {
        out += "eigenvalues:";
        for (Eigen::Index i = 0; i < res.eigenvalues.size(); ++i) out += " " + rvroot::format_g9(res.eigenvalues(i));
        out += "\nroots (re, im, |z|, class):\n";
        const auto& r = res.roots;
        for (const auto& z : r.all_roots) {
            std::string cls = "extraneous";
            for (const auto& t : r.selected_true) {
                if (std::abs(z - t) < 1e-3) cls = "true";
            }
            for (const auto& m : r.selected_mirror) {
                if (std::abs(z - m) < 1e-3) cls = "mirror";
            }
            for (const auto& p : r.real_axis_pairs) {
                if (std::abs(z - p.inner) < 1e-9 || std::abs(z - p.outer) < 1e-9) cls = "real_axis";
            }
            out += "  " + rvroot::format_g9(z.real()) + ", " + rvroot::format_g9(z.imag()) + ", " +
                   rvroot::format_g9(std::abs(z)) + ", " + cls + "\n";
        }
        if (r.roots_at_infinity > 0) out += "  (" + std::to_string(r.roots_at_infinity) + " roots at infinity)\n";
    }
    emit(cfg, out);
    return ok;
}

int cmd_sweep(const Flags& f) {
    rvroot::RunConfig cfg = resolve(f);
    if (cfg.sweep_values.empty()) {
        throw rvroot::ConfigError("sweep needs sweep_values (or an --snr start:step:stop range)");
    }
    const rvroot::SweepSpec spec = rvroot::to_sweep_spec(cfg);
    const std::vector<rvroot::SweepRow> rows = rvroot::run_sweep(spec, cfg.workers);
    const std::string csv = rvroot::sweep_csv(rows, spec.variable, rvroot::run_metadata(cfg, "sweep"));
    emit(cfg, csv);
    if (!cfg.output_path.empty()) {
        std::printf("wrote %zu rows to %s\n", rows.size(), cfg.output_path.c_str());
    }
    return ok;
}

int cmd_roots(const Flags& f, const std::string& circle_path) {
    const rvroot::RunConfig cfg = resolve(f);
    const rvroot::Scenario s = rvroot::to_scenario(cfg);
    const rvroot::RootLocus locus = rvroot::root_locus(s.array, s.angles_deg);
    emit(cfg, rvroot::roots_csv(locus, rvroot::run_metadata(cfg, "roots")));
    if (!circle_path.empty()) rvroot::write_file_atomic(circle_path, rvroot::unit_circle_csv(locus));
    return ok;
}

int cmd_verify(const std::string& level) {
    const auto lv = level == "full" ? rvroot::VerifyLevel::full : rvroot::VerifyLevel::quick;
    bool all = true;
    for (const auto& r : rvroot::run_oracles(lv)) {
        std::printf("%s  %-58s measured %.3e  tolerance %.3e  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.measured, r.tolerance, r.detail.c_str());
        all = all && r.passed;
    }
    std::printf("%s\n", all ? "all oracles passed" : "oracle failures detected");
    return all ? ok : verification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RV-root-MUSIC direction-of-arrival estimation and perturbation analysis"};
    app.set_version_flag("--version", std::string(RVROOT_VERSION));
    app.require_subcommand(1);

    Flags est_flags, sweep_flags, roots_flags;
    bool details = false, json_roots = false;
    std::string circle_path, level = "quick";

    auto* est = app.add_subcommand("estimate", "estimate DOAs for one synthesized data set");
    add_common(est, est_flags);
    est->add_flag("--details", details, "also print the eigen-spectrum and the root table");
    est->add_flag("--json-roots", json_roots, "print the root diagnostics as JSON");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo RMSE sweep over SNR or snapshots");
    add_common(sweep, sweep_flags);

    auto* roots = app.add_subcommand("roots", "noiseless root locus as CSV (re, im, class)");
    add_common(roots, roots_flags);
    roots->add_option("--circle", circle_path, "also write the unit-circle reference curve here");

    auto* verify = app.add_subcommand("verify", "run the self-verification oracles");
    verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*est) return cmd_estimate(est_flags, details, json_roots);
        if (*sweep) return cmd_sweep(sweep_flags);
        if (*roots) return cmd_roots(roots_flags, circle_path);
        if (*verify) return cmd_verify(level);
    } catch (const rvroot::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return usage;
    } catch (const rvroot::ContractViolation& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return usage;
    } catch (const rvroot::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return io;
    } catch (const rvroot::Error& e) {
        std::fprintf(stderr, "estimation failed: %s\n", e.what());
        return estimation;
    }
    return usage;
}
