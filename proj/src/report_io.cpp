#include "rvroot/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "json.hpp"
#include "rvroot/errors.hpp"

#ifndef RVROOT_VERSION
#define RVROOT_VERSION "unknown"
#endif

namespace rvroot {

namespace {

using nlohmann::json;

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json complex_list(const std::vector<Complex>& v) {
    json arr = json::array();
    for (const auto& z : v) arr.push_back(complex_json(z));
    return arr;
}

std::vector<Complex> complex_list_from(const json& j) {
    std::vector<Complex> out;
    for (const auto& e : j) out.push_back(complex_from(e));
    return out;
}

} // namespace

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> run_metadata(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> m;
    m.push_back("rvroot " RVROOT_VERSION);
    m.push_back("command: " + command);
    m.push_back("seed: " + std::to_string(cfg.seed));
    m.push_back("snr_convention: sigma_n^2 = 10^(-snr_db/10), unit-power sources, per complex sample");
    m.push_back("gating_window_deg: " + format_g9(kGatingWindowDeg));
    m.push_back("rmse: empirical over trials inside the gating window; theory averages the closed-form MSE over all trials");
    std::istringstream in(format_config(cfg));
    for (std::string line; std::getline(in, line);) m.push_back("config: " + line);
    return m;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, SweepVariable variable,
                      const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& line : metadata) out += "# " + line + '\n';
    std::string flagged;
    for (const auto& r : rows) {
        if (r.flagged) flagged += (flagged.empty() ? "" : ",") + format_g9(r.sweep_value);
    }
    out += "# flagged_rows (failures > 10%): " + (flagged.empty() ? std::string("none") : flagged) + '\n';
    out += "sweep_variable,sweep_value,rmse_true_emp_deg,rmse_true_theory_deg,rmse_mirror_emp_deg,"
           "rmse_mirror_theory_deg,trials_used,failures\n";
    const std::string name = to_string(variable);
    for (const auto& r : rows) {
        out += name + ',' + format_g9(r.sweep_value) + ',' + format_g9(r.rmse_true_emp_deg) + ',' +
               format_g9(r.rmse_true_theory_deg) + ',' + format_g9(r.rmse_mirror_emp_deg) + ',' +
               format_g9(r.rmse_mirror_theory_deg) + ',' + std::to_string(r.trials_used) + ',' +
               std::to_string(r.failures) + '\n';
    }
    return out;
}

std::string roots_csv(const RootLocus& locus, const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& line : metadata) out += "# " + line + '\n';
    out += "# roots_at_infinity: " + std::to_string(locus.roots_at_infinity) + '\n';
    out += "# reference: unit circle |z| = 1\n";
    out += "re,im,class\n";
    for (const auto& p : locus.roots) {
        out += format_g9(p.re) + ',' + format_g9(p.im) + ',' + to_string(p.cls) + '\n';
    }
    return out;
}

std::string unit_circle_csv(const RootLocus& locus) {
    std::string out = "x,y\n";
    for (const auto& p : locus.unit_circle) out += format_g9(p.re) + ',' + format_g9(p.im) + '\n';
    return out;
}

std::string roots_to_json(const RootDiagnostics& diag) {
    json j;
    j["all_roots"] = complex_list(diag.all_roots);
    j["roots_at_infinity"] = diag.roots_at_infinity;
    j["selected_true"] = complex_list(diag.selected_true);
    j["selected_mirror"] = complex_list(diag.selected_mirror);
    json pairs = json::array();
    for (const auto& p : diag.real_axis_pairs) pairs.push_back({{"inner", p.inner}, {"outer", p.outer}});
    j["real_axis_pairs"] = pairs;
    j["leading_coefficient"] = complex_json(diag.leading_coefficient);
    return j.dump(2);
}

RootDiagnostics roots_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RootDiagnostics d;
        d.all_roots = complex_list_from(j.at("all_roots"));
        d.roots_at_infinity = j.at("roots_at_infinity").get<int>();
        d.selected_true = complex_list_from(j.at("selected_true"));
        d.selected_mirror = complex_list_from(j.at("selected_mirror"));
        for (const auto& p : j.at("real_axis_pairs")) {
            d.real_axis_pairs.push_back({p.at("inner").get<double>(), p.at("outer").get<double>()});
        }
        d.leading_coefficient = complex_from(j.at("leading_coefficient"));
        return d;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("roots json: ") + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
    }
}

std::string csv_body(const std::string& csv) {
    std::size_t pos = 0;
    while (pos < csv.size() && csv[pos] == '#') {
        const auto nl = csv.find('\n', pos);
        if (nl == std::string::npos) return {};
        pos = nl + 1;
    }
    return csv.substr(pos);
}

} // namespace rvroot
