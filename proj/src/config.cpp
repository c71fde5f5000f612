#include "rvroot/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rvroot/errors.hpp"

namespace rvroot {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, const std::string& where) {
    const std::string buf(trim(text));
    if (buf.empty()) throw ConfigError(where + ": expected a number, got an empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(where + ": '" + buf + "' is not a finite number");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view text, const std::string& where) {
    const std::string_view t = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError(where + ": '" + std::string(t) + "' is not a valid integer");
    }
    return v;
}

std::vector<double> parse_list(std::string_view text, const std::string& where) {
    text = trim(text);
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            const auto colon = text.find(':', pos);
            parts.push_back(parse_double(text.substr(pos, colon - pos), where));
            if (colon == std::string_view::npos) break;
            pos = colon + 1;
        }
        if (parts.size() != 3) throw ConfigError(where + ": a range must have the form start:step:stop");
        const double start = parts[0], step = parts[1], stop = parts[2];
        if (step == 0.0 || (stop - start) * step < 0.0) {
            throw ConfigError(where + ": range step must be nonzero and point from start to stop");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1000000) throw ConfigError(where + ": range has too many points");
        for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_double(text.substr(pos, comma - pos), where));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string fmt_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_exact(v[i]);
    }
    return s;
}

bool is_range(std::string_view v) {
    return v.find(':') != std::string_view::npos || v.find(',') != std::string_view::npos;
}

} // namespace

double RunConfig::resolved_noise_power() const {
    if (snr_db) return noise_power_from_snr_db(*snr_db);
    return noise_power.value_or(0.0);
}

std::vector<double> parse_number_list(std::string_view text) {
    return parse_list(text, "list");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where) {
    value = trim(value);
    const std::string at = where + " (" + std::string(key) + ")";
    if (key == "elements") {
        cfg.array.elements = parse_int<int>(value, at);
    } else if (key == "spacing_ratio") {
        cfg.array.spacing_ratio = parse_double(value, at);
    } else if (key == "angles_deg") {
        cfg.angles_deg = parse_list(value, at);
    } else if (key == "snapshots") {
        cfg.snapshots = parse_int<int>(value, at);
    } else if (key == "noise_power") {
        cfg.noise_power = parse_double(value, at);
        cfg.snr_db.reset();
    } else if (key == "snr_db") {
        if (is_range(value)) {
            cfg.sweep_variable = SweepVariable::snr_db;
            cfg.sweep_values = parse_list(value, at);
        } else {
            cfg.snr_db = parse_double(value, at);
            cfg.noise_power.reset();
        }
    } else if (key == "seed") {
        cfg.seed = parse_int<std::uint64_t>(value, at);
    } else if (key == "sweep_variable") {
        if (value == "snr_db") {
            cfg.sweep_variable = SweepVariable::snr_db;
        } else if (value == "snapshots") {
            cfg.sweep_variable = SweepVariable::snapshots;
        } else {
            throw ConfigError(at + ": expected snr_db or snapshots, got '" + std::string(value) + "'");
        }
    } else if (key == "sweep_values") {
        cfg.sweep_values = parse_list(value, at);
    } else if (key == "trials") {
        cfg.trials = parse_int<int>(value, at);
    } else if (key == "tracked_source_deg") {
        cfg.tracked_source_deg = parse_double(value, at);
    } else if (key == "output_path") {
        cfg.output_path = std::string(value);
    } else if (key == "format") {
        if (value != "csv") throw ConfigError(at + ": only format = csv is supported");
        cfg.format = std::string(value);
    } else if (key == "workers") {
        cfg.workers = parse_int<unsigned>(value, at);
    } else {
        throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    }
}

void parse_config_text(RunConfig& cfg, std::string_view text, const std::string& source_name) {
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source_name + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' is set twice");
        const std::string_view value = line.substr(eq + 1);
        if (key == "snr_db" && !is_range(value)) seen.insert("snr_db scalar");
        if (seen.contains("noise_power") && seen.contains("snr_db scalar")) {
            throw ConfigError(where + ": noise_power and snr_db are mutually exclusive");
        }
        apply_setting(cfg, key, value, where);
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    parse_config_text(cfg, ss.str(), path);
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream o;
    o << "elements = " << cfg.array.elements << '\n';
    o << "spacing_ratio = " << fmt_exact(cfg.array.spacing_ratio) << '\n';
    o << "angles_deg = " << join(cfg.angles_deg) << '\n';
    o << "snapshots = " << cfg.snapshots << '\n';
    if (cfg.snr_db) {
        o << "snr_db = " << fmt_exact(*cfg.snr_db) << '\n';
    } else {
        o << "noise_power = " << fmt_exact(cfg.noise_power.value_or(0.0)) << '\n';
    }
    o << "seed = " << cfg.seed << '\n';
    o << "sweep_variable = " << to_string(cfg.sweep_variable) << '\n';
    if (!cfg.sweep_values.empty()) o << "sweep_values = " << join(cfg.sweep_values) << '\n';
    o << "trials = " << cfg.trials << '\n';
    if (cfg.tracked_source_deg) o << "tracked_source_deg = " << fmt_exact(*cfg.tracked_source_deg) << '\n';
    o << "format = " << cfg.format << '\n';
    return o.str();
}

Scenario to_scenario(const RunConfig& cfg) {
    Scenario s;
    s.array = cfg.array;
    s.angles_deg = cfg.angles_deg;
    s.snapshots = cfg.snapshots;
    s.noise_power = cfg.resolved_noise_power();
    s.seed = cfg.seed;
    try {
        s.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
    return s;
}

SweepSpec to_sweep_spec(const RunConfig& cfg) {
    SweepSpec spec;
    spec.base = to_scenario(cfg);
    spec.variable = cfg.sweep_variable;
    spec.values = cfg.sweep_values;
    spec.trials = cfg.trials;
    spec.tracked_source_deg = cfg.tracked_source_deg.value_or(cfg.angles_deg.empty() ? 0.0 : cfg.angles_deg.front());
    try {
        spec.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("invalid sweep: ") + e.what());
    }
    return spec;
}

} // namespace rvroot
