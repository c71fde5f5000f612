#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rvroot/config.hpp"
#include "rvroot/errors.hpp"
#include "rvroot/report_io.hpp"

using namespace rvroot;

namespace {

std::string error_of(const std::string& text) {
    RunConfig cfg;
    try {
        parse_config_text(cfg, text, "cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "rvroot_test_io";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config text parses every key") {
    RunConfig cfg;
    parse_config_text(cfg,
                      "# SNR sweep\n"
                      "elements = 8\n"
                      "spacing_ratio = 0.45\n"
                      "angles_deg = 20, -35.5\n"
                      "snapshots = 64\n"
                      "snr_db = 0:2:20   # sweep\n"
                      "seed = 18446744073709551615\n"
                      "trials = 50\n"
                      "tracked_source_deg = -35.5\n"
                      "output_path = out.csv\n"
                      "format = csv\n"
                      "workers = 3\n",
                      "cfg");
    CHECK(cfg.array.elements == 8);
    CHECK(cfg.array.spacing_ratio == 0.45);
    CHECK(cfg.angles_deg == std::vector<double>{20.0, -35.5});
    CHECK(cfg.snapshots == 64);
    REQUIRE(cfg.sweep_values.size() == 11);
    CHECK(cfg.sweep_values.back() == 20.0);
    CHECK(cfg.sweep_variable == SweepVariable::snr_db);
    CHECK(cfg.seed == 18446744073709551615ULL);
    CHECK(cfg.trials == 50);
    CHECK(*cfg.tracked_source_deg == -35.5);
    CHECK(cfg.output_path == "out.csv");
    CHECK(cfg.workers == 3u);
}

TEST_CASE("config errors name the line and field") {
    CHECK(error_of("elements = 9\nbogus = 1\n").find("cfg:2") != std::string::npos);
    CHECK(error_of("elements = 9\nbogus = 1\n").find("bogus") != std::string::npos);
    CHECK(error_of("elements = nine\n").find("cfg:1 (elements)") != std::string::npos);
    CHECK(error_of("elements = 9\nelements = 10\n").find("set twice") != std::string::npos);
    CHECK(error_of("noise_power = 0.1\nsnr_db = 10\n").find("mutually exclusive") != std::string::npos);
    CHECK(error_of("snr_db = 0:0:20\n").find("step") != std::string::npos);
    CHECK(error_of("snr_db = 0:2\n").find("start:step:stop") != std::string::npos);
    CHECK(error_of("angles_deg = 10,,20\n").find("empty") != std::string::npos);
    CHECK(error_of("just words\n").find("key = value") != std::string::npos);
    CHECK(error_of("format = json\n").find("csv") != std::string::npos);
    CHECK(error_of("sweep_variable = time\n").find("snr_db or snapshots") != std::string::npos);
    CHECK(error_of("trials = 1e3\n").find("integer") != std::string::npos);
    CHECK(error_of("").empty());
}

TEST_CASE("ranges and lists") {
    CHECK(parse_number_list("32,64,128") == std::vector<double>{32.0, 64.0, 128.0});
    CHECK(parse_number_list("5") == std::vector<double>{5.0});
    CHECK(parse_number_list("20:-5:0") == std::vector<double>{20.0, 15.0, 10.0, 5.0, 0.0});
    CHECK(parse_number_list("0:0.1:0.3").size() == 4);
}

TEST_CASE("flags override the file and the canonical text round-trips") {
    RunConfig cfg;
    parse_config_text(cfg, "elements = 9\nsnr_db = 10\nangles_deg = 30,50\n", "cfg");
    apply_setting(cfg, "elements", "10", "--elements");
    apply_setting(cfg, "noise_power", "0.5", "--noise-power");
    CHECK(cfg.array.elements == 10);
    CHECK(cfg.resolved_noise_power() == 0.5);
    cfg.sweep_variable = SweepVariable::snapshots;
    cfg.sweep_values = {32, 64};

    RunConfig back;
    parse_config_text(back, format_config(cfg), "canonical");
    CHECK(format_config(back) == format_config(cfg));
    CHECK(back.array.elements == 10);
    CHECK(back.resolved_noise_power() == 0.5);
    CHECK(back.sweep_values == cfg.sweep_values);
}

TEST_CASE("invalid scenarios become config errors") {
    RunConfig cfg;
    cfg.angles_deg = {30.0, -30.0};
    CHECK_THROWS_AS(to_scenario(cfg), ConfigError);
    cfg.angles_deg = {30.0};
    CHECK_NOTHROW(to_scenario(cfg));
    CHECK_THROWS_AS(to_sweep_spec(cfg), ConfigError);  // no sweep values
    cfg.sweep_values = {0, 10};
    const SweepSpec spec = to_sweep_spec(cfg);
    CHECK(spec.tracked_source_deg == 30.0);
}

TEST_CASE("sweep CSV layout") {
    RunConfig cfg;
    cfg.snr_db = 10.0;
    SweepRow r;
    r.sweep_value = 32;
    r.rmse_true_emp_deg = 0.123456789123;
    r.rmse_true_theory_deg = 1.0 / 3.0;
    r.trials_used = 999;
    r.failures = 1;
    const std::string csv = sweep_csv({r, r}, SweepVariable::snapshots, run_metadata(cfg, "sweep"));
    CHECK(csv.find('\r') == std::string::npos);
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    std::size_t i = 0;
    while (i < lines.size() && lines[i][0] == '#') ++i;
    REQUIRE(i + 3 == lines.size());
    CHECK(lines[i] ==
          "sweep_variable,sweep_value,rmse_true_emp_deg,rmse_true_theory_deg,rmse_mirror_emp_deg,"
          "rmse_mirror_theory_deg,trials_used,failures");
    CHECK(lines[i + 1] == "snapshots,32,0.123456789,0.333333333,0,0,999,1");
    CHECK(csv.find("# seed: 1") != std::string::npos);
    CHECK(csv.find("gating_window_deg: 10") != std::string::npos);
    CHECK(csv.find("# config: snr_db = 10") != std::string::npos);
    CHECK(csv_body(csv).rfind("sweep_variable,", 0) == 0);
}

TEST_CASE("root diagnostics JSON round trip") {
    RootDiagnostics d;
    d.all_roots = {{0.5, 0.25}, {-1.5, 0.0}};
    d.roots_at_infinity = 2;
    d.selected_true = {{0.6, 0.8}};
    d.selected_mirror = {{0.6, -0.8}};
    d.real_axis_pairs = {{-0.5, -2.0}};
    d.leading_coefficient = {3.0, 0.0};
    const RootDiagnostics back = roots_from_json(roots_to_json(d));
    CHECK(back.all_roots == d.all_roots);
    CHECK(back.roots_at_infinity == 2);
    CHECK(back.selected_true == d.selected_true);
    CHECK(back.selected_mirror == d.selected_mirror);
    REQUIRE(back.real_axis_pairs.size() == 1);
    CHECK(back.real_axis_pairs[0].outer == -2.0);
    CHECK(back.leading_coefficient == d.leading_coefficient);
    CHECK_THROWS_AS(roots_from_json("{\"all_roots\": 3}"), ConfigError);
}

TEST_CASE("atomic writes replace the target and leave nothing on failure") {
    const auto dir = scratch_dir();
    const auto target = dir / "out.csv";
    write_file_atomic(target.string(), "a\n");
    write_file_atomic(target.string(), "b\n");
    std::ifstream in(target);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "b\n");
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
    }
    CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.csv").string(), "x"), IoError);
    CHECK_FALSE(std::filesystem::exists(dir / "missing"));
    std::filesystem::remove_all(dir);
}
