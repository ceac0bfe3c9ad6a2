#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

// Drives the installed command-line binary end to end.  QREP_CLI_PATH is
// injected by the build so the tests always exercise the freshly built tool.

namespace {

struct CliResult {
    int code = -1;
    std::string output;  // stdout and stderr interleaved
};

int g_run_counter = 0;

std::filesystem::path scratch_file(const std::string& stem) {
    return std::filesystem::temp_directory_path() /
           ("qrep_cli_" + stem + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(g_run_counter++));
}

CliResult run_cli(const std::string& args) {
    const auto capture = scratch_file("out");
    const std::string cmd = std::string("\"") + QREP_CLI_PATH + "\" " + args +
                            " >" + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
    std::ifstream in(capture);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    std::filesystem::remove(capture);
    return result;
}

std::vector<std::string> data_rows(const std::string& output) {
    std::vector<std::string> rows;
    std::istringstream in(output);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(line);
    }
    return rows;
}

std::vector<double> parse_row(const std::string& row) {
    std::vector<double> values;
    std::istringstream in(row);
    std::string field;
    while (std::getline(in, field, ',')) values.push_back(std::strtod(field.c_str(), nullptr));
    return values;
}

int column_index(const std::string& header, const std::string& name) {
    std::istringstream in(header);
    std::string field;
    int index = 0;
    while (std::getline(in, field, ',')) {
        if (field == name) return index;
        ++index;
    }
    return -1;
}

}  // namespace

TEST_CASE("formulas are addressable by name from the command line") {
    const auto res = run_cli("analytic eq19 --c3 0.03 --pcon 0.1 --L 8");
    REQUIRE(res.code == 0);
    const auto rows = data_rows(res.output);
    REQUIRE(rows.size() == 2);  // header + one record
    const int deficit_col = column_index(rows[0], "deficit");
    const int s_col = column_index(rows[0], "S");
    REQUIRE(deficit_col >= 0);
    REQUIRE(s_col >= 0);
    const auto record = parse_row(rows[1]);
    // (1 + 1/p_con)/2 * (2 L/L0)^2 * c3^2 = 5.5 * 256 * 9e-4
    CHECK(record[(size_t)deficit_col] == doctest::Approx(0.25344).epsilon(1e-12));
    CHECK(record[(size_t)s_col] ==
          doctest::Approx(2.0 * std::sqrt(2.0) * (1.0 - 0.25344)).epsilon(1e-12));
}

TEST_CASE("descriptive formula aliases resolve to the same record") {
    const std::string params = " --r 1e-2 --L 4 --pgen 0.9 --pcon 0.1";
    const auto by_id = run_cli("analytic eq24" + params);
    const auto by_name = run_cli("analytic squeezing_counting" + params);
    REQUIRE(by_id.code == 0);
    REQUIRE(by_name.code == 0);
    // Echoed config differs (the formula name itself), data rows must not.
    CHECK(data_rows(by_id.output) == data_rows(by_name.output));
}

TEST_CASE("exit codes distinguish config, numerical, and validity failures") {
    CHECK(run_cli("analytic no_such_formula").code == 2);
    CHECK(run_cli("simulate --no-such-flag 1").code == 2);
    CHECK(run_cli("simulate --detector heterodyne").code == 2);
    CHECK(run_cli("simulate --cutoff 0").code == 2);
    // Unphysical memory coefficients pass parsing but fail the map checks.
    CHECK(run_cli("simulate --memory_kind generic --b1 3 --b2 1").code == 4);
    // Perturbative result outside its validity window under --strict.
    const auto strict = run_cli("analytic eq19 --ndc 0.5 --pcon 0.6 --L 2 --strict");
    CHECK(strict.code == 4);
    CHECK(strict.output.find("validity") != std::string::npos);
    // Same request without --strict still reports, with a warning comment.
    const auto lax = run_cli("analytic eq19 --ndc 0.5 --pcon 0.6 --L 2");
    CHECK(lax.code == 0);
    CHECK(lax.output.find("# warning") != std::string::npos);
}

TEST_CASE("identical configuration and seed reproduce byte-identical output") {
    const std::string sim = "simulate --r 2e-3 --p_con 0.2 --n 1";
    const auto sim_a = run_cli(sim);
    const auto sim_b = run_cli(sim);
    REQUIRE(sim_a.code == 0);
    CHECK(sim_a.output == sim_b.output);

    const std::string mc = "rate --r 1e-2 --p_con 0.3 --n 2 --trials 20000 --seed 7";
    const auto mc_a = run_cli(mc);
    const auto mc_b = run_cli(mc);
    REQUIRE(mc_a.code == 0);
    CHECK(mc_a.output == mc_b.output);

    const auto reseeded = run_cli("rate --r 1e-2 --p_con 0.3 --n 2 --trials 20000 --seed 8");
    CHECK(reseeded.output != mc_a.output);
}

TEST_CASE("an ideal chain reports the maximal violation at every level") {
    const auto res = run_cli("simulate --r 1e-3 --n 2");
    REQUIRE(res.code == 0);
    const auto rows = data_rows(res.output);
    REQUIRE(rows.size() == 4);
    const int s_col = column_index(rows[0], "S");
    const int q_col = column_index(rows[0], "q_ps");
    REQUIRE(s_col >= 0);
    REQUIRE(q_col >= 0);
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto record = parse_row(rows[i]);
        CHECK(record[(size_t)s_col] == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-5));
        CHECK(record[(size_t)q_col] == doctest::Approx(0.5).epsilon(1e-5));
    }
}

TEST_CASE("config files and flags describe the same run") {
    const auto cfg_path = scratch_file("cfg");
    {
        std::ofstream cfg(cfg_path);
        cfg << "r=5e-3\n"
            << "n=1\n"
            << "p_con=0.3\n"
            << "detector=non_counting\n";
    }
    const auto from_file = run_cli("simulate --config " + cfg_path.string());
    const auto from_flags =
        run_cli("simulate --r 5e-3 --n 1 --p_con 0.3 --detector non_counting");
    REQUIRE(from_file.code == 0);
    CHECK(from_file.output == from_flags.output);

    // Command-line flags override values loaded from the file.
    const auto overridden =
        run_cli("simulate --config " + cfg_path.string() + " --p_con 0.1");
    const auto direct =
        run_cli("simulate --r 5e-3 --n 1 --p_con 0.1 --detector non_counting");
    REQUIRE(overridden.code == 0);
    CHECK(overridden.output == direct.output);
    std::filesystem::remove(cfg_path);
}

TEST_CASE("sweeps preserve the requested point order") {
    const auto res = run_cli(
        "sweep --sweep_param p_con --sweep_values 0.4,0.1,0.2 --r 1e-3 --n 1");
    REQUIRE(res.code == 0);
    const auto rows = data_rows(res.output);
    REQUIRE(rows.size() == 4);
    CHECK(column_index(rows[0], "p_con") == 0);
    CHECK(parse_row(rows[1])[0] == doctest::Approx(0.4));
    CHECK(parse_row(rows[2])[0] == doctest::Approx(0.1));
    CHECK(parse_row(rows[3])[0] == doctest::Approx(0.2));
    // Sweeping an unknown parameter is a configuration error.
    CHECK(run_cli("sweep --sweep_param bogus --sweep_values 1,2").code == 2);
}

TEST_CASE("headers echo the resolved configuration") {
    const auto res = run_cli("simulate --r 4e-3 --n 0 --p_gen 0.25");
    REQUIRE(res.code == 0);
    CHECK(res.output.find("# qrep simulate") != std::string::npos);
    CHECK(res.output.find("# r = 4") != std::string::npos);
    CHECK(res.output.find("# p_gen = 2.5") != std::string::npos);
    CHECK(res.output.find("# detector = counting") != std::string::npos);
}

TEST_CASE("density matrices can be dumped for inspection") {
    const auto dump_path = scratch_file("state");
    const auto res = run_cli("simulate --r 1e-3 --n 0 --dump_state " +
                             dump_path.string());
    REQUIRE(res.code == 0);
    std::ifstream in(dump_path);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    }
    CHECK(line == "ket,bra,re,im");
    bool found_coherence = false;
    while (std::getline(in, line)) {
        if (line.rfind("1-0,0-1,", 0) == 0) {
            const auto fields = parse_row(line.substr(8));
            REQUIRE(fields.size() == 2);
            // The heralded pair is (|01> + |10>)/sqrt 2 up to O(r^2).
            CHECK(fields[0] == doctest::Approx(0.5).epsilon(1e-4));
            CHECK(std::abs(fields[1]) < 1e-12);
            found_coherence = true;
        }
    }
    CHECK(found_coherence);
    std::filesystem::remove(dump_path);
}

TEST_CASE("memory kinds are selectable and misspellings rejected") {
    const auto two_pass =
        run_cli("simulate --memory_kind two_pass --xi 1e-3 --r 1e-3 --n 1");
    CHECK(two_pass.code == 0);
    const auto one_pass =
        run_cli("simulate --memory_kind one_pass --s 0.9 --r 1e-3 --n 1");
    CHECK(one_pass.code == 0);
    CHECK(run_cli("simulate --memory_kind bogus --n 0").code == 2);
}

TEST_CASE("fixed-deficit rate scans solve for the squeezing per length") {
    const auto res = run_cli(
        "rate --fixed-s --p_gen 0.9 --p_con 0.1 --n 2 --trials 2000 --seed 3");
    REQUIRE(res.code == 0);
    const auto rows = data_rows(res.output);
    REQUIRE(rows.size() == 4);
    const int r_col = column_index(rows[0], "r");
    const int s_col = column_index(rows[0], "S");
    REQUIRE(r_col >= 0);
    REQUIRE(s_col >= 0);
    double prev_r = 1.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto record = parse_row(rows[i]);
        CHECK(record[(size_t)r_col] < prev_r);  // longer chains need less squeezing
        prev_r = record[(size_t)r_col];
        CHECK(record[(size_t)s_col] > 2.0);
    }
}

TEST_CASE("output lands in the requested file and matches stdout format") {
    const auto out_path = scratch_file("csv");
    const std::string args = "analytic eq30 --pgen 0.5";
    const auto to_file = run_cli(args + " --output " + out_path.string());
    REQUIRE(to_file.code == 0);
    std::ifstream in(out_path);
    std::ostringstream text;
    text << in.rdbuf();
    const auto on_stdout = run_cli(args);
    CHECK(text.str() == on_stdout.output);
    std::filesystem::remove(out_path);
}
