#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "omgsim/cli.hpp"

using namespace omgsim;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run omg(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
    static const auto dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("omgsim_cli_test_" + std::to_string(std::rand()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = scratch_dir() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Parses "a,b\n1,2\n" into rows of cells.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

// Cheap variants of every command, for round trips.
const std::vector<std::vector<std::string>> kQuickRuns = {
    {"shelve", "--n-max", "8", "--seq", "mpp", "--n-shelves", "4"},
    {"phase-space", "--n-max", "8", "--samples-per-segment", "4"},
    {"rabi-scan", "--n-max", "8", "--rabi-min-khz", "70", "--rabi-max-khz", "90", "--rabi-step-khz", "10"},
    {"rb", "--depths", "1,8,32", "--circuits-per-depth", "3", "--shots", "5"},
    {"rb", "--qubit", "optical", "--depths", "1,4,8", "--circuits-per-depth", "2", "--n-max", "5"},
    {"suppression", "--n-max", "8", "--shift-min-khz", "500", "--shift-max-khz", "1500", "--shift-step-khz", "500"},
    {"qpt", "--shots-per-setting", "200"},
    {"readout-fidelity"},
    {"thermometry", "--n-samples", "2000", "--release-times-us", "0,20,40", "--fit-min-uk", "2.5", "--fit-max-uk",
     "3.5", "--fit-step-uk", "0.5", "--sideband-nbar", "0.5"},
    {"budget", "--table", "a1"},
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("budget example: ground-MCM ancilla total estimate") {
    const auto r = omg({"budget", "--table", "a2", "--case", "ground-mcm-ancilla"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["command"] == "budget");
    CHECK(doc["result"]["total_estimate_pct"].get<double>() == doctest::Approx(1.8).epsilon(1e-12));
    CHECK(doc["omgsim_result"] == cli::kVersion);
}

TEST_CASE("budget flags the one printed discrepancy as a warning") {
    auto r = omg({"budget", "--table", "a2"});
    CHECK(r.code == 0);
    CHECK(r.err.find("ground-mcm-data") != std::string::npos);
    r = omg({"budget", "--table", "a2", "--strict"});
    CHECK(r.code == cli::kExitStrict);
    r = omg({"budget", "--table", "a2", "--case", "ground-mcm-ancilla", "--strict"});
    CHECK(r.code == 0);
}

TEST_CASE("rabi-scan example: minimum nbar near 80 kHz") {
    const auto r = omg({"rabi-scan", "--trap-khz", "10", "--seq", "mpp", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() > 10);
    CHECK(rows[0] == std::vector<std::string>{"rabi_khz", "transfer_infidelity", "final_nbar"});
    double best_nbar = 1e9, best_rabi = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double nb = std::stod(rows[i][2]);
        if (nb < best_nbar) {
            best_nbar = nb;
            best_rabi = std::stod(rows[i][0]);
        }
    }
    CHECK(best_rabi >= 76.0);
    CHECK(best_rabi <= 84.0);
}

TEST_CASE("rb preset is byte-identical across runs and thread counts") {
    const std::vector<std::string> args{"rb", "--preset", "nuclear-g", "--seed", "7", "--format", "csv"};
    const auto a = omg(args);
    REQUIRE(a.code == 0);
    ::setenv("OMGSIM_THREADS", "3", 1);
    const auto b = omg(args);
    ::unsetenv("OMGSIM_THREADS");
    CHECK(a.out == b.out);
    const auto c = omg({"rb", "--preset", "nuclear-g", "--seed", "8", "--format", "csv"});
    CHECK(c.out != a.out);
}

TEST_CASE("results are written atomically to the output path") {
    const auto path = (scratch_dir() / "budget.json").string();
    const auto r = omg({"budget", "--case", "reset-data", "--output", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto streamed = omg({"budget", "--case", "reset-data"});
    CHECK(slurp(path) == streamed.out);
    CHECK(!std::filesystem::exists(path + ".tmp"));

    const auto bad = omg({"budget", "--output", (scratch_dir() / "no" / "such" / "dir.json").string()});
    CHECK(bad.code == cli::kExitInvalid);
}

TEST_CASE("every emitted JSON result re-validates") {
    for (const auto& args : kQuickRuns) {
        CAPTURE(args[0]);
        const auto r = omg(args);
        REQUIRE(r.code == 0);
        const auto path = write_file(args[0] + "_result.json", r.out);
        const auto v = omg({"validate", path});
        CHECK(v.code == 0);
        CHECK(json::parse(v.out).empty());
        // The echoed config reproduces the run.
        const auto again = omg({args[0], "--config", path});
        CHECK(again.out == r.out);
    }
}

TEST_CASE("CSV output has a header and one row per result line") {
    const auto r = omg({"thermometry", "--n-samples", "1000", "--release-times-us", "0,50", "--fit", "false",
                        "--format", "csv", "--output", "-"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"release_time_us", "recapture", "standard_error"});
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("validate: presets, ranges, unknown keys and parse errors") {
    for (const auto& p : cli::presets()) {
        CAPTURE(p.name);
        json doc = p.config;
        doc["command"] = p.command;
        CHECK(cli::validate_text(doc.dump(2), p.name).empty());
    }

    const auto bad_range = write_file("range.json", "{\n  \"command\": \"rabi-scan\",\n  \"trap_freq_khz\": -1\n}\n");
    auto v = omg({"validate", bad_range});
    CHECK(v.code == cli::kExitInvalid);
    auto diags = json::parse(v.out);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0]["key"] == "trap_freq_khz");
    CHECK(diags[0]["kind"] == "range");
    CHECK(diags[0]["line"] == 3);

    const auto unknown = write_file("unknown.json", "{\"command\": \"shelve\", \"trap_khz\": 10}");
    diags = json::parse(omg({"validate", unknown}).out);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0]["kind"] == "unknown_key");
    CHECK(diags[0]["key"] == "trap_khz");

    const auto broken = write_file("broken.json", "{\n  \"command\": \"shelve\",\n  \"n_max\": ,\n}\n");
    diags = json::parse(omg({"validate", broken}).out);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0]["kind"] == "parse");
    CHECK(diags[0]["line"] == 3);

    const auto no_command = write_file("nocmd.json", "{\"n_max\": 5}");
    CHECK(omg({"validate", no_command}).code == cli::kExitInvalid);
    CHECK(omg({"validate", no_command, "--command", "shelve"}).code == 0);

    const auto types = write_file("types.json", R"({"command": "rb", "shots": 1.5, "qubit": "photonic"})");
    diags = json::parse(omg({"validate", types}).out);
    CHECK(diags.size() == 2);

    const auto order = write_file("order.json", R"({"command": "rabi-scan", "rabi_min_khz": 100, "rabi_max_khz": 50})");
    diags = json::parse(omg({"validate", order}).out);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0]["key"] == "rabi_max_khz");
}

TEST_CASE("run-time validation errors exit 1 with diagnostics") {
    auto r = omg({"shelve", "--n-max", "-3"});
    CHECK(r.code == cli::kExitInvalid);
    CHECK(json::parse(r.err)["diagnostics"][0]["key"] == "n_max");

    r = omg({"shelve", "--set", "bogus=1"});
    CHECK(r.code == cli::kExitInvalid);
    CHECK(json::parse(r.err)["diagnostics"][0]["kind"] == "unknown_key");

    r = omg({"shelve", "--preset", "budget-a2"});
    CHECK(r.code == cli::kExitInvalid);

    r = omg({"shelve", "--format", "text"});
    CHECK(r.code == cli::kExitInvalid);

    r = omg({"budget", "--case", "no-such-case"});
    CHECK(r.code == cli::kExitInvalid);
    CHECK(json::parse(r.err)["error"].get<std::string>().find("no-such-case") != std::string::npos);

    const auto wrong = write_file("wrong_cmd.json", R"({"command": "qpt"})");
    r = omg({"shelve", "--config", wrong});
    CHECK(r.code == cli::kExitInvalid);

    r = omg({"no-such-command"});
    CHECK(r.code == cli::kExitInvalid);
}

TEST_CASE("precedence: defaults, preset, config file, flags") {
    const auto cfg = write_file("prec.json", R"({"command": "rabi-scan", "rabi_step_khz": 20, "n_max": 6})");
    const auto r = omg({"rabi-scan", "--preset", "pi-rabi-scan", "--config", cfg, "--n-max", "7"});
    REQUIRE(r.code == 0);
    const auto c = json::parse(r.out)["config"];
    CHECK(c["seq"] == "pi");             // preset
    CHECK(c["rabi_step_khz"] == 20);     // file
    CHECK(c["n_max"] == 7);              // flag
    CHECK(c["trap_freq_khz"] == 10.0);   // default
    CHECK(!c.contains("output"));
    CHECK(!c.contains("format"));
}

TEST_CASE("--strict promotes warnings to exit 2") {
    const std::vector<std::string> args{"shelve", "--seq", "pi", "--n-max", "4", "--n-shelves", "4"};
    auto r = omg(args);
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: truncation") != std::string::npos);
    auto strict = args;
    strict.push_back("--strict");
    r = omg(strict);
    CHECK(r.code == cli::kExitStrict);
}

TEST_CASE("list presets and text tables") {
    auto r = omg({"--list-presets"});
    CHECK(r.code == 0);
    for (const auto& p : cli::presets()) CHECK(r.out.find(p.name) != std::string::npos);

    r = omg({"budget", "--format", "text"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Total estimate") != std::string::npos);
    CHECK(r.out.find("metastable-mcm-data") != std::string::npos);
}

TEST_CASE("JSON numbers use 17 significant digits and round-trip") {
    const json doc{{"a", 0.1}, {"b", 1.0 / 3.0}, {"c", 5}, {"d", {1e-300, -2.5}}};
    const auto text = cli::format_json(doc);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    const auto back = json::parse(text);
    CHECK(back["a"].get<double>() == 0.1);
    CHECK(back["b"].get<double>() == 1.0 / 3.0);
    CHECK(back["c"].is_number_integer());
    CHECK(back["d"][0].get<double>() == 1e-300);
    CHECK(cli::format_json(back) == text);
}

}  // TEST_SUITE
