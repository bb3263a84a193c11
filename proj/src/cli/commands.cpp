#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli_internal.hpp"
#include "omgsim/benchmarking.hpp"
#include "omgsim/budget.hpp"
#include "omgsim/drive.hpp"
#include "omgsim/errors.hpp"
#include "omgsim/parallel.hpp"
#include "omgsim/readout.hpp"
#include "omgsim/rng.hpp"
#include "omgsim/shelving.hpp"
#include "omgsim/tomography.hpp"

namespace omgsim::cli {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDeg = std::numbers::pi / 180.0;

// Substream ids under the root seed, one per random consumer.
enum Stream : std::uint64_t { kCircuits = 1, kNoise = 2, kOutcomes = 3, kData = 4, kModel = 5 };

double num(const json& cfg, const char* key) { return cfg.at(key).get<double>(); }
int integer(const json& cfg, const char* key) { return cfg.at(key).get<int>(); }
std::uint64_t root_seed(const json& cfg) { return cfg.at("rng_seed").get<std::uint64_t>(); }

// ---- shared parameter blocks ------------------------------------------------

ParamSpec trap_param(double fallback = 10.0) {
    return {.key = "trap_freq_khz", .type = ParamType::number, .fallback = fallback, .min = 0.0,
            .min_exclusive = true, .help = "radial trap frequency omega/2pi"};
}
ParamSpec rabi_param(double fallback = 80.0) {
    return {.key = "rabi_khz", .type = ParamType::number, .fallback = fallback, .min = 0.0, .min_exclusive = true,
            .help = "clock Rabi frequency Omega/2pi"};
}
ParamSpec detuning_param() {
    return {.key = "detuning_khz", .type = ParamType::number, .fallback = 0.0, .min = -1e5, .max = 1e5,
            .help = "drive minus transition frequency"};
}
ParamSpec lamb_dicke_param() {
    return {.key = "lamb_dicke", .type = ParamType::number, .fallback = nullptr, .min = 0.0, .max = 5.0,
            .help = "Lamb-Dicke parameter; null derives it from the 578 nm clock photon, 171Yb and the trap"};
}
ParamSpec n_max_param(json fallback = 11) {
    return {.key = "n_max", .type = ParamType::integer, .fallback = std::move(fallback), .min = 1.0, .max = 80.0,
            .help = "highest Fock level kept"};
}
ParamSpec seq_param(const char* fallback) {
    return {.key = "seq", .type = ParamType::string, .fallback = fallback, .choices = {"pi", "corpse90", "mpp"},
            .help = "pulse sequence"};
}
ParamSpec initial_nbar_param(double fallback) {
    return {.key = "initial_nbar", .type = ParamType::number, .fallback = fallback, .min = 0.0, .max = 10.0,
            .help = "thermal occupation of the initial motional state"};
}

DriveParams drive_params(const json& cfg, int n_max) {
    const double w = kTwoPi * num(cfg, "trap_freq_khz") * 1e3;
    DriveParams p;
    p.fock = FockSpace(n_max, w);
    p.rabi = kTwoPi * num(cfg, "rabi_khz") * 1e3;
    if (cfg.contains("detuning_khz")) p.detuning = kTwoPi * num(cfg, "detuning_khz") * 1e3;
    p.lamb_dicke = cfg.at("lamb_dicke").is_null()
                       ? lamb_dicke_parameter(constants::clock_wavelength, constants::yb171_mass, w)
                       : num(cfg, "lamb_dicke");
    return p;
}

PulseSequence sequence(const json& cfg) {
    return PulseSequence::from_label(sequence_label_from_string(cfg.at("seq").get<std::string>()));
}

std::vector<double> linspace_step(double lo, double hi, double step) {
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + i * step;
    return v;
}

Diagnostic order_check(const json& cfg, const char* lo, const char* hi) {
    if (num(cfg, hi) < num(cfg, lo))
        return {hi, "range", std::string("'") + hi + "' must be >= '" + lo + "'", "", 0};
    return {};
}

std::vector<Diagnostic> keep_nonempty(std::initializer_list<Diagnostic> ds) {
    std::vector<Diagnostic> out;
    for (const auto& d : ds)
        if (!d.kind.empty()) out.push_back(d);
    return out;
}

// ---- shelve -----------------------------------------------------------------

CommandOutput run_shelve(const json& cfg) {
    ShelvingConfig sc;
    sc.seq = sequence(cfg);
    sc.params = drive_params(cfg, integer(cfg, "n_max"));
    sc.wait_time = num(cfg, "wait_time_ms") * 1e-3;
    sc.n_shelves = integer(cfg, "n_shelves");
    sc.dephase_between = cfg.at("dephase_between").get<bool>();
    sc.initial_nbar = num(cfg, "initial_nbar");
    const auto res = shelving_error(sc);

    CommandOutput out;
    out.columns = {"shelve_count", "ground_population", "nbar"};
    json counts = json::array(), pops = json::array(), nbars = json::array();
    for (const auto& pt : res.curve) {
        out.rows.push_back({pt.shelve_count, pt.ground_population, pt.nbar});
        counts.push_back(pt.shelve_count);
        pops.push_back(pt.ground_population);
        nbars.push_back(pt.nbar);
    }
    out.result = {{"error_per_shelve", res.error_per_shelve},
                  {"error_per_shelve_stderr", res.error_stderr},
                  {"heating_per_shelve", res.heating_per_shelve},
                  {"heating_per_shelve_stderr", res.heating_stderr},
                  {"max_top_level", res.max_top_level},
                  {"lamb_dicke", sc.params.lamb_dicke},
                  {"curve", {{"shelve_count", counts}, {"ground_population", pops}, {"nbar", nbars}}}};
    out.warnings = res.warnings;
    return out;
}

// ---- phase-space ------------------------------------------------------------

CommandOutput run_phase_space(const json& cfg) {
    const auto params = drive_params(cfg, integer(cfg, "n_max"));
    const auto state = thermal_state(params.fock, num(cfg, "initial_nbar"), Eigen::Vector2cd(1.0, 0.0));
    const auto traj = phase_space_trajectory(state, sequence(cfg), params, integer(cfg, "samples_per_segment"));

    CommandOutput out;
    out.columns = {"t_us", "x", "p"};
    json t = json::array(), x = json::array(), p = json::array();
    for (const auto& pt : traj) {
        out.rows.push_back({pt.t * 1e6, pt.x, pt.p});
        t.push_back(pt.t * 1e6);
        x.push_back(pt.x);
        p.push_back(pt.p);
    }
    out.result = {{"t_us", t}, {"x", x}, {"p", p}, {"lamb_dicke", params.lamb_dicke}};
    if (!traj.empty()) {
        out.result["final_x"] = traj.back().x;
        out.result["final_p"] = traj.back().p;
    }
    return out;
}

// ---- rabi-scan --------------------------------------------------------------

CommandOutput run_rabi_scan(const json& cfg) {
    json base_cfg = cfg;
    base_cfg["rabi_khz"] = num(cfg, "rabi_min_khz");
    const auto base = drive_params(base_cfg, integer(cfg, "n_max"));
    const auto khz = linspace_step(num(cfg, "rabi_min_khz"), num(cfg, "rabi_max_khz"), num(cfg, "rabi_step_khz"));
    std::vector<double> rabi(khz.size());
    std::transform(khz.begin(), khz.end(), rabi.begin(), [](double f) { return kTwoPi * f * 1e3; });
    const auto rows = scan_optimal_rabi(base, rabi, sequence(cfg), default_thread_count());

    CommandOutput out;
    out.columns = {"rabi_khz", "transfer_infidelity", "final_nbar"};
    json r = json::array(), inf = json::array(), nb = json::array();
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.rows.push_back({khz[i], rows[i].transfer_infidelity, rows[i].final_nbar});
        r.push_back(khz[i]);
        inf.push_back(rows[i].transfer_infidelity);
        nb.push_back(rows[i].final_nbar);
        if (rows[i].final_nbar < rows[best].final_nbar) best = i;
    }
    out.result = {{"rabi_khz", r},
                  {"transfer_infidelity", inf},
                  {"final_nbar", nb},
                  {"lamb_dicke", base.lamb_dicke},
                  {"minimum_nbar", {{"rabi_khz", khz[best]},
                                    {"final_nbar", rows[best].final_nbar},
                                    {"transfer_infidelity", rows[best].transfer_infidelity}}}};
    return out;
}

// ---- rb ---------------------------------------------------------------------

json fit_json(const RBFit& f) {
    return {{"A", f.A}, {"p", f.p}, {"B", f.B}, {"sigma_A", f.sigma_A}, {"sigma_p", f.sigma_p},
            {"sigma_B", f.sigma_B}, {"r", f.r}, {"sigma_r", f.sigma_r}, {"flat", f.flat}};
}

CommandOutput run_rb(const json& cfg) {
    const std::uint64_t seed = root_seed(cfg);
    const std::vector<int> depths =
        cfg.at("depths").is_null() ? default_rb_depths() : cfg.at("depths").get<std::vector<int>>();
    const auto circuits =
        generate_rb_sequences(depths, integer(cfg, "circuits_per_depth"), substream_seed(seed, kCircuits));
    RBSimOptions opt;
    opt.shots = integer(cfg, "shots");
    opt.sample_outcomes = cfg.at("sample_outcomes").get<bool>();
    opt.threads = default_thread_count();
    opt.seed = substream_seed(seed, kOutcomes);

    CommandOutput out;
    RBResult res;
    const bool optical = cfg.at("qubit").get<std::string>() == "optical";
    if (optical) {
        const double nbar = num(cfg, "initial_nbar");
        const int n_max = cfg.at("n_max").is_null() ? optical_rb_n_max(nbar) : integer(cfg, "n_max");
        const auto params = drive_params(cfg, n_max);
        const auto ores = simulate_rb_optical(circuits, params, nbar, opt);
        out.result["final_nbar_mean"] = ores.final_nbar_mean;
        out.result["final_nbar_max"] = ores.final_nbar_max;
        out.result["top_level_max"] = ores.top_level_max;
        out.result["n_max"] = n_max;
        out.result["lamb_dicke"] = params.lamb_dicke;
        res = ores;
    } else {
        NoiseModel nm;
        nm.intensity_rms = num(cfg, "intensity_rms_pct") / 100.0;
        nm.site_offset = num(cfg, "site_offset_pct") / 100.0;
        nm.theta_x_deg = num(cfg, "theta_x_deg");
        nm.detuning = kTwoPi * num(cfg, "detuning_khz") * 1e3;
        nm.scatter_rate = num(cfg, "scatter_rate_per_s");
        nm.leakage_fraction = num(cfg, "leakage_fraction");
        nm.rng_seed = substream_seed(seed, kNoise);
        NativeGateSet gs{GateSetKind::nuclear, num(cfg, "gate_duration_us") * 1e-6};
        res = simulate_rb_nuclear(circuits, nm, gs, opt);
    }
    out.columns = {"depth", "success_mean", "success_stderr"};
    for (std::size_t i = 0; i < res.depths.size(); ++i)
        out.rows.push_back({res.depths[i], res.success_mean[i], res.success_stderr[i]});
    out.result["depths"] = res.depths;
    out.result["success_mean"] = res.success_mean;
    out.result["success_stderr"] = res.success_stderr;
    out.result["fit"] = fit_json(res.fit);
    out.result["error_per_clifford"] = res.error_per_clifford;
    out.result["native_gates_per_clifford"] = res.native_gates_per_clifford;
    out.warnings = res.warnings;
    return out;
}

// ---- suppression ------------------------------------------------------------

CommandOutput run_suppression(const json& cfg) {
    const auto params = drive_params(cfg, integer(cfg, "n_max"));
    const auto seq = sequence(cfg);
    const auto shifts = linspace_step(num(cfg, "shift_min_khz"), num(cfg, "shift_max_khz"), num(cfg, "shift_step_khz"));
    std::vector<SuppressionResult> res(shifts.size());
    parallel_for(shifts.size(), default_thread_count(), [&](std::size_t i) {
        res[i] = suppression_error(params.rabi, kTwoPi * shifts[i] * 1e3, seq, params);
    });
    CommandOutput out;
    out.columns = {"shift_khz", "simulated", "lorentzian"};
    json s = json::array(), sim = json::array(), lor = json::array();
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        out.rows.push_back({shifts[i], res[i].simulated, res[i].lorentzian});
        s.push_back(shifts[i]);
        sim.push_back(res[i].simulated);
        lor.push_back(res[i].lorentzian);
    }
    out.result = {{"shift_khz", s}, {"simulated", sim}, {"lorentzian", lor}, {"lamb_dicke", params.lamb_dicke}};
    return out;
}

// ---- qpt --------------------------------------------------------------------

// (1 - p) E(rho) + p I / 2, mixed at the Choi level.
ProcessMatrix depolarized(const ProcessMatrix& ideal, double p) {
    const auto d = ideal.dim();
    return ProcessMatrix::from_choi((1.0 - p) * ideal.choi() + (p / d) * Matrix::Identity(d * d, d * d));
}

CommandOutput run_qpt(const json& cfg) {
    const double t1 = num(cfg, "theta1_deg") * kDeg, t2 = num(cfg, "theta2_deg") * kDeg;
    const ProcessMatrix ideal = ideal_mcm_process(t1, t2);
    TomographyDataset data;
    std::string source;
    if (!cfg.at("dataset_path").is_null()) {
        source = cfg.at("dataset_path").get<std::string>();
        std::ifstream in(source);
        if (!in) throw ConfigError("cannot open tomography dataset: " + source);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw ConfigError("tomography dataset is not valid JSON: " + source);
        data = dataset_from_json(doc);
    } else {
        source = "simulated";
        const auto truth = depolarized(ideal, num(cfg, "depolarizing_p"));
        const int shots = integer(cfg, "shots_per_setting");
        const auto inputs = standard_qubit_inputs();
        const auto settings = pauli_measurement_settings();
        data = shots == 0 ? exact_dataset(truth, inputs, settings)
                          : sampled_dataset(truth, inputs, settings, shots, substream_seed(root_seed(cfg), kData));
        data.survival.assign(inputs.size(), num(cfg, "survival"));
    }
    MleOptions opt{integer(cfg, "max_iter"), num(cfg, "tol")};
    const auto rec = reconstruct_process(data, opt);
    const auto rep = fidelity_report(rec.process, ideal, data);
    const Matrix chi = rec.process.chi();

    CommandOutput out;
    out.columns = {"i", "j", "chi_re", "chi_im"};
    for (Eigen::Index i = 0; i < chi.rows(); ++i)
        for (Eigen::Index j = 0; j < chi.cols(); ++j)
            out.rows.push_back({i, j, chi(i, j).real(), chi(i, j).imag()});
    out.result = {{"source", source},
                  {"process_fidelity", rep.process_fidelity},
                  {"average_fidelity", rep.average_fidelity},
                  {"average_fidelity_loss_scaled", rep.average_fidelity_loss_scaled},
                  {"survival", rep.survival},
                  {"input_fidelities", rep.input_fidelities},
                  {"chi", matrix_to_json(chi)},
                  {"iterations", rec.iterations},
                  {"converged", rec.converged},
                  {"log_likelihood", rec.log_likelihood.empty() ? 0.0 : rec.log_likelihood.back()}};
    out.warnings = rec.warnings;
    return out;
}

// ---- readout-fidelity -------------------------------------------------------

CommandOutput run_readout(const json& cfg) {
    CountsTable table;
    std::string source;
    if (cfg.at("synthetic").get<bool>()) {
        SyntheticReadout syn;
        syn.eps_op = num(cfg, "eps_op_pct") / 100.0;
        syn.eps_inf = num(cfg, "eps_inf_pct") / 100.0;
        syn.eps_iloss = num(cfg, "eps_iloss_pct") / 100.0;
        syn.events_per_state = integer(cfg, "events_per_state");
        table = synthesize_counts(syn, root_seed(cfg));
        source = "synthetic";
    } else {
        source = cfg.at("counts_csv").is_null() ? data_dir() + "/readout_counts.csv"
                                                : cfg.at("counts_csv").get<std::string>();
        table = read_counts_csv(source);
        if (cfg.at("counts_csv").is_null()) source = "bundled";
    }
    table.eps_op = num(cfg, "eps_op_pct") / 100.0;
    table.eps_inf = num(cfg, "eps_inf_pct") / 100.0;
    table.eps_iloss = num(cfg, "eps_iloss_pct") / 100.0;

    HistogramModel hm;
    hm.lambda_bright = num(cfg, "lambda_bright");
    hm.lambda_dark = num(cfg, "lambda_dark");
    hm.bright_prior = num(cfg, "bright_prior");
    hm.threshold = optimize_threshold(hm);
    const auto disc = discrimination_fidelity(hm);

    const auto det = detection_fidelities(table);
    const auto rst = reset_probabilities(table);

    CommandOutput out;
    out.columns = {"quantity", "value", "sigma", "lower", "upper"};
    auto add = [&](const char* name, const Estimate& e) { out.rows.push_back({name, e.value, e.sigma, e.lower, e.upper}); };
    add("detection_g0", det.g0);
    add("detection_g1", det.g1);
    add("reset_g0", rst.g0);
    add("reset_g1", rst.g1);
    out.rows.push_back({"discrimination", disc.fidelity, 0.0, disc.fidelity, disc.fidelity});

    json counts = json::object();
    const char* names[] = {"bb", "bd", "db", "dd"};
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < 4; ++k) counts[s == 0 ? "g0" : "g1"][names[k]] = table.counts[s][k];
    out.result = {{"source", source},
                  {"detection", {{"g0", to_json(det.g0)}, {"g1", to_json(det.g1)}}},
                  {"reset", {{"g0", to_json(rst.g0)}, {"g1", to_json(rst.g1)}}},
                  {"discrimination", {{"threshold", hm.threshold},
                                      {"fidelity", disc.fidelity},
                                      {"misid_bright", disc.misid_bright},
                                      {"misid_dark", disc.misid_dark}}},
                  {"counts", counts}};
    out.warnings = det.warnings;
    out.warnings.insert(out.warnings.end(), rst.warnings.begin(), rst.warnings.end());
    return out;
}

// ---- thermometry ------------------------------------------------------------

CommandOutput run_thermometry(const json& cfg) {
    const std::uint64_t seed = root_seed(cfg);
    ThermometryConfig tc;
    tc.trap_depth = kPlanck * num(cfg, "trap_depth_mhz") * 1e6;
    tc.waist = cfg.at("waist_um").is_null() ? 0.0 : num(cfg, "waist_um") * 1e-6;
    tc.wavelength = num(cfg, "wavelength_nm") * 1e-9;
    tc.temperature = num(cfg, "temperature_uk") * 1e-6;
    tc.n_samples = integer(cfg, "n_samples");
    if (!cfg.at("release_times_us").is_null())
        for (double t : cfg.at("release_times_us").get<std::vector<double>>()) tc.release_times.push_back(t * 1e-6);
    tc.gravity = cfg.at("gravity").get<bool>();
    tc.rng_seed = substream_seed(seed, kData);
    tc.threads = default_thread_count();
    tc = tc.resolved();
    const auto data = release_recapture(tc);

    CommandOutput out;
    json t = json::array(), rec = json::array(), se = json::array();
    for (const auto& pt : data) {
        t.push_back(pt.release_time * 1e6);
        rec.push_back(pt.recapture);
        se.push_back(pt.standard_error);
    }
    out.result = {{"release_time_us", t},
                  {"recapture", rec},
                  {"standard_error", se},
                  {"waist_um", tc.waist * 1e6}};
    std::vector<RecapturePoint> model;
    if (cfg.at("fit").get<bool>()) {
        const auto grid_uk = linspace_step(num(cfg, "fit_min_uk"), num(cfg, "fit_max_uk"), num(cfg, "fit_step_uk"));
        std::vector<double> grid(grid_uk.size());
        std::transform(grid_uk.begin(), grid_uk.end(), grid.begin(), [](double x) { return x * 1e-6; });
        ThermometryConfig mc = tc;
        mc.rng_seed = substream_seed(seed, kModel);
        const auto fit = fit_temperature(data, mc, grid);
        mc.temperature = fit.temperature;
        model = release_recapture(mc);
        json curve = json::array();
        for (const auto& pt : model) curve.push_back(pt.recapture);
        out.result["fit"] = {{"temperature_uk", fit.temperature * 1e6},
                             {"resolution_uk", fit.resolution * 1e6},
                             {"grid_uk", grid_uk},
                             {"residual", fit.residual},
                             {"model_recapture", curve}};
    }
    if (!cfg.at("sideband_nbar").is_null()) {
        const double nbar = num(cfg, "sideband_nbar");
        const double w = kTwoPi * num(cfg, "sideband_trap_freq_khz") * 1e3;
        out.result["sideband"] = {{"nbar", nbar},
                                  {"temperature_uk", nbar_to_temperature(nbar, w) * 1e6},
                                  {"temperature_bose_uk", nbar_to_temperature_bose(nbar, w) * 1e6}};
    }
    out.columns = {"release_time_us", "recapture", "standard_error"};
    if (!model.empty()) out.columns.push_back("model_recapture");
    for (std::size_t i = 0; i < data.size(); ++i) {
        out.rows.push_back({data[i].release_time * 1e6, data[i].recapture, data[i].standard_error});
        if (!model.empty()) out.rows.back().push_back(model[i].recapture);
    }
    return out;
}

// ---- budget -----------------------------------------------------------------

CommandOutput run_budget(const json& cfg) {
    const std::string table = cfg.at("table").get<std::string>();
    const std::string ledger = cfg.at("ledger_csv").is_null() ? data_dir() + "/table_" + table + ".csv"
                                                               : cfg.at("ledger_csv").get<std::string>();
    const std::string printed_path = cfg.at("printed_csv").is_null()
                                         ? data_dir() + "/table_" + table + "_printed.csv"
                                         : cfg.at("printed_csv").get<std::string>();
    auto budgets = read_budget_csv(ledger);
    const auto printed = read_printed_csv(printed_path);
    attach_measured(budgets, printed);
    const TotalMode mode = cfg.at("mode").get<std::string>() == "product" ? TotalMode::product : TotalMode::linear;
    const auto reg = regression(budgets, printed);

    std::vector<ErrorBudget> selected = budgets;
    if (!cfg.at("case").is_null()) selected = {find_budget(budgets, cfg.at("case").get<std::string>())};

    CommandOutput out;
    out.columns = {"case", "row", "computed_pct", "printed_pct", "difference_pct", "flagged"};
    json reg_json = json::array();
    for (const auto& r : reg) {
        const bool keep = std::any_of(selected.begin(), selected.end(),
                                      [&](const ErrorBudget& b) { return b.label == r.case_label; });
        if (!keep) continue;
        out.rows.push_back({r.case_label, r.row, r.computed, r.printed, r.difference, r.flagged});
        reg_json.push_back({{"case", r.case_label}, {"row", r.row}, {"computed_pct", r.computed},
                            {"printed_pct", r.printed}, {"difference_pct", r.difference}, {"flagged", r.flagged}});
        if (r.flagged) {
            std::ostringstream os;
            os << "printed " << r.row << " of " << r.case_label << " is " << r.printed << " but its entries sum to "
               << r.computed;
            out.warnings.push_back(os.str());
        }
    }
    if (selected.size() == 1) {
        out.result = to_json(selected.front(), mode);
    } else {
        json cases = json::array();
        for (const auto& b : selected) cases.push_back(to_json(b, mode));
        out.result["cases"] = cases;
    }
    out.result["table"] = table;
    out.result["regression"] = reg_json;
    out.text = render_text_table(selected);
    return out;
}

// ---- specs ------------------------------------------------------------------

std::vector<CommandSpec> build_commands() {
    std::vector<CommandSpec> cmds;

    cmds.push_back({"shelve", "repeated shelving: transfer error and heating per shelve",
                    {trap_param(), rabi_param(), detuning_param(), lamb_dicke_param(), n_max_param(25), seq_param("pi"),
                     {.key = "wait_time_ms", .type = ParamType::number, .fallback = 2.0, .min = 0.0,
                      .help = "wait between shelves"},
                     {.key = "n_shelves", .type = ParamType::integer, .fallback = 10, .min = 2.0, .max = 1000.0,
                      .help = "number of shelving operations"},
                     {.key = "dephase_between", .type = ParamType::boolean, .fallback = true,
                      .help = "dephase spin and motion between shelves"},
                     initial_nbar_param(0.05)},
                    nullptr, run_shelve});

    cmds.push_back({"phase-space", "phase-space trajectory <x>, <p> during a pulse sequence",
                    {trap_param(), rabi_param(), detuning_param(), lamb_dicke_param(), n_max_param(), seq_param("mpp"),
                     {.key = "samples_per_segment", .type = ParamType::integer, .fallback = 40, .min = 2.0,
                      .max = 100000.0, .help = "trajectory samples per pulse segment"},
                     initial_nbar_param(0.0)},
                    nullptr, run_phase_space});

    cmds.push_back({"rabi-scan", "transfer infidelity and final nbar versus Rabi frequency",
                    {trap_param(), detuning_param(), lamb_dicke_param(), n_max_param(), seq_param("mpp"),
                     {.key = "rabi_min_khz", .type = ParamType::number, .fallback = 40.0, .min = 0.0,
                      .min_exclusive = true, .help = "first Rabi frequency"},
                     {.key = "rabi_max_khz", .type = ParamType::number, .fallback = 120.0, .min = 0.0,
                      .min_exclusive = true, .help = "last Rabi frequency"},
                     {.key = "rabi_step_khz", .type = ParamType::number, .fallback = 2.0, .min = 0.0,
                      .min_exclusive = true, .help = "scan step"}},
                    [](const json& c) { return keep_nonempty({order_check(c, "rabi_min_khz", "rabi_max_khz")}); },
                    run_rabi_scan});

    cmds.push_back({"rb", "simulated Clifford randomized benchmarking, nuclear or optical qubit",
                    {{.key = "qubit", .type = ParamType::string, .fallback = "nuclear", .choices = {"nuclear", "optical"},
                      .help = "nuclear: Raman gates with measured noise; optical: clock pulses with motion"},
                     {.key = "depths", .type = ParamType::integer_list, .fallback = nullptr, .min = 0.0,
                      .max = 100000.0, .help = "Clifford depths; null selects 1, 2, 4, ..., 256"},
                     {.key = "circuits_per_depth", .type = ParamType::integer, .fallback = 40, .min = 1.0,
                      .max = 100000.0, .help = "random circuits per depth"},
                     {.key = "shots", .type = ParamType::integer, .fallback = 100, .min = 1.0, .max = 1e7,
                      .help = "noise realisations per circuit"},
                     {.key = "sample_outcomes", .type = ParamType::boolean, .fallback = false,
                      .help = "draw binary outcomes instead of averaging probabilities"},
                     {.key = "gate_duration_us", .type = ParamType::number, .fallback = 100.0, .min = 0.0,
                      .help = "nuclear: native gate duration"},
                     {.key = "intensity_rms_pct", .type = ParamType::number, .fallback = 0.8, .min = 0.0, .max = 100.0,
                      .help = "nuclear: pulse-to-pulse intensity noise"},
                     {.key = "site_offset_pct", .type = ParamType::number, .fallback = 0.3, .min = 0.0, .max = 100.0,
                      .help = "nuclear: intensity inhomogeneity across the array"},
                     {.key = "theta_x_deg", .type = ParamType::number, .fallback = 0.9, .min = 0.0, .max = 10.0,
                      .help = "nuclear: non-orthogonality of the X and Z beams"},
                     detuning_param(),
                     {.key = "scatter_rate_per_s", .type = ParamType::number, .fallback = kDefaultScatterRate,
                      .min = 0.0, .help = "nuclear: depolarising scatter rate"},
                     {.key = "leakage_fraction", .type = ParamType::number, .fallback = 0.0, .min = 0.0, .max = 1.0,
                      .help = "nuclear: fraction of scatter events that lose the atom"},
                     trap_param(), rabi_param(), lamb_dicke_param(), n_max_param(nullptr), initial_nbar_param(0.05)},
                    nullptr, run_rb});

    cmds.push_back({"suppression", "clock excitation under a light shift versus the Lorentzian",
                    {trap_param(), rabi_param(), lamb_dicke_param(), n_max_param(), seq_param("mpp"),
                     {.key = "shift_min_khz", .type = ParamType::number, .fallback = 200.0, .min = 0.0,
                      .help = "smallest light shift"},
                     {.key = "shift_max_khz", .type = ParamType::number, .fallback = 3000.0, .min = 0.0,
                      .help = "largest light shift"},
                     {.key = "shift_step_khz", .type = ParamType::number, .fallback = 100.0, .min = 0.0,
                      .min_exclusive = true, .help = "shift step"}},
                    [](const json& c) { return keep_nonempty({order_check(c, "shift_min_khz", "shift_max_khz")}); },
                    run_suppression});

    cmds.push_back({"qpt", "maximum-likelihood process tomography of the mid-circuit measurement",
                    {{.key = "theta1_deg", .type = ParamType::number, .fallback = 0.0, .min = -360.0, .max = 360.0,
                      .help = "ideal process R_Z(theta1) R_X(pi) R_Z(theta2)"},
                     {.key = "theta2_deg", .type = ParamType::number, .fallback = 0.0, .min = -360.0, .max = 360.0,
                      .help = "see theta1_deg"},
                     {.key = "dataset_path", .type = ParamType::string, .fallback = nullptr,
                      .help = "tomography dataset JSON; null simulates one"},
                     {.key = "depolarizing_p", .type = ParamType::number, .fallback = 0.0373, .min = 0.0, .max = 1.0,
                      .help = "simulated: depolarising strength after the ideal process"},
                     {.key = "survival", .type = ParamType::number, .fallback = 0.9796, .min = 0.0, .max = 1.0,
                      .help = "simulated: atom survival used for the loss-scaled fidelity"},
                     {.key = "shots_per_setting", .type = ParamType::integer, .fallback = 1000, .min = 0.0,
                      .max = 1e9, .help = "simulated: shots per input and setting; 0 uses exact probabilities"},
                     {.key = "max_iter", .type = ParamType::integer, .fallback = 10000, .min = 1.0, .max = 1e7,
                      .help = "MLE iteration cap"},
                     {.key = "tol", .type = ParamType::number, .fallback = 1e-10, .min = 0.0, .min_exclusive = true,
                      .help = "MLE log-likelihood gain tolerance"}},
                    nullptr, run_qpt});

    cmds.push_back({"readout-fidelity", "detection fidelities and reset probabilities from image counts",
                    {{.key = "counts_csv", .type = ParamType::string, .fallback = nullptr,
                      .help = "counts table; null uses the bundled synthetic table"},
                     {.key = "synthetic", .type = ParamType::boolean, .fallback = false,
                      .help = "generate counts from the default rates with rng_seed"},
                     {.key = "events_per_state", .type = ParamType::integer, .fallback = 20000, .min = 1.0,
                      .max = 1e9, .help = "synthetic: events per prepared state"},
                     {.key = "eps_op_pct", .type = ParamType::number, .fallback = 0.28, .min = 0.0, .max = 49.0,
                      .help = "optical pumping error"},
                     {.key = "eps_inf_pct", .type = ParamType::number, .fallback = 0.2, .min = 0.0, .max = 100.0,
                      .help = "image infidelity"},
                     {.key = "eps_iloss_pct", .type = ParamType::number, .fallback = 0.19, .min = 0.0, .max = 100.0,
                      .help = "imaging loss"},
                     {.key = "lambda_bright", .type = ParamType::number, .fallback = 20.0, .min = 0.0,
                      .min_exclusive = true, .help = "mean bright counts"},
                     {.key = "lambda_dark", .type = ParamType::number, .fallback = 1.0, .min = 0.0,
                      .help = "mean dark counts"},
                     {.key = "bright_prior", .type = ParamType::number, .fallback = 0.5, .min = 0.0, .max = 1.0,
                      .help = "prior probability of a bright atom"}},
                    [](const json& c) {
                        std::vector<Diagnostic> d;
                        if (num(c, "lambda_dark") >= num(c, "lambda_bright"))
                            d.push_back({"lambda_dark", "range", "'lambda_dark' must be below 'lambda_bright'", "", 0});
                        return d;
                    },
                    run_readout});

    cmds.push_back({"thermometry", "release-and-recapture curves, temperature fit and sideband temperature",
                    {{.key = "trap_depth_mhz", .type = ParamType::number, .fallback = 8.7, .min = 0.0,
                      .min_exclusive = true, .help = "trap depth U/h"},
                     {.key = "waist_um", .type = ParamType::number, .fallback = nullptr, .min = 0.0,
                      .min_exclusive = true, .help = "tweezer waist; null matches a 58 kHz radial frequency"},
                     {.key = "wavelength_nm", .type = ParamType::number, .fallback = 759.0, .min = 0.0,
                      .min_exclusive = true, .help = "tweezer wavelength"},
                     {.key = "temperature_uk", .type = ParamType::number, .fallback = 3.0, .min = 0.0,
                      .min_exclusive = true, .help = "generating temperature"},
                     {.key = "n_samples", .type = ParamType::integer, .fallback = 100000, .min = 100.0, .max = 1e9,
                      .help = "Monte Carlo atoms per release time"},
                     {.key = "release_times_us", .type = ParamType::number_list, .fallback = nullptr, .min = 0.0,
                      .help = "release times; null selects 0..100 us in 10 us steps"},
                     {.key = "gravity", .type = ParamType::boolean, .fallback = true, .help = "include gravity"},
                     {.key = "fit", .type = ParamType::boolean, .fallback = true,
                      .help = "fit a temperature to the generated curve with an independent model stream"},
                     {.key = "fit_min_uk", .type = ParamType::number, .fallback = 2.0, .min = 0.0,
                      .min_exclusive = true, .help = "fit grid start"},
                     {.key = "fit_max_uk", .type = ParamType::number, .fallback = 4.0, .min = 0.0,
                      .min_exclusive = true, .help = "fit grid end"},
                     {.key = "fit_step_uk", .type = ParamType::number, .fallback = 0.1, .min = 0.0,
                      .min_exclusive = true, .help = "fit grid step"},
                     {.key = "sideband_nbar", .type = ParamType::number, .fallback = nullptr, .min = 0.0,
                      .help = "convert this nbar to a temperature"},
                     {.key = "sideband_trap_freq_khz", .type = ParamType::number, .fallback = 58.0, .min = 0.0,
                      .min_exclusive = true, .help = "trap frequency for the sideband conversion"}},
                    [](const json& c) { return keep_nonempty({order_check(c, "fit_min_uk", "fit_max_uk")}); },
                    run_thermometry});

    cmds.push_back({"budget", "error-budget totals and regression against the printed tables",
                    {{.key = "table", .type = ParamType::string, .fallback = "a2", .choices = {"a1", "a2"},
                      .help = "a1: detection and reset; a2: mid-circuit measurement and reset contrast"},
                     {.key = "case", .type = ParamType::string, .fallback = nullptr,
                      .help = "one case label; null reports every case"},
                     {.key = "mode", .type = ParamType::string, .fallback = "linear", .choices = {"linear", "product"},
                      .help = "linear sum or 1 - prod(1 - e)"},
                     {.key = "ledger_csv", .type = ParamType::string, .fallback = nullptr,
                      .help = "ledger CSV; null uses the bundled table"},
                     {.key = "printed_csv", .type = ParamType::string, .fallback = nullptr,
                      .help = "printed totals CSV; null uses the bundled table"}},
                    nullptr, run_budget});
    return cmds;
}

}  // namespace

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> cmds = build_commands();
    return cmds;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"mpp-rabi-scan", "rabi-scan", "MPP final nbar and transfer error vs Rabi frequency, 10 kHz trap",
         {{"seq", "mpp"}, {"trap_freq_khz", 10.0}, {"rabi_min_khz", 40.0}, {"rabi_max_khz", 120.0}}},
        {"pi-rabi-scan", "rabi-scan", "pi-pulse final nbar and transfer error vs Rabi frequency, 10 kHz trap",
         {{"seq", "pi"}, {"trap_freq_khz", 10.0}, {"rabi_min_khz", 40.0}, {"rabi_max_khz", 120.0}}},
        {"shelve-pi", "shelve", "repeated pi-pulse shelving with dephasing, 80 kHz Rabi, 10 kHz trap",
         {{"seq", "pi"}}},
        {"shelve-mpp", "shelve", "repeated MPP shelving with dephasing, 80 kHz Rabi, 10 kHz trap", {{"seq", "mpp"}}},
        {"phase-space-mpp", "phase-space", "closed phase-space loop of the MPP from |g,0>", {{"seq", "mpp"}}},
        {"phase-space-pi", "phase-space", "open phase-space trajectory of a single pi pulse from |g,0>",
         {{"seq", "pi"}}},
        {"nuclear-g", "rb", "ground-state nuclear qubit RB with the measured noise, theta_x = 0.9 deg",
         {{"qubit", "nuclear"}, {"theta_x_deg", 0.9}, {"depths", {1, 4, 16, 64, 256, 1024, 4096}}}},
        {"nuclear-g-theta-0.1", "rb", "simulated nuclear RB, lower beam-angle bound theta_x = 0.1 deg",
         {{"qubit", "nuclear"}, {"theta_x_deg", 0.1}, {"depths", {1, 4, 16, 64, 256, 1024, 4096}}}},
        {"nuclear-g-theta-1.7", "rb", "simulated nuclear RB, upper beam-angle bound theta_x = 1.7 deg",
         {{"qubit", "nuclear"}, {"theta_x_deg", 1.7}, {"depths", {1, 4, 16, 64, 256, 1024, 4096}}}},
        {"optical-o", "rb", "optical-qubit RB limited by spin-motion coupling, nbar = 0.05",
         {{"qubit", "optical"}, {"initial_nbar", 0.05}, {"depths", {1, 2, 4, 8, 16, 32, 64, 128}}}},
        {"suppression-mpp", "suppression", "MPP excitation under a 532 nm light shift vs the Lorentzian",
         {{"seq", "mpp"}}},
        {"qpt-mcm", "qpt", "simulated tomography of the mid-circuit measurement on a data qubit",
         {{"depolarizing_p", 0.0373}, {"survival", 0.9796}, {"shots_per_setting", 1000}}},
        {"readout-bundled", "readout-fidelity", "detection and reset estimators on the bundled counts", json::object()},
        {"thermometry-3uk", "thermometry", "release and recapture at 3 uK with a grid fit, and nbar = 0.5 at 58 kHz",
         {{"temperature_uk", 3.0}, {"sideband_nbar", 0.5}}},
        {"budget-a1", "budget", "detection and reset error budget", {{"table", "a1"}}},
        {"budget-a2", "budget", "mid-circuit measurement and reset contrast budget", {{"table", "a2"}}},
    };
    return list;
}

}  // namespace omgsim::cli
