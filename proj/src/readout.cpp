#include "omgsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/poisson.hpp>

#include "omgsim/csv.hpp"
#include "omgsim/drive.hpp"
#include "omgsim/errors.hpp"
#include "omgsim/parallel.hpp"
#include "omgsim/rng.hpp"

namespace omgsim {

namespace {

// P(N <= k) and P(N > k) for N ~ Poisson(lambda); lambda = 0 is a point mass.
double poisson_cdf(double lambda, int k) {
    if (k < 0) return 0.0;
    if (lambda == 0.0) return 1.0;
    return boost::math::cdf(boost::math::poisson_distribution<double>(lambda), k);
}

double poisson_sf(double lambda, int k) {
    if (k < 0) return 1.0;
    if (lambda == 0.0) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::poisson_distribution<double>(lambda), k));
}

const char* state_name(int s) { return s == 0 ? "|g,0>" : "|g,1>"; }

}  // namespace

// ---- discrimination --------------------------------------------------------

void HistogramModel::validate() const {
    if (!(lambda_dark >= 0.0) || !std::isfinite(lambda_dark)) throw DomainError("lambda_dark must be >= 0");
    if (!(lambda_bright > lambda_dark) || !std::isfinite(lambda_bright))
        throw DomainError("lambda_bright must exceed lambda_dark");
    if (threshold < 0) throw DomainError("threshold must be >= 0");
    if (!(bright_prior >= 0.0 && bright_prior <= 1.0)) throw DomainError("bright_prior must lie in [0, 1]");
}

Discrimination discrimination_fidelity(const HistogramModel& model) {
    model.validate();
    Discrimination d{};
    d.misid_bright = poisson_cdf(model.lambda_bright, model.threshold);
    d.misid_dark = poisson_sf(model.lambda_dark, model.threshold);
    d.fidelity = 1.0 - (model.bright_prior * d.misid_bright + (1.0 - model.bright_prior) * d.misid_dark);
    return d;
}

int optimize_threshold(const HistogramModel& model) {
    HistogramModel m = model;
    m.threshold = 0;
    m.validate();
    const int hi = static_cast<int>(std::ceil(m.lambda_bright + 10.0 * std::sqrt(m.lambda_bright)));
    int best = 0;
    double best_f = -1.0;
    for (int t = 0; t <= hi; ++t) {
        m.threshold = t;
        const double f = discrimination_fidelity(m).fidelity;
        if (f > best_f) {
            best_f = f;
            best = t;
        }
    }
    return best;
}

// ---- counts ----------------------------------------------------------------

void CountsTable::validate() const {
    for (const auto& row : counts)
        for (double n : row)
            if (!std::isfinite(n) || n < 0.0) throw DomainError("counts must be finite and non-negative");
    for (double e : {eps_op, eps_inf, eps_iloss})
        if (!(e >= 0.0 && e < 1.0)) throw DomainError("epsilon values must lie in [0, 1)");
}

std::array<double, 2> spam_forward(double db, double bb, double eps_op) {
    return {(1.0 - eps_op) * db + eps_op * bb, eps_op * db + (1.0 - eps_op) * bb};
}

CorrectedCounts spam_correct(const CountsTable& table) {
    table.validate();
    const double e = table.eps_op;
    if (e >= 0.5) throw DomainError("eps_op must be below 0.5 for the confusion matrix to be invertible");
    const double det = 1.0 - 2.0 * e;
    CorrectedCounts out;
    for (int s = 0; s < 2; ++s) {
        const double db = table.at(s, Outcome::db);
        const double bb = table.at(s, Outcome::bb);
        double cdb = ((1.0 - e) * db - e * bb) / det;
        double cbb = ((1.0 - e) * bb - e * db) / det;
        for (auto [v, label] : {std::pair<double*, const char*>{&cdb, "db"}, {&cbb, "bb"}}) {
            if (*v < 0.0) {
                std::ostringstream os;
                os << "corrected N_" << label << " for " << state_name(s) << " was " << *v << "; clamped to 0";
                out.warnings.push_back(os.str());
                *v = 0.0;
            }
        }
        out.db[s] = cdb;
        out.bb[s] = cbb;
    }
    return out;
}

Estimate wilson_interval(double p_hat, double n) {
    if (!(n > 0.0)) throw EmptyDataError("binomial interval needs a positive total");
    const double p = std::clamp(p_hat, 0.0, 1.0);
    const double z2 = 1.0;  // 1 sigma
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {p_hat, half, centre - half, centre + half};
}

DetectionFidelities detection_fidelities(const CountsTable& table) {
    const auto c = spam_correct(table);
    DetectionFidelities out;
    out.warnings = c.warnings;
    for (int s = 0; s < 2; ++s) {
        const double total = c.db[s] + c.bb[s];
        if (!(total > 0.0))
            throw EmptyDataError(std::string("no surviving events for ") + state_name(s));
        const double correct = s == 0 ? c.db[s] : c.bb[s];
        (s == 0 ? out.g0 : out.g1) = wilson_interval(correct / total, total);
    }
    return out;
}

ResetProbabilities reset_probabilities(const CountsTable& table) {
    table.validate();
    const double gain = 1.0 + table.eps_inf + table.eps_iloss;
    ResetProbabilities out;
    for (int s = 0; s < 2; ++s) {
        const double survived = table.at(s, Outcome::bb) + table.at(s, Outcome::db);
        double total = 0.0;
        for (double n : table.counts[s]) total += n;
        if (!(total > 0.0)) throw EmptyDataError(std::string("no events for ") + state_name(s));
        const double p = gain * survived / total;
        if (p > 1.0) {
            std::ostringstream os;
            os << "corrected reset probability for " << state_name(s) << " exceeds 1 (" << p << ")";
            out.warnings.push_back(os.str());
        }
        (s == 0 ? out.g0 : out.g1) = wilson_interval(p, total);
    }
    return out;
}

CountsTable parse_counts_csv(std::istream& in) {
    const auto rows = csv::read_rows(in);
    if (rows.empty()) throw ConfigError("counts CSV is empty");
    const std::string what = "counts CSV";
    if (rows[0].cells != std::vector<std::string>{"state", "j", "k", "count"})
        csv::fail(what, rows[0].line, "expected header state,j,k,count");
    CountsTable table;
    std::array<std::array<bool, 4>, 2> seen{};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [line, cells] = rows[r];
        if (cells.size() != 4) csv::fail(what, line, "expected 4 columns");
        int s = 0;
        if (cells[0] == "g1")
            s = 1;
        else if (cells[0] != "g0")
            csv::fail(what, line, "state must be g0 or g1");
        auto bd = [&](const std::string& v) {
            if (v != "b" && v != "d") csv::fail(what, line, "image outcomes must be b or d");
            return v == "b" ? 0 : 1;
        };
        const int jk = 2 * bd(cells[1]) + bd(cells[2]);
        if (seen[s][jk]) csv::fail(what, line, "duplicate row");
        seen[s][jk] = true;
        table.counts[s][jk] = csv::parse_double(cells[3], what, line);
    }
    table.validate();
    return table;
}

CountsTable read_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open counts CSV: " + path);
    return parse_counts_csv(in);
}

void write_counts_csv(std::ostream& out, const CountsTable& table) {
    static const char* names[4][2] = {{"b", "b"}, {"b", "d"}, {"d", "b"}, {"d", "d"}};
    out << "state,j,k,count\n";
    for (int s = 0; s < 2; ++s)
        for (int jk = 0; jk < 4; ++jk)
            out << (s == 0 ? "g0" : "g1") << ',' << names[jk][0] << ',' << names[jk][1] << ','
                << csv::format_double(table.counts[s][jk]) << '\n';
}

CountsTable synthesize_counts(const SyntheticReadout& cfg, std::uint64_t seed) {
    if (cfg.events_per_state < 1) throw DomainError("events_per_state must be positive");
    const double gain = 1.0 + cfg.eps_inf + cfg.eps_iloss;
    CountsTable table;
    table.eps_op = cfg.eps_op;
    table.eps_inf = cfg.eps_inf;
    table.eps_iloss = cfg.eps_iloss;
    for (int s = 0; s < 2; ++s) {
        const double survive = cfg.reset[s] / gain;
        if (!(survive >= 0.0 && survive <= 1.0) || !(cfg.detection[s] >= 0.0 && cfg.detection[s] <= 1.0))
            throw DomainError("synthetic rates out of range");
        Rng rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        for (int e = 0; e < cfg.events_per_state; ++e) {
            const int k = rng.bernoulli(survive) ? 0 : 1;
            const bool correct = rng.bernoulli(cfg.detection[s]);
            // |g,0> reads dark, |g,1> bright.
            int j = (s == 0) == correct ? 1 : 0;
            if (rng.bernoulli(cfg.eps_op)) j = 1 - j;
            table.counts[s][2 * j + k] += 1.0;
        }
    }
    return table;
}

nlohmann::json to_json(const Estimate& e) {
    return {{"value", e.value}, {"sigma", e.sigma}, {"lower", e.lower}, {"upper", e.upper}};
}

// ---- thermometry -----------------------------------------------------------

double tweezer_waist(double depth, double mass, double radial_frequency) {
    if (!(depth > 0.0) || !(mass > 0.0) || !(radial_frequency > 0.0))
        throw DomainError("depth, mass and frequency must be positive");
    return std::sqrt(4.0 * depth / (mass * radial_frequency * radial_frequency));
}

ThermometryConfig ThermometryConfig::resolved() const {
    ThermometryConfig c = *this;
    if (c.mass == 0.0) c.mass = constants::yb171_mass;
    if (c.waist == 0.0) c.waist = tweezer_waist(c.trap_depth, c.mass, 2.0 * std::numbers::pi * 58e3);
    if (c.release_times.empty())
        for (int k = 0; k <= 10; ++k) c.release_times.push_back(10e-6 * k);
    if (!(c.trap_depth > 0.0) || !std::isfinite(c.trap_depth)) throw DomainError("trap depth must be positive");
    if (!(c.waist > 0.0) || !(c.wavelength > 0.0) || !(c.mass > 0.0))
        throw DomainError("waist, wavelength and mass must be positive");
    if (!(c.temperature >= 0.0) || !std::isfinite(c.temperature)) throw DomainError("temperature must be >= 0");
    if (c.n_samples < 1) throw DomainError("n_samples must be >= 1");
    for (double t : c.release_times)
        if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("release times must be >= 0");
    if (c.threads < 1) c.threads = 1;
    return c;
}

namespace {

constexpr int kChunk = 4096;

using Draw = std::array<double, 6>;  // standard normals: x, y, z, vx, vy, vz

std::vector<Draw> standard_draws(int n, std::uint64_t seed, int threads) {
    std::vector<Draw> draws(static_cast<std::size_t>(n));
    const std::size_t chunks = (static_cast<std::size_t>(n) + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        Rng rng(substream_seed(seed, c));
        const std::size_t end = std::min<std::size_t>(draws.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i)
            for (double& v : draws[i]) v = rng.normal();
    });
    return draws;
}

// Fraction recaptured per release time, with standard errors.
std::vector<RecapturePoint> recapture_curve(const std::vector<Draw>& draws, const ThermometryConfig& c,
                                            double temperature) {
    const double kt = constants::k_boltzmann * temperature;
    const double w = c.waist;
    const double zr = std::numbers::pi * w * w / c.wavelength;
    const double omega_r = std::sqrt(4.0 * c.trap_depth / (c.mass * w * w));
    const double omega_z = std::sqrt(2.0 * c.trap_depth / (c.mass * zr * zr));
    const double sr = std::sqrt(kt / c.mass) / omega_r;
    const double sz = std::sqrt(kt / c.mass) / omega_z;
    const double sv = std::sqrt(kt / c.mass);
    const double g = c.gravity ? constants::gravity : 0.0;

    std::vector<RecapturePoint> out;
    for (double t : c.release_times) {
        double kept = 0.0;
        for (const auto& d : draws) {
            const double vx0 = sv * d[3];
            const double x = sr * d[0] + vx0 * t - 0.5 * g * t * t;
            const double y = sr * d[1] + sv * d[4] * t;
            const double z = sz * d[2] + sv * d[5] * t;
            const double vx = vx0 - g * t;
            const double vy = sv * d[4];
            const double vz = sv * d[5];
            const double s = 1.0 + (z / zr) * (z / zr);
            const double potential = -c.trap_depth / s * std::exp(-2.0 * (x * x + y * y) / (w * w * s));
            const double kinetic = 0.5 * c.mass * (vx * vx + vy * vy + vz * vz);
            if (kinetic + potential < 0.0) kept += 1.0;
        }
        const double n = static_cast<double>(draws.size());
        const double p = kept / n;
        out.push_back({t, p, std::sqrt(p * (1.0 - p) / n)});
    }
    return out;
}

}  // namespace

std::vector<RecapturePoint> release_recapture(const ThermometryConfig& cfg) {
    const auto c = cfg.resolved();
    const auto draws = standard_draws(c.n_samples, c.rng_seed, c.threads);
    return recapture_curve(draws, c, c.temperature);
}

TemperatureFit fit_temperature(const std::vector<RecapturePoint>& data, const ThermometryConfig& cfg,
                               const std::vector<double>& temperature_grid) {
    if (data.empty()) throw EmptyDataError("no recapture data");
    if (temperature_grid.size() < 2) throw DomainError("temperature grid needs at least two points");
    if (!std::is_sorted(temperature_grid.begin(), temperature_grid.end()))
        throw DomainError("temperature grid must be ascending");
    auto c = cfg.resolved();
    if (c.n_samples < 100) throw DomainError("fitting needs n_samples >= 100");
    c.release_times.clear();
    for (const auto& p : data) c.release_times.push_back(p.release_time);
    c = c.resolved();

    const auto draws = standard_draws(c.n_samples, c.rng_seed, c.threads);
    TemperatureFit fit{};
    fit.grid = temperature_grid;
    fit.residual.assign(temperature_grid.size(), 0.0);
    parallel_for(temperature_grid.size(), c.threads, [&](std::size_t i) {
        const auto model = recapture_curve(draws, c, temperature_grid[i]);
        double ss = 0.0;
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double r = model[k].recapture - data[k].recapture;
            ss += r * r;
        }
        fit.residual[i] = ss;
    });
    const auto best = std::min_element(fit.residual.begin(), fit.residual.end()) - fit.residual.begin();
    fit.temperature = temperature_grid[static_cast<std::size_t>(best)];
    fit.resolution = (temperature_grid.back() - temperature_grid.front()) / (temperature_grid.size() - 1.0);
    return fit;
}

double nbar_from_sidebands(double red_height, double blue_height) {
    if (!(red_height >= 0.0) || !(blue_height > red_height))
        throw DomainError("sideband heights need 0 <= red < blue");
    const double r = red_height / blue_height;
    return r / (1.0 - r);
}

double nbar_to_temperature(double nbar, double trap_frequency) {
    if (!(nbar >= 0.0) || !(trap_frequency > 0.0)) throw DomainError("need nbar >= 0 and a positive frequency");
    return constants::hbar * trap_frequency * (nbar + 0.5) / constants::k_boltzmann;
}

double nbar_to_temperature_bose(double nbar, double trap_frequency) {
    if (!(nbar >= 0.0) || !(trap_frequency > 0.0)) throw DomainError("need nbar >= 0 and a positive frequency");
    if (nbar == 0.0) return 0.0;
    return constants::hbar * trap_frequency / (constants::k_boltzmann * std::log1p(1.0 / nbar));
}

}  // namespace omgsim
