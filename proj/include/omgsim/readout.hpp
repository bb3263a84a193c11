#pragma once

// Detection and thermometry: Poisson photon-count discrimination, SPAM
// corrected detection fidelities and reset probabilities from image counts,
// release-and-recapture Monte Carlo and sideband-ratio thermometry.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace omgsim {

// ---- photon-count discrimination -------------------------------------------

struct HistogramModel {
    double lambda_bright = 20.0;
    double lambda_dark = 1.0;
    int threshold = 5;          // counts <= threshold read as dark
    double bright_prior = 0.5;

    void validate() const;
};

struct Discrimination {
    double fidelity;
    double misid_bright;  // P(Poisson(lambda_bright) <= threshold)
    double misid_dark;    // P(Poisson(lambda_dark) > threshold)
};

Discrimination discrimination_fidelity(const HistogramModel& model);

// Smallest threshold maximising the fidelity over [0, ceil(lb + 10 sqrt(lb))].
int optimize_threshold(const HistogramModel& model);

// ---- image-count estimators ------------------------------------------------

enum class Outcome { bb = 0, bd = 1, db = 2, dd = 3 };  // image 1 then image 2

struct CountsTable {
    // counts[s][jk], s = 0 for |g,0>, 1 for |g,1>
    std::array<std::array<double, 4>, 2> counts{};
    double eps_op = 0.0028;
    double eps_inf = 0.002;
    double eps_iloss = 0.0019;

    double& at(int state, Outcome o) { return counts[state][static_cast<int>(o)]; }
    double at(int state, Outcome o) const { return counts[state][static_cast<int>(o)]; }
    void validate() const;
};

struct CorrectedCounts {
    std::array<double, 2> db{};  // per prepared state
    std::array<double, 2> bb{};
    std::vector<std::string> warnings;
};

// (N_db, N_bb) -> M^-1 (N_db, N_bb), M = [[1-e, e], [e, 1-e]]; negatives clamp to 0.
CorrectedCounts spam_correct(const CountsTable& table);
// Forward map M, for round trips.
std::array<double, 2> spam_forward(double db, double bb, double eps_op);

// Point estimate with a 1 sigma Wilson interval.
struct Estimate {
    double value = 0.0;
    double sigma = 0.0;  // half-width of the interval
    double lower = 0.0;
    double upper = 0.0;
};

Estimate wilson_interval(double p_hat, double n);

struct DetectionFidelities {
    Estimate g0, g1;
    std::vector<std::string> warnings;
};

// Post-selected on image-2 survival (k = b).
DetectionFidelities detection_fidelities(const CountsTable& table);

struct ResetProbabilities {
    Estimate g0, g1;
    std::vector<std::string> warnings;
};

// p_s = (1 + eps_inf + eps_iloss) sum_j N_jb / sum_jk N_jk.
ResetProbabilities reset_probabilities(const CountsTable& table);

// CSV with header state,j,k,count; state is g0 or g1, j and k are b or d.
CountsTable parse_counts_csv(std::istream& in);
CountsTable read_counts_csv(const std::string& path);
void write_counts_csv(std::ostream& out, const CountsTable& table);

// Generative model for synthetic count tables: image 2 reads bright with
// probability reset / (1 + eps_inf + eps_iloss); image 1 is correct with the
// detection probability and is then flipped with probability eps_op.
struct SyntheticReadout {
    double eps_op = 0.0028;
    double eps_inf = 0.002;
    double eps_iloss = 0.0019;
    std::array<double, 2> detection{0.986, 0.994};
    std::array<double, 2> reset{0.974, 0.990};
    int events_per_state = 20000;
};

CountsTable synthesize_counts(const SyntheticReadout& cfg, std::uint64_t seed);

nlohmann::json to_json(const Estimate& e);

// ---- thermometry -----------------------------------------------------------

inline constexpr double kTweezerWavelength = 759e-9;  // m
inline constexpr double kPlanck = 6.62607015e-34;     // J s

// Gaussian-beam waist giving radial frequency omega at depth U.
double tweezer_waist(double depth, double mass, double radial_frequency);

struct ThermometryConfig {
    double trap_depth = kPlanck * 8.7e6;  // J
    double waist = 0.0;                   // m; 0 selects the 58 kHz radial value
    double wavelength = kTweezerWavelength;
    double mass = 0.0;                    // kg; 0 selects 171Yb
    double temperature = 3e-6;            // K
    int n_samples = 100000;
    std::vector<double> release_times;    // s; empty selects 0..100 us in 10 us steps
    bool gravity = true;
    std::uint64_t rng_seed = 1;
    int threads = 1;

    // Fills the zero/empty defaults and checks ranges.
    ThermometryConfig resolved() const;
};

struct RecapturePoint {
    double release_time;
    double recapture;
    double standard_error;
};

// Classical Monte Carlo: thermal position and velocity in the harmonic
// approximation, free flight with gravity along one radial axis, recapture
// iff kinetic plus Gaussian-trap energy < 0.
std::vector<RecapturePoint> release_recapture(const ThermometryConfig& cfg);

struct TemperatureFit {
    double temperature;
    double resolution;  // grid step
    std::vector<double> grid;
    std::vector<double> residual;  // sum of squares per grid point
};

// Least squares over a temperature grid; the model uses cfg's seed so all
// grid points share random numbers.
TemperatureFit fit_temperature(const std::vector<RecapturePoint>& data, const ThermometryConfig& cfg,
                               const std::vector<double>& temperature_grid);

double nbar_from_sidebands(double red_height, double blue_height);
// T = hbar w (nbar + 1/2) / k_B
double nbar_to_temperature(double nbar, double trap_frequency);
// Bose-occupation convention T = hbar w / (k_B ln(1 + 1/nbar)).
double nbar_to_temperature_bose(double nbar, double trap_frequency);

}  // namespace omgsim
