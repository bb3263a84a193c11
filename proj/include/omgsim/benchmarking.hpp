#pragma once

// Single-qubit Clifford randomized benchmarking: Clifford compilation into
// native X = R_X(pi/2) and Z = R_Z(pi/2) gates, random circuit generation,
// noisy simulation for nuclear-spin and optical-clock qubits, and the
// A p^m + B decay fit.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "omgsim/drive.hpp"

namespace omgsim {

using Mat2 = Eigen::Matrix2cd;

inline constexpr int kCliffordCount = 24;

enum class GateSetKind { nuclear, optical };

struct NativeGateSet {
    GateSetKind kind = GateSetKind::nuclear;
    double gate_duration = 100e-6;  // s, per physical gate

    void validate() const;
};

// Words are read left to right in time order, e.g. "XZ" applies X first.
// product[i][j] is the Clifford for "j then i", i.e. U_i U_j.
struct CliffordTable {
    std::array<std::string, kCliffordCount> words;
    std::array<Mat2, kCliffordCount> unitaries;
    std::array<std::array<int, kCliffordCount>, kCliffordCount> product{};
    std::array<int, kCliffordCount> inverse{};
    int identity = 0;
    int bit_flip = 0;  // shortest word mapping |0> to |1> (R_X(pi))
    double mean_length = 0.0;   // native gates per Clifford, X and Z counted
    double mean_x_count = 0.0;
    double mean_z_count = 0.0;

    int index_of(const Mat2& u) const;  // -1 if not a Clifford
};

// The table is the same for both sets; they differ only in which gates
// cost time (the optical Z is a virtual phase jump).
const CliffordTable& clifford_table();

struct CompiledCliffords {
    const CliffordTable* table;
    double native_gates_per_clifford;  // nuclear: X + Z; optical: X only
};

CompiledCliffords compile_clifford_table(const NativeGateSet& gateset);

Mat2 native_x();
Mat2 native_z();
Mat2 word_unitary(const std::string& word);

struct RBCircuit {
    int depth = 0;
    std::vector<int> cliffords;  // depth random elements, then the recovery
    int target = 0;              // ideal outcome, 0 or 1
};

// Circuit k at depth m draws from substream (seed, m, k), so the set at a given
// depth does not depend on which other depths were requested.
std::vector<RBCircuit> generate_rb_sequences(std::span<const int> depths, int n_per_depth, std::uint64_t seed);

// Noiseless success probability of a circuit from |0>.
double ideal_success(const RBCircuit& circuit);

// Default per-gate scatter rate. The combined Raman/Rayleigh figure is not
// printed; this value is calibrated so that theta_x = 0.1 deg with the other
// defaults and 100 us gates gives r close to 1.2e-4 (mean over circuit sets,
// depths 1..4096).
inline constexpr double kDefaultScatterRate = 0.32;  // 1/s

struct NoiseModel {
    double intensity_rms = 0.008;   // fractional, drawn per X pulse
    double site_offset = 0.003;     // fractional spread, drawn once per circuit
    double theta_x_deg = 0.9;       // Z axis tilt toward x
    double detuning = 0.0;          // rad/s
    double scatter_rate = kDefaultScatterRate;  // 1/s, depolarising
    double leakage_fraction = 0.0;  // fraction of scatter events that lose the atom
    std::uint64_t rng_seed = 1;

    void validate() const;
};

struct RBFit {
    double A = 0.0, p = 1.0, B = 0.0;
    double sigma_A = 0.0, sigma_p = 0.0, sigma_B = 0.0;
    double r = 0.0, sigma_r = 0.0;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    bool flat = false;  // data constant, p fixed to 1
};

// Weighted least squares of A p^m + B with weights = 1 / variance; pass an
// empty span for unit weights. r = (1 - p) / 2.
RBFit fit_rb_decay(std::span<const double> depths, std::span<const double> success,
                   std::span<const double> weights = {});

struct RBResult {
    std::vector<int> depths;
    std::vector<double> success_mean;
    std::vector<double> success_stderr;
    RBFit fit;
    double error_per_clifford = 0.0;
    double native_gates_per_clifford = 0.0;
    std::vector<std::string> warnings;
};

struct RBSimOptions {
    int shots = 100;
    // false: each shot contributes its exact outcome probability for the
    // sampled noise realisation; true: each shot draws a binary outcome.
    bool sample_outcomes = false;
    int threads = 1;
    std::uint64_t seed = 1;  // outcome sampling in optical RB
};

RBResult simulate_rb_nuclear(std::span<const RBCircuit> circuits, const NoiseModel& noise,
                             const NativeGateSet& gateset, const RBSimOptions& options = {});

struct OpticalRBResult : RBResult {
    double final_nbar_mean = 0.0;
    double final_nbar_max = 0.0;
    double top_level_max = 0.0;
};

// X = pi/2 clock pulse through the full spin-motion Hamiltonian; Z = virtual
// frame update. Motion is the only error source.
OpticalRBResult simulate_rb_optical(std::span<const RBCircuit> circuits, const DriveParams& params,
                                    double initial_nbar, const RBSimOptions& options = {});

// n_max for optical RB: 11 above nbar = 0.2, else 7.
int optical_rb_n_max(double initial_nbar);

std::vector<int> default_rb_depths();

}  // namespace omgsim
