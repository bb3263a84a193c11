#pragma once

// Clock-drive Hamiltonian for a two-level atom in a 1D harmonic trap, outside
// the resolved-sideband regime, and piecewise-constant pulse propagation.
//
// In the frame rotating at the drive frequency (RWA on the optical carrier):
//
//   H = w a^dag a - delta |m><m| + (Omega/2) (e^{i phi} |m><g| (x) D(i eta) + h.c.)
//
// with D(i eta) = exp(i eta (a + a^dag)) built from the truncated (a + a^dag).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "omgsim/hilbert.hpp"

namespace omgsim {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_boltzmann = 1.380649e-23;   // J / K
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
inline constexpr double yb171_mass = 170.936 * atomic_mass;
inline constexpr double clock_wavelength = 578e-9;    // m
inline constexpr double gravity = 9.80665;            // m / s^2
}  // namespace constants

// eta = k x_zp with x_zp = sqrt(hbar / (2 m w)).
double lamb_dicke_parameter(double wavelength, double mass, double trap_frequency);

struct DriveParams {
    double rabi = 0.0;        // rad/s
    double detuning = 0.0;    // rad/s, drive minus transition
    double phase = 0.0;       // rad, frame phase added to every segment
    double lamb_dicke = 0.0;
    FockSpace fock{11, 1.0};

    void validate() const;
};

enum class Envelope { rectangular, gaussian };

struct PulseSegment {
    double angle = 0.0;  // rad, nominal rotation at resonance
    double phase = 0.0;  // rad
    std::optional<double> detuning;  // rad/s, overrides DriveParams::detuning
    Envelope envelope = Envelope::rectangular;
};

enum class SequenceLabel { pi, corpse90, mpp, custom };

std::string to_string(SequenceLabel label);
SequenceLabel sequence_label_from_string(const std::string& name);

class PulseSequence {
  public:
    PulseSequence(SequenceLabel label, std::vector<PulseSegment> segments);

    static PulseSequence pi_pulse();
    static PulseSequence corpse90();
    static PulseSequence mpp();
    static PulseSequence from_label(SequenceLabel label);

    SequenceLabel label() const { return label_; }
    const std::vector<PulseSegment>& segments() const { return segments_; }

    double total_angle() const;

  private:
    SequenceLabel label_;
    std::vector<PulseSegment> segments_;
};

// {label, segments: [{angle_deg, phase_deg, detuning_hz}]}; degrees and Hz
// on disk, radians and rad/s in memory.
nlohmann::json to_json(const PulseSequence& seq);
PulseSequence pulse_sequence_from_json(const nlohmann::json& doc);

// Number of constant sub-steps used to discretise a Gaussian envelope.
inline constexpr int kGaussianSubsteps = 32;

// Duration of a segment (seconds).
double segment_duration(const PulseSegment& seg, const DriveParams& params);

Operator build_hamiltonian(const DriveParams& params);

// Ordered product of the segment propagators (later segments on the left).
Operator sequence_propagator(const PulseSequence& seq, const DriveParams& params);

SpinMotionState propagate(const SpinMotionState& state, const PulseSequence& seq, const DriveParams& params);

// 1 - P(m) after driving the sequence on |g> (x) (thermal nbar).
double transfer_infidelity(const PulseSequence& seq, const DriveParams& params, double initial_nbar = 0.0);

struct TrajectoryPoint {
    double t;  // s
    double x;  // <x>, zero-point units
    double p;  // <p>, zero-point units
};

std::vector<TrajectoryPoint> phase_space_trajectory(const SpinMotionState& state, const PulseSequence& seq,
                                                    const DriveParams& params, int samples_per_segment);

struct RabiScanRow {
    double rabi;  // rad/s
    double transfer_infidelity;
    double final_nbar;
};

// Per-Omega metrics from |g, 0>. Parallel across Omega when threads > 1.
std::vector<RabiScanRow> scan_optimal_rabi(const DriveParams& base, std::span<const double> rabi_values,
                                           const PulseSequence& seq, int threads = 1);

}  // namespace omgsim
