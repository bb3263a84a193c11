#pragma once

// Repeated shelving on the clock transition: transfer error and motional
// heating per shelve, clock suppression by a light shift, and the
// light-shift heating bookkeeping.

#include <string>
#include <vector>

#include "omgsim/drive.hpp"
#include "omgsim/hilbert.hpp"

namespace omgsim {

struct ShelvingConfig {
    PulseSequence seq = PulseSequence::pi_pulse();
    DriveParams params;
    double wait_time = 2e-3;     // s between shelves
    int n_shelves = 10;
    bool dephase_between = true;
    double initial_nbar = 0.05;  // thermal start in |g>

    void validate() const;
};

struct ShelvingPoint {
    int shelve_count;
    double ground_population;
    double nbar;
};

struct ShelvingResult {
    double error_per_shelve = 0.0;     // slope of P(g) over odd shelve counts
    double error_stderr = 0.0;
    double heating_per_shelve = 0.0;   // slope of <n> over even shelve counts
    double heating_stderr = 0.0;
    double max_top_level = 0.0;
    std::vector<ShelvingPoint> curve;  // shelve_count = 0 .. n_shelves
    std::vector<std::string> warnings;
};

ShelvingResult shelving_error(const ShelvingConfig& cfg);

// Tr_motion(rho) (x) diag(Tr_orbital(rho)).
SpinMotionState dephase_motional(const SpinMotionState& state);

struct SuppressionResult {
    double simulated;   // P(m) after the sequence at detuning light_shift, from |g, 0>
    double lorentzian;  // Omega^2 / (Omega^2 + shift^2)
};

// Uses `params` for the trap and Lamb-Dicke parameter; its rabi and detuning
// are replaced by the arguments.
SuppressionResult suppression_error(double rabi, double light_shift, const PulseSequence& seq,
                                    const DriveParams& params);

double lorentzian_suppression(double rabi, double light_shift);

enum class RampProfile { linear, smooth };

struct LightShiftConfig {
    double shift = 0.0;          // rad/s
    RampProfile ramp = RampProfile::linear;
    double ramp_duration = 0.0;  // s
    double heating_per_op = 0.056;

    void validate() const;
};

// n_ops * heating_per_op; a bookkeeping model, not dynamics.
double light_shift_heating(int n_ops, const LightShiftConfig& cfg);

}  // namespace omgsim
