#include "omgsim/shelving.hpp"

#include <algorithm>
#include <sstream>

#include "omgsim/errors.hpp"
#include "omgsim/fitting.hpp"

namespace omgsim {

void ShelvingConfig::validate() const {
    if (n_shelves < 1) throw DomainError("ShelvingConfig: n_shelves must be >= 1");
    if (!(wait_time >= 0.0)) throw DomainError("ShelvingConfig: wait_time must be >= 0");
    if (!(initial_nbar >= 0.0)) throw DomainError("ShelvingConfig: initial_nbar must be >= 0");
    params.validate();
}

SpinMotionState dephase_motional(const SpinMotionState& state) {
    const int n = state.fock().levels();
    const Matrix orb = state.orbital_marginal();
    const Matrix mot = state.motional_marginal();
    Matrix rho = Matrix::Zero(2 * n, 2 * n);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int k = 0; k < n; ++k) rho(a * n + k, b * n + k) = orb(a, b) * mot(k, k).real();
    return make_state_unchecked(state.fock(), std::move(rho));
}

ShelvingResult shelving_error(const ShelvingConfig& cfg) {
    cfg.validate();
    const DriveParams& params = cfg.params;
    const Operator pulse = sequence_propagator(cfg.seq, params);

    std::optional<Operator> wait;
    if (!cfg.dephase_between && cfg.wait_time > 0.0) {
        DriveParams idle = params;
        idle.rabi = 0.0;
        wait = matrix_exponential(build_hamiltonian(idle), cfg.wait_time);
    }

    ShelvingResult res;
    SpinMotionState state = thermal_state(params.fock, cfg.initial_nbar, Eigen::Vector2cd(1.0, 0.0));
    auto record = [&](int k) {
        res.curve.push_back({k, state.population(0), state.mean_occupation()});
        res.max_top_level = std::max(res.max_top_level, state.top_level_occupation());
    };
    record(0);
    for (int k = 1; k <= cfg.n_shelves; ++k) {
        state = apply_unitary(state, pulse);
        if (cfg.dephase_between) state = dephase_motional(state);
        record(k);
        if (wait && k < cfg.n_shelves) state = apply_unitary(state, *wait);
    }

    std::vector<double> xo, yo, xe, ye;
    for (const auto& pt : res.curve) {
        if (pt.shelve_count % 2 == 1) {
            xo.push_back(pt.shelve_count);
            yo.push_back(pt.ground_population);
        } else {
            xe.push_back(pt.shelve_count);
            ye.push_back(pt.nbar);
        }
    }
    if (xo.size() >= 2) {
        const auto f = fit_line(xo, yo);
        res.error_per_shelve = f.slope;
        res.error_stderr = f.slope_stderr;
    } else {
        // A single odd point: the remaining ground population is the error itself.
        res.error_per_shelve = yo.front();
        res.warnings.push_back("only one odd shelve count; error taken from a single point");
    }
    if (xe.size() >= 2) {
        const auto f = fit_line(xe, ye);
        res.heating_per_shelve = f.slope;
        res.heating_stderr = f.slope_stderr;
    } else {
        res.warnings.push_back("fewer than two even shelve counts; heating not fitted");
    }
    if (xo.size() < 5 || xe.size() < 5) res.warnings.push_back("fewer than 5 points in a slope fit");
    if (res.max_top_level > kTopLevelWarn) {
        std::ostringstream os;
        os << "truncation: top motional level occupation " << res.max_top_level << " exceeds " << kTopLevelWarn;
        res.warnings.push_back(os.str());
    }
    return res;
}

double lorentzian_suppression(double rabi, double light_shift) {
    if (!(rabi > 0.0)) throw DomainError("lorentzian_suppression: rabi must be > 0");
    return rabi * rabi / (rabi * rabi + light_shift * light_shift);
}

SuppressionResult suppression_error(double rabi, double light_shift, const PulseSequence& seq,
                                    const DriveParams& params) {
    if (!(rabi > 0.0)) throw DomainError("suppression_error: rabi must be > 0");
    DriveParams p = params;
    p.rabi = rabi;
    p.detuning = light_shift;
    const auto out = propagate(fock_state(p.fock, 0, 0), seq, p);
    return {out.population(1), lorentzian_suppression(rabi, light_shift)};
}

void LightShiftConfig::validate() const {
    if (!(ramp_duration >= 0.0)) throw DomainError("LightShiftConfig: ramp_duration must be >= 0");
    if (!(heating_per_op >= 0.0)) throw DomainError("LightShiftConfig: heating_per_op must be >= 0");
}

double light_shift_heating(int n_ops, const LightShiftConfig& cfg) {
    if (n_ops < 0) throw DomainError("light_shift_heating: n_ops must be >= 0");
    cfg.validate();
    return n_ops * cfg.heating_per_op;
}

}  // namespace omgsim
