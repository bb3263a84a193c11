#include "omgsim/drive.hpp"

#include <cmath>
#include <numbers>

#include "omgsim/errors.hpp"
#include "omgsim/parallel.hpp"

namespace omgsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Gaussian envelope sampled at sub-step midpoints, sigma = duration / 6.
double gaussian_weight(int k) {
    const double u = (k + 0.5) / kGaussianSubsteps - 0.5;  // in units of the duration
    return std::exp(-0.5 * (u * 6.0) * (u * 6.0));
}

double gaussian_mean_weight() {
    double acc = 0.0;
    for (int k = 0; k < kGaussianSubsteps; ++k) acc += gaussian_weight(k);
    return acc / kGaussianSubsteps;
}

std::vector<PulseSegment> corpse90_segments() {
    return {
        {384.3 * kDeg, 0.0, std::nullopt, Envelope::rectangular},
        {318.6 * kDeg, kPi, std::nullopt, Envelope::rectangular},
        {24.3 * kDeg, 0.0, std::nullopt, Envelope::rectangular},
    };
}

bool same_segments(const std::vector<PulseSegment>& a, const std::vector<PulseSegment>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].angle - b[i].angle) > 1e-9) return false;
        // Phases compared modulo 2 pi.
        const double dphi = std::remainder(a[i].phase - b[i].phase, 2.0 * kPi);
        if (std::abs(dphi) > 1e-9) return false;
        if (a[i].detuning.has_value() || b[i].detuning.has_value()) return false;
    }
    return true;
}

DriveParams segment_params(const PulseSegment& seg, const DriveParams& params) {
    DriveParams p = params;
    p.phase = params.phase + seg.phase;
    if (seg.detuning) p.detuning = *seg.detuning;
    return p;
}

}  // namespace

double lamb_dicke_parameter(double wavelength, double mass, double trap_frequency) {
    if (!(wavelength > 0.0) || !(mass > 0.0) || !(trap_frequency > 0.0))
        throw DomainError("lamb_dicke_parameter: arguments must be positive");
    const double k = 2.0 * kPi / wavelength;
    return k * std::sqrt(constants::hbar / (2.0 * mass * trap_frequency));
}

void DriveParams::validate() const {
    if (!(rabi >= 0.0)) throw DomainError("DriveParams: rabi must be >= 0");
    if (!(lamb_dicke >= 0.0)) throw DomainError("DriveParams: lamb_dicke must be >= 0");
    if (!std::isfinite(detuning) || !std::isfinite(phase)) throw DomainError("DriveParams: non-finite detuning/phase");
}

std::string to_string(SequenceLabel label) {
    switch (label) {
        case SequenceLabel::pi: return "pi";
        case SequenceLabel::corpse90: return "corpse90";
        case SequenceLabel::mpp: return "mpp";
        case SequenceLabel::custom: return "custom";
    }
    return "custom";
}

SequenceLabel sequence_label_from_string(const std::string& name) {
    if (name == "pi") return SequenceLabel::pi;
    if (name == "corpse90") return SequenceLabel::corpse90;
    if (name == "mpp") return SequenceLabel::mpp;
    if (name == "custom") return SequenceLabel::custom;
    throw DomainError("unknown pulse sequence label '" + name + "'");
}

PulseSequence::PulseSequence(SequenceLabel label, std::vector<PulseSegment> segments)
    : label_(label), segments_(std::move(segments)) {
    if (segments_.empty()) throw DomainError("PulseSequence: must contain at least one segment");
    for (const auto& s : segments_)
        if (!(s.angle >= 0.0)) throw DomainError("PulseSequence: segment angle must be >= 0");
    if (label_ == SequenceLabel::corpse90 && !same_segments(segments_, corpse90_segments()))
        throw DomainError("PulseSequence: corpse90 must be [384.3@+x, 318.6@-x, 24.3@+x]");
    if (label_ == SequenceLabel::mpp) {
        auto two = corpse90_segments();
        auto again = corpse90_segments();
        two.insert(two.end(), again.begin(), again.end());
        if (!same_segments(segments_, two)) throw DomainError("PulseSequence: mpp must be two corpse90 blocks");
    }
}

PulseSequence PulseSequence::pi_pulse() { return {SequenceLabel::pi, {{kPi, 0.0, std::nullopt, Envelope::rectangular}}}; }

PulseSequence PulseSequence::corpse90() { return {SequenceLabel::corpse90, corpse90_segments()}; }

PulseSequence PulseSequence::mpp() {
    auto segs = corpse90_segments();
    auto again = corpse90_segments();
    segs.insert(segs.end(), again.begin(), again.end());
    return {SequenceLabel::mpp, std::move(segs)};
}

PulseSequence PulseSequence::from_label(SequenceLabel label) {
    switch (label) {
        case SequenceLabel::pi: return pi_pulse();
        case SequenceLabel::corpse90: return corpse90();
        case SequenceLabel::mpp: return mpp();
        case SequenceLabel::custom: break;
    }
    throw DomainError("PulseSequence::from_label: custom sequences need explicit segments");
}

double PulseSequence::total_angle() const {
    double acc = 0.0;
    for (const auto& s : segments_) acc += s.angle;
    return acc;
}

nlohmann::json to_json(const PulseSequence& seq) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : seq.segments()) {
        nlohmann::json j;
        j["angle_deg"] = s.angle / kDeg;
        j["phase_deg"] = s.phase / kDeg;
        j["detuning_hz"] = s.detuning ? nlohmann::json(*s.detuning / (2.0 * kPi)) : nlohmann::json(nullptr);
        if (s.envelope == Envelope::gaussian) j["envelope"] = "gaussian";
        segs.push_back(std::move(j));
    }
    return {{"label", to_string(seq.label())}, {"segments", std::move(segs)}};
}

PulseSequence pulse_sequence_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("label") || !doc.contains("segments"))
        throw ConfigError("pulse sequence JSON needs 'label' and 'segments'");
    const auto label = sequence_label_from_string(doc.at("label").get<std::string>());
    std::vector<PulseSegment> segs;
    for (const auto& j : doc.at("segments")) {
        PulseSegment s;
        s.angle = j.at("angle_deg").get<double>() * kDeg;
        s.phase = j.value("phase_deg", 0.0) * kDeg;
        if (j.contains("detuning_hz") && !j.at("detuning_hz").is_null())
            s.detuning = j.at("detuning_hz").get<double>() * 2.0 * kPi;
        if (j.contains("envelope")) {
            const auto env = j.at("envelope").get<std::string>();
            if (env == "gaussian") s.envelope = Envelope::gaussian;
            else if (env != "rectangular") throw ConfigError("unknown envelope '" + env + "'");
        }
        segs.push_back(s);
    }
    return {label, std::move(segs)};
}

double segment_duration(const PulseSegment& seg, const DriveParams& params) {
    if (seg.angle == 0.0) return 0.0;
    if (!(params.rabi > 0.0)) throw DomainError("segment_duration: rabi must be > 0 for a non-zero angle");
    const double t = seg.angle / params.rabi;
    // Gaussian segments peak at the nominal Rabi frequency and are stretched to keep the pulse area.
    return seg.envelope == Envelope::gaussian ? t / gaussian_mean_weight() : t;
}

Operator build_hamiltonian(const DriveParams& params) {
    params.validate();
    const FockSpace& fock = params.fock;
    const int n = fock.levels();
    const Matrix a = annihilation(fock).matrix();
    const Matrix quad = a + a.adjoint();
    // D(i eta) = exp(i eta (a + a^dag)) = exp(-i H' t) with H' = -eta (a + a^dag), t = 1.
    const Matrix disp = matrix_exponential({SpaceTag::motion, -params.lamb_dicke * quad}, 1.0).matrix();

    Matrix h = Matrix::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        h(k, k) += fock.trap_frequency() * k;
        h(n + k, n + k) += fock.trap_frequency() * k - params.detuning;
    }
    const Matrix coupling = 0.5 * params.rabi * std::polar(1.0, params.phase) * disp;
    h.block(n, 0, n, n) += coupling;             // |m><g| (x) D
    h.block(0, n, n, n) += coupling.adjoint();   // h.c.
    return {SpaceTag::composite, std::move(h)};
}

Operator sequence_propagator(const PulseSequence& seq, const DriveParams& params) {
    params.validate();
    const int d = params.fock.composite_dim();
    Matrix u = Matrix::Identity(d, d);
    for (const auto& seg : seq.segments()) {
        const DriveParams p = segment_params(seg, params);
        const double duration = segment_duration(seg, p);
        if (seg.envelope == Envelope::rectangular) {
            u = matrix_exponential(build_hamiltonian(p), duration).matrix() * u;
        } else {
            const double dt = duration / kGaussianSubsteps;
            for (int k = 0; k < kGaussianSubsteps; ++k) {
                DriveParams sub = p;
                sub.rabi = p.rabi * gaussian_weight(k);
                u = matrix_exponential(build_hamiltonian(sub), dt).matrix() * u;
            }
        }
    }
    return {SpaceTag::composite, std::move(u)};
}

SpinMotionState propagate(const SpinMotionState& state, const PulseSequence& seq, const DriveParams& params) {
    if (!(state.fock() == params.fock)) throw DimensionMismatch("propagate: state and drive use different Fock spaces");
    return apply_unitary(state, sequence_propagator(seq, params));
}

double transfer_infidelity(const PulseSequence& seq, const DriveParams& params, double initial_nbar) {
    const auto init = thermal_state(params.fock, initial_nbar, Eigen::Vector2cd(1.0, 0.0));
    return 1.0 - propagate(init, seq, params).population(1);
}

std::vector<TrajectoryPoint> phase_space_trajectory(const SpinMotionState& state, const PulseSequence& seq,
                                                    const DriveParams& params, int samples_per_segment) {
    if (samples_per_segment < 2) throw DomainError("phase_space_trajectory: samples_per_segment must be >= 2");
    if (!(state.fock() == params.fock))
        throw DimensionMismatch("phase_space_trajectory: state and drive use different Fock spaces");
    params.validate();
    const Operator x = position_operator(params.fock);
    const Operator p = momentum_operator(params.fock);

    std::vector<TrajectoryPoint> out;
    SpinMotionState current = state;
    double t = 0.0;
    auto record = [&] { out.push_back({t, expectation(current, x).real(), expectation(current, p).real()}); };
    record();

    const int steps = samples_per_segment - 1;
    for (const auto& seg : seq.segments()) {
        const DriveParams sp = segment_params(seg, params);
        const double duration = segment_duration(seg, sp);
        if (seg.envelope == Envelope::rectangular) {
            const Operator step = matrix_exponential(build_hamiltonian(sp), duration / steps);
            for (int k = 0; k < steps; ++k) {
                current = apply_unitary(current, step);
                t += duration / steps;
                record();
            }
        } else {
            // Sample at sub-step boundaries; record roughly steps points per segment.
            const double dt = duration / kGaussianSubsteps;
            const int every = std::max(1, kGaussianSubsteps / steps);
            for (int k = 0; k < kGaussianSubsteps; ++k) {
                DriveParams sub = sp;
                sub.rabi = sp.rabi * gaussian_weight(k);
                current = apply_unitary(current, matrix_exponential(build_hamiltonian(sub), dt));
                t += dt;
                if ((k + 1) % every == 0 || k + 1 == kGaussianSubsteps) record();
            }
        }
    }
    return out;
}

std::vector<RabiScanRow> scan_optimal_rabi(const DriveParams& base, std::span<const double> rabi_values,
                                           const PulseSequence& seq, int threads) {
    if (rabi_values.empty()) throw DomainError("scan_optimal_rabi: rabi range is empty");
    for (double r : rabi_values)
        if (!(r > 0.0)) throw DomainError("scan_optimal_rabi: every rabi value must be > 0");
    std::vector<RabiScanRow> rows(rabi_values.size());
    const auto init = fock_state(base.fock, 0, 0);
    parallel_for(rabi_values.size(), threads, [&](std::size_t i) {
        DriveParams p = base;
        p.rabi = rabi_values[i];
        const auto out = propagate(init, seq, p);
        rows[i] = {p.rabi, 1.0 - out.population(1), out.mean_occupation()};
    });
    return rows;
}

}  // namespace omgsim
