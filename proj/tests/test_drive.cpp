#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "omgsim/drive.hpp"
#include "omgsim/errors.hpp"
#include "omgsim/rng.hpp"

using namespace omgsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix rx(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta / 2), cplx(0, -std::sin(theta / 2)), cplx(0, -std::sin(theta / 2)), std::cos(theta / 2);
    return r;
}

// 2x2 block of U acting on {|g,0>, |m,0>}.
Matrix orbital_block(const Matrix& u, int levels) {
    Matrix b(2, 2);
    b << u(0, 0), u(0, levels), u(levels, 0), u(levels, levels);
    return b;
}

DriveParams nominal_params(double rabi_khz, int n_max = 11) {
    DriveParams p;
    const double w = kTwoPi * 10e3;
    p.fock = FockSpace(n_max, w);
    p.rabi = kTwoPi * rabi_khz * 1e3;
    p.lamb_dicke = lamb_dicke_parameter(constants::clock_wavelength, constants::yb171_mass, w);
    return p;
}

}  // namespace

TEST_SUITE("drive") {

TEST_CASE("Lamb-Dicke parameter for the clock transition") {
    // Direct evaluation of (2 pi / lambda) sqrt(hbar / (2 m w)) with literal constants.
    const double m = 170.936 * 1.66053906660e-27;
    const double oracle10 = (2 * 3.141592653589793 / 578e-9) * std::sqrt(1.054571817e-34 / (2 * m * 2 * 3.141592653589793 * 10e3));
    const double eta10 = lamb_dicke_parameter(578e-9, constants::yb171_mass, kTwoPi * 10e3);
    const double eta58 = lamb_dicke_parameter(578e-9, constants::yb171_mass, kTwoPi * 58e3);
    CHECK(eta10 == doctest::Approx(oracle10).epsilon(1e-12));
    CHECK(eta10 == doctest::Approx(0.591).epsilon(1e-3));
    CHECK(eta58 == doctest::Approx(0.245).epsilon(2e-3));
    CHECK(eta58 / eta10 == doctest::Approx(std::sqrt(10.0 / 58.0)).epsilon(1e-12));
}

TEST_CASE("sequence validation") {
    CHECK_THROWS_AS(PulseSequence(SequenceLabel::custom, {}), DomainError);
    CHECK_THROWS_AS(PulseSequence(SequenceLabel::custom, {{-1.0, 0.0, std::nullopt, Envelope::rectangular}}),
                    DomainError);
    auto bad = PulseSequence::corpse90().segments();
    bad[1].angle += 0.01;
    CHECK_THROWS_AS(PulseSequence(SequenceLabel::corpse90, bad), DomainError);
    CHECK(PulseSequence::mpp().segments().size() == 6);
    CHECK(PulseSequence::corpse90().total_angle() * 180.0 / std::numbers::pi == doctest::Approx(727.2));
}

TEST_CASE("json round trip in degrees") {
    auto seq = PulseSequence::mpp();
    auto doc = to_json(seq);
    CHECK(doc["label"] == "mpp");
    CHECK(doc["segments"][1]["angle_deg"].get<double>() == doctest::Approx(318.6));
    CHECK(doc["segments"][1]["phase_deg"].get<double>() == doctest::Approx(180.0));
    auto back = pulse_sequence_from_json(doc);
    CHECK(back.label() == SequenceLabel::mpp);
    for (std::size_t i = 0; i < seq.segments().size(); ++i)
        CHECK(back.segments()[i].angle == doctest::Approx(seq.segments()[i].angle).epsilon(1e-14));

    nlohmann::json custom = {{"label", "custom"},
                             {"segments", {{{"angle_deg", 90.0}, {"phase_deg", 90.0}, {"detuning_hz", 1000.0}}}}};
    auto c = pulse_sequence_from_json(custom);
    REQUIRE(c.segments()[0].detuning.has_value());
    CHECK(*c.segments()[0].detuning == doctest::Approx(kTwoPi * 1000.0));
}

TEST_CASE("hamiltonian is Hermitian and has the stated block structure") {
    auto p = nominal_params(80.0, 7);
    p.detuning = 123.0;
    p.phase = 0.4;
    const Matrix h = build_hamiltonian(p).matrix();
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(h(8 + 3, 8 + 3).real() == doctest::Approx(3 * p.fock.trap_frequency() - 123.0));
    p.lamb_dicke = 0.0;
    const Matrix h0 = build_hamiltonian(p).matrix();
    // eta = 0: coupling only between equal motional levels.
    CHECK(std::abs(h0(8 + 2, 3)) == 0.0);
    CHECK(h0(8 + 2, 2) == std::polar(0.5 * p.rabi, 0.4));
}

TEST_CASE("pi pulse at eta = 0 transfers every motional state") {
    Rng rng(3);
    auto p = nominal_params(80.0, 7);
    p.lamb_dicke = 0.0;
    for (int n = 0; n <= 7; ++n) {
        auto out = propagate(fock_state(p.fock, n, 0), PulseSequence::pi_pulse(), p);
        CHECK(1.0 - out.population(1) < 1e-12);
    }
    auto th = thermal_state(p.fock, 0.3, Eigen::Vector2cd(1.0, 0.0));
    CHECK(1.0 - propagate(th, PulseSequence::pi_pulse(), p).population(1) < 1e-12);
    CHECK(transfer_infidelity(PulseSequence::mpp(), p) < 1e-12);
}

TEST_CASE("composite blocks at eta = 0 realise the target rotations") {
    auto p = nominal_params(80.0, 5);
    p.lamb_dicke = 0.0;
    const int lv = p.fock.levels();
    const Matrix corpse = sequence_propagator(PulseSequence::corpse90(), p).matrix();
    CHECK(distance_up_to_phase(orbital_block(corpse, lv), rx(std::numbers::pi / 2)) < 1e-9);
    const Matrix mpp = sequence_propagator(PulseSequence::mpp(), p).matrix();
    CHECK(distance_up_to_phase(orbital_block(mpp, lv), rx(std::numbers::pi)) < 1e-9);
}

TEST_CASE("drive off conserves mean occupation") {
    auto p = nominal_params(0.0, 9);
    p.rabi = 0.0;
    auto s = thermal_state(p.fock, 0.4, Eigen::Vector2cd(std::sqrt(0.5), std::sqrt(0.5)));
    // Zero-angle custom segment: duration zero; use explicit free evolution instead.
    auto u = matrix_exponential(build_hamiltonian(p), 3.7e-4);
    auto out = apply_unitary(s, u);
    CHECK(out.mean_occupation() == doctest::Approx(s.mean_occupation()).epsilon(1e-14));
}

TEST_CASE("empty custom sequence is rejected before propagation") {
    CHECK_THROWS_AS(PulseSequence(SequenceLabel::custom, std::vector<PulseSegment>{}), DomainError);
    auto p = nominal_params(80.0, 5);
    CHECK_THROWS_AS(propagate(fock_state(FockSpace(6, p.fock.trap_frequency()), 0, 0), PulseSequence::pi_pulse(), p),
                    DimensionMismatch);
}

TEST_CASE("pi pulse versus MPP at the operating point") {
    auto p = nominal_params(80.0);
    const double eps_pi = transfer_infidelity(PulseSequence::pi_pulse(), p);
    const double eps_mpp = transfer_infidelity(PulseSequence::mpp(), p);
    CHECK(eps_pi > 1e-3);
    CHECK(eps_pi < 3e-2);
    CHECK(eps_mpp < 5e-4);
    CHECK(eps_pi / eps_mpp > 20.0);
}

TEST_CASE("phase space trajectories") {
    auto p = nominal_params(80.0);
    auto g0 = fock_state(p.fock, 0, 0);
    auto pi_traj = phase_space_trajectory(g0, PulseSequence::pi_pulse(), p, 20);
    REQUIRE(pi_traj.size() == 20);
    CHECK(pi_traj.front().t == 0.0);
    CHECK(std::abs(pi_traj.front().x) < 1e-15);
    CHECK(std::abs(pi_traj.front().p) < 1e-15);
    CHECK(std::hypot(pi_traj.back().x, pi_traj.back().p) > 0.2);

    auto mpp_traj = phase_space_trajectory(g0, PulseSequence::mpp(), p, 10);
    CHECK(mpp_traj.size() == 1 + 6 * 9);
    CHECK(std::abs(mpp_traj.back().x) < 0.05);
    CHECK(std::abs(mpp_traj.back().p) < 0.05);
    for (std::size_t i = 1; i < mpp_traj.size(); ++i) CHECK(mpp_traj[i].t > mpp_traj[i - 1].t);

    // Endpoint agrees with a single-shot propagation.
    auto end = propagate(g0, PulseSequence::mpp(), p);
    CHECK(expectation(end, position_operator(p.fock)).real() == doctest::Approx(mpp_traj.back().x).epsilon(1e-9));
    CHECK_THROWS_AS(phase_space_trajectory(g0, PulseSequence::mpp(), p, 1), DomainError);
}

TEST_CASE("gaussian envelope keeps the pulse area") {
    auto p = nominal_params(80.0, 5);
    p.lamb_dicke = 0.0;
    PulseSequence g(SequenceLabel::custom, {{std::numbers::pi, 0.0, std::nullopt, Envelope::gaussian}});
    CHECK(transfer_infidelity(g, p) < 1e-12);
    CHECK(segment_duration(g.segments()[0], p) > std::numbers::pi / p.rabi);
}

TEST_CASE("Rabi scan") {
    auto base = nominal_params(80.0);
    std::vector<double> rabis;
    for (double khz = 40; khz <= 120; khz += 10) rabis.push_back(kTwoPi * khz * 1e3);
    auto rows = scan_optimal_rabi(base, rabis, PulseSequence::mpp(), 2);
    REQUIRE(rows.size() == rabis.size());
    auto best = std::min_element(rows.begin(), rows.end(),
                                 [](const auto& a, const auto& b) { return a.final_nbar < b.final_nbar; });
    CHECK(best->rabi / kTwoPi / 1e3 == doctest::Approx(80.0).epsilon(0.13));

    // Thread count does not change results.
    auto serial = scan_optimal_rabi(base, rabis, PulseSequence::mpp(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].final_nbar == serial[i].final_nbar);

    base.lamb_dicke = 0.0;
    for (const auto& r : scan_optimal_rabi(base, rabis, PulseSequence::pi_pulse())) CHECK(r.transfer_infidelity < 1e-12);
    CHECK_THROWS_AS(scan_optimal_rabi(base, std::vector<double>{}, PulseSequence::mpp()), DomainError);
    CHECK_THROWS_AS(scan_optimal_rabi(base, std::vector<double>{-1.0}, PulseSequence::mpp()), DomainError);
}

}  // TEST_SUITE
