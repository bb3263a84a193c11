#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "omgsim/benchmarking.hpp"
#include "omgsim/errors.hpp"
#include "omgsim/rng.hpp"

using namespace omgsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_distance(const Mat2& a, const Mat2& b) { return distance_up_to_phase(Matrix(a), Matrix(b)); }

// Brute-force oracle: all words of length <= max_len, in the order X < Z.
std::vector<std::string> all_words(int max_len) {
    std::vector<std::string> out{""};
    std::vector<std::string> layer{""};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::string> next;
        for (const auto& w : layer) {
            next.push_back(w + "X");
            next.push_back(w + "Z");
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

}  // namespace

TEST_SUITE("benchmarking") {

TEST_CASE("Clifford table has 24 distinct elements realised by their words") {
    const auto& t = clifford_table();
    for (int i = 0; i < kCliffordCount; ++i) {
        CHECK(phase_distance(t.unitaries[i], word_unitary(t.words[i])) < 1e-12);
        for (int j = 0; j < i; ++j) CHECK(phase_distance(t.unitaries[i], t.unitaries[j]) > 1e-3);
    }
    CHECK(t.words[t.identity].empty());
    CHECK(t.words[t.bit_flip] == "XX");
}

TEST_CASE("Clifford closure and inverses, exhaustive") {
    const auto& t = clifford_table();
    for (int i = 0; i < kCliffordCount; ++i) {
        for (int j = 0; j < kCliffordCount; ++j) {
            const Mat2 prod = t.unitaries[i] * t.unitaries[j];
            CHECK(phase_distance(prod, t.unitaries[t.product[i][j]]) < 1e-12);
        }
        CHECK(phase_distance(t.unitaries[t.inverse[i]] * t.unitaries[i], Mat2::Identity()) < 1e-12);
    }
}

TEST_CASE("compiled words are shortest and lexicographically first") {
    const auto& t = clifford_table();
    for (const auto& w : all_words(6)) {
        const int k = t.index_of(word_unitary(w));
        REQUIRE(k >= 0);
        const auto& best = t.words[k];
        CHECK(best.size() <= w.size());
        if (best.size() == w.size()) CHECK(best <= w);
    }
}

TEST_CASE("mean native gate counts") {
    const auto& t = clifford_table();
    // Exact values of the shortest-word table.
    CHECK(t.mean_length == doctest::Approx(74.0 / 24.0));
    CHECK(t.mean_x_count == doctest::Approx(1.75));
    CHECK(t.mean_z_count == doctest::Approx(32.0 / 24.0));
    auto optical = compile_clifford_table({GateSetKind::optical, 10e-6});
    CHECK(optical.native_gates_per_clifford == doctest::Approx(1.7).epsilon(0.06));
    auto nuclear = compile_clifford_table({GateSetKind::nuclear, 100e-6});
    CHECK(nuclear.native_gates_per_clifford == doctest::Approx(t.mean_length));
    CHECK_THROWS_AS(compile_clifford_table({GateSetKind::nuclear, 0.0}), DomainError);
}

TEST_CASE("sequence generation is deterministic and inverts") {
    std::vector<int> depths{0, 1, 5, 20};
    auto a = generate_rb_sequences(depths, 10, 42);
    auto b = generate_rb_sequences(depths, 10, 42);
    REQUIRE(a.size() == 40);
    bool any_target_one = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].cliffords == b[i].cliffords);
        CHECK(a[i].target == b[i].target);
        CHECK(static_cast<int>(a[i].cliffords.size()) == a[i].depth + 1);
        any_target_one = any_target_one || a[i].target == 1;
    }
    CHECK(any_target_one);
    for (const auto& c : a)
        if (c.depth == 0) {
            const auto& t = clifford_table();
            CHECK(c.cliffords[0] == (c.target == 0 ? t.identity : t.bit_flip));
        }
    // A depth's circuits do not depend on the other depths requested.
    std::vector<int> only{20};
    auto c = generate_rb_sequences(only, 10, 42);
    CHECK(c[3].cliffords == a[33].cliffords);
    CHECK_THROWS_AS(generate_rb_sequences(std::vector<int>{}, 1, 1), DomainError);
    CHECK_THROWS_AS(generate_rb_sequences(depths, 0, 1), DomainError);
}

TEST_CASE("ideal simulation always hits the declared target") {
    std::vector<int> depths{1, 3, 10, 50, 100};
    auto circuits = generate_rb_sequences(depths, 200, 9);
    for (const auto& c : circuits) {
        // Oracle: multiply the word matrices from scratch.
        Eigen::Vector2cd psi(1.0, 0.0);
        for (int g : c.cliffords) psi = word_unitary(clifford_table().words[g]) * psi;
        CHECK(std::norm(psi(c.target)) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(ideal_success(c) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("decay fit recovers exact data") {
    std::vector<double> m{1, 2, 4, 8, 16, 32, 64, 128, 256};
    std::vector<double> y;
    for (double d : m) y.push_back(0.5 * std::pow(0.99, d) + 0.5);
    auto f = fit_rb_decay(m, y);
    CHECK(std::abs(f.A - 0.5) < 1e-9);
    CHECK(std::abs(f.p - 0.99) < 1e-9);
    CHECK(std::abs(f.B - 0.5) < 1e-9);
    CHECK(f.r == doctest::Approx(0.005).epsilon(1e-7));

    // Depth ordering does not matter.
    std::vector<double> m2(m.rbegin(), m.rend()), y2(y.rbegin(), y.rend());
    auto g = fit_rb_decay(m2, y2);
    CHECK(std::abs(g.p - f.p) < 1e-12);
}

TEST_CASE("flat data gives zero error") {
    std::vector<double> m{1, 10, 100};
    std::vector<double> y{1.0, 1.0, 1.0};
    auto f = fit_rb_decay(m, y);
    CHECK(f.flat);
    CHECK(f.r == 0.0);
    CHECK(f.p == 1.0);
}

TEST_CASE("fit needs three distinct depths") {
    std::vector<double> m{1, 1, 2};
    std::vector<double> y{0.9, 0.9, 0.8};
    CHECK_THROWS_AS(fit_rb_decay(m, y), FitError);
}

TEST_CASE("binomial-noise synthetic data: r within 2 sigma") {
    const double A = 0.48, p = 0.996, B = 0.5;
    const double r_true = (1 - p) / 2;
    std::vector<double> m{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
    int inside = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(substream_seed(77, trial));
        std::vector<double> y, w;
        const int shots = 40 * 100;
        for (double d : m) {
            const double prob = A * std::pow(p, d) + B;
            int hits = 0;
            for (int s = 0; s < shots; ++s) hits += rng.bernoulli(prob) ? 1 : 0;
            const double f = static_cast<double>(hits) / shots;
            y.push_back(f);
            const double var = std::max(f * (1 - f), 1.0 / shots) / shots;
            w.push_back(1.0 / var);
        }
        auto fit = fit_rb_decay(m, y, w);
        if (std::abs(fit.r - r_true) <= 2 * fit.sigma_r) ++inside;
    }
    // ~95% coverage expected; allow sampling slack.
    CHECK(inside >= 16);
}

TEST_CASE("noiseless nuclear RB") {
    NoiseModel quiet;
    quiet.intensity_rms = 0.0;
    quiet.site_offset = 0.0;
    quiet.theta_x_deg = 0.0;
    quiet.scatter_rate = 0.0;
    auto circuits = generate_rb_sequences(default_rb_depths(), 5, 1);
    RBSimOptions opt;
    opt.shots = 2;
    auto res = simulate_rb_nuclear(circuits, quiet, NativeGateSet{}, opt);
    CHECK(res.error_per_clifford < 1e-6);
    for (double s : res.success_mean) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nuclear RB error grows with each noise source") {
    std::vector<int> depths{1, 16, 64, 256, 1024};
    auto circuits = generate_rb_sequences(depths, 20, 5);
    RBSimOptions opt;
    opt.shots = 10;
    auto r_of = [&](NoiseModel nm) { return simulate_rb_nuclear(circuits, nm, NativeGateSet{}, opt).error_per_clifford; };
    NoiseModel base;
    base.theta_x_deg = 0.5;
    double prev = -1.0;
    for (double v : {0.0, 0.01, 0.03}) {
        NoiseModel nm = base;
        nm.intensity_rms = v;
        const double r = r_of(nm);
        CHECK(r >= prev);
        prev = r;
    }
    prev = -1.0;
    for (double v : {0.0, 1.0, 3.0}) {
        NoiseModel nm = base;
        nm.theta_x_deg = v;
        const double r = r_of(nm);
        CHECK(r >= prev);
        prev = r;
    }
    prev = -1.0;
    for (double v : {0.0, 1.0, 5.0}) {
        NoiseModel nm = base;
        nm.scatter_rate = v;
        const double r = r_of(nm);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("scatter-only RB matches the depolarising prediction") {
    NoiseModel nm;
    nm.intensity_rms = 0.0;
    nm.site_offset = 0.0;
    nm.theta_x_deg = 0.0;
    nm.scatter_rate = 20.0;
    NativeGateSet gs{GateSetKind::nuclear, 100e-6};
    auto circuits = generate_rb_sequences(std::vector<int>{1, 8, 32, 128, 512}, 10, 2);
    RBSimOptions opt;
    opt.shots = 1;
    auto res = simulate_rb_nuclear(circuits, nm, gs, opt);
    // Depolarising commutes with the gates, so each circuit decays by
    // (1 - p_gate)^{gates}; the fitted r tracks the mean gate count.
    const double p_gate = 1.0 - std::exp(-20.0 * 100e-6);
    const double expect = 0.5 * (1.0 - std::pow(1.0 - p_gate, clifford_table().mean_length));
    CHECK(res.error_per_clifford == doctest::Approx(expect).epsilon(0.1));
}

TEST_CASE("leakage lowers the asymptote") {
    NoiseModel nm;
    nm.intensity_rms = 0.0;
    nm.site_offset = 0.0;
    nm.theta_x_deg = 0.0;
    nm.scatter_rate = 50.0;
    nm.leakage_fraction = 1.0;
    auto circuits = generate_rb_sequences(std::vector<int>{1, 16, 64, 256}, 5, 2);
    RBSimOptions opt;
    opt.shots = 1;
    auto res = simulate_rb_nuclear(circuits, nm, NativeGateSet{}, opt);
    CHECK(res.success_mean.back() < 0.5);
}

TEST_CASE("results do not depend on the worker count") {
    auto circuits = generate_rb_sequences(std::vector<int>{1, 8, 64}, 6, 3);
    RBSimOptions one, four;
    one.shots = four.shots = 5;
    four.threads = 4;
    auto a = simulate_rb_nuclear(circuits, NoiseModel{}, NativeGateSet{}, one);
    auto b = simulate_rb_nuclear(circuits, NoiseModel{}, NativeGateSet{}, four);
    CHECK(a.success_mean == b.success_mean);
}

TEST_CASE("noise model validation") {
    NoiseModel nm;
    nm.theta_x_deg = 11.0;
    CHECK_THROWS_AS(nm.validate(), DomainError);
    nm.theta_x_deg = 1.0;
    nm.scatter_rate = -1.0;
    CHECK_THROWS_AS(nm.validate(), DomainError);
}

TEST_CASE("optical RB without motional coupling is error free") {
    DriveParams p;
    const double w = kTwoPi * 10e3;
    p.fock = FockSpace(optical_rb_n_max(0.05), w);
    p.rabi = kTwoPi * 80e3;
    p.lamb_dicke = 0.0;
    auto circuits = generate_rb_sequences(std::vector<int>{0, 1, 4, 16, 64}, 4, 11);
    auto res = simulate_rb_optical(circuits, p, 0.05);
    CHECK(res.error_per_clifford < 1e-6);
    CHECK(res.success_mean.front() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.native_gates_per_clifford == doctest::Approx(1.75));
}

TEST_CASE("optical RB with motion") {
    DriveParams p;
    const double w = kTwoPi * 10e3;
    p.fock = FockSpace(optical_rb_n_max(0.05), w);
    p.rabi = kTwoPi * 80e3;
    p.lamb_dicke = lamb_dicke_parameter(constants::clock_wavelength, constants::yb171_mass, w);
    auto circuits = generate_rb_sequences(std::vector<int>{2, 8, 32}, 4, 11);
    auto res = simulate_rb_optical(circuits, p, 0.05);
    CHECK(res.error_per_clifford > 0.0);
    // Depth 0 with no recovery flip touches nothing: success is exactly 1.
    RBCircuit idle;
    idle.cliffords = {clifford_table().identity};
    std::vector<RBCircuit> idle_set{idle, idle, idle};
    idle_set[1].depth = 1;
    idle_set[1].cliffords = {clifford_table().identity, clifford_table().identity};
    idle_set[2].depth = 2;
    idle_set[2].cliffords = {clifford_table().identity, clifford_table().identity, clifford_table().identity};
    auto idle_res = simulate_rb_optical(idle_set, p, 0.05);
    CHECK(idle_res.success_mean.front() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.top_level_max < 5e-3);
    CHECK(res.final_nbar_max < 1.6);
    CHECK(optical_rb_n_max(0.4) == 11);
    CHECK(optical_rb_n_max(0.2) == 7);
}

}  // TEST_SUITE
