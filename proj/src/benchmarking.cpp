#include "omgsim/benchmarking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "omgsim/errors.hpp"
#include "omgsim/parallel.hpp"
#include "omgsim/rng.hpp"

namespace omgsim {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

Mat2 pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

// exp(-i angle/2 (nx X + nz Z)) for a unit axis in the x-z plane.
Mat2 rotation_xz(double angle, double nx, double nz) {
    return std::cos(angle / 2) * Mat2::Identity() - kI * std::sin(angle / 2) * (nx * pauli_x() + nz * pauli_z());
}

// Phase-normalised key for comparing unitaries up to global phase.
std::array<long long, 8> phase_key(const Mat2& u) {
    int lead = 0;
    for (int k = 0; k < 4; ++k)
        if (std::abs(u(k / 2, k % 2)) > 1e-6) {
            lead = k;
            break;
        }
    const cplx z = u(lead / 2, lead % 2);
    const Mat2 v = u * (std::abs(z) / z);
    std::array<long long, 8> key{};
    for (int k = 0; k < 4; ++k) {
        key[2 * k] = std::llround(v(k / 2, k % 2).real() * 1e6);
        key[2 * k + 1] = std::llround(v(k / 2, k % 2).imag() * 1e6);
    }
    return key;
}

CliffordTable build_table() {
    CliffordTable t;
    std::map<std::array<long long, 8>, int> seen;
    std::vector<std::string> frontier{""};
    int found = 0;
    // Breadth-first over words in length order, lexicographic within a length
    // ('X' < 'Z'); the first word to reach a group element represents it.
    for (int len = 0; found < kCliffordCount && len <= 12; ++len) {
        std::vector<std::string> next;
        for (const auto& w : frontier) {
            const Mat2 u = word_unitary(w);
            const auto key = phase_key(u);
            if (!seen.contains(key)) {
                seen.emplace(key, found);
                t.words[found] = w;
                t.unitaries[found] = u;
                ++found;
            }
            next.push_back(w + "X");
            next.push_back(w + "Z");
        }
        frontier = std::move(next);
    }
    if (found != kCliffordCount) throw Error("Clifford compilation did not close");

    for (int i = 0; i < kCliffordCount; ++i) {
        for (int j = 0; j < kCliffordCount; ++j) {
            const int k = t.index_of(t.unitaries[i] * t.unitaries[j]);
            if (k < 0) throw Error("Clifford table is not closed under composition");
            t.product[i][j] = k;
        }
    }
    t.identity = t.index_of(Mat2::Identity());
    for (int i = 0; i < kCliffordCount; ++i)
        for (int j = 0; j < kCliffordCount; ++j)
            if (t.product[j][i] == t.identity) t.inverse[i] = j;
    t.bit_flip = t.index_of(pauli_x());

    for (const auto& w : t.words) {
        t.mean_length += static_cast<double>(w.size());
        t.mean_x_count += static_cast<double>(std::count(w.begin(), w.end(), 'X'));
        t.mean_z_count += static_cast<double>(std::count(w.begin(), w.end(), 'Z'));
    }
    t.mean_length /= kCliffordCount;
    t.mean_x_count /= kCliffordCount;
    t.mean_z_count /= kCliffordCount;
    return t;
}

struct ProjectionFit {
    double A, B, chi2;
};

// For fixed p the model is linear in (A, B).
ProjectionFit project(double p, std::span<const double> m, std::span<const double> y, std::span<const double> w) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = std::pow(p, m[i]);
        sw += w[i];
        sx += w[i] * x;
        sy += w[i] * y[i];
        sxx += w[i] * x * x;
        sxy += w[i] * x * y[i];
    }
    const double det = sw * sxx - sx * sx;
    ProjectionFit f{0.0, sy / sw, 0.0};
    if (std::abs(det) > 1e-14 * sw * sxx) {
        f.A = (sw * sxy - sx * sy) / det;
        f.B = (sy - f.A * sx) / sw;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double r = y[i] - f.A * std::pow(p, m[i]) - f.B;
        f.chi2 += w[i] * r * r;
    }
    return f;
}

double chi2_of(double A, double p, double B, std::span<const double> m, std::span<const double> y,
               std::span<const double> w) {
    double c = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double r = y[i] - A * std::pow(p, m[i]) - B;
        c += w[i] * r * r;
    }
    return c;
}

void aggregate(const std::vector<RBCircuit>& circuits, const std::vector<double>& per_circuit, RBResult& res) {
    std::map<int, std::vector<double>> by_depth;
    for (std::size_t c = 0; c < circuits.size(); ++c) by_depth[circuits[c].depth].push_back(per_circuit[c]);
    for (const auto& [depth, vals] : by_depth) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double se =
            vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1) / static_cast<double>(vals.size())) : 0.0;
        res.depths.push_back(depth);
        res.success_mean.push_back(mean);
        res.success_stderr.push_back(se);
    }
}

void fit_result(RBResult& res) {
    std::vector<double> m(res.depths.begin(), res.depths.end());
    std::vector<double> w;
    bool all_have_error = true;
    for (double se : res.success_stderr) all_have_error = all_have_error && se > 0.0;
    if (all_have_error)
        for (double se : res.success_stderr) w.push_back(1.0 / (se * se));
    try {
        res.fit = fit_rb_decay(m, res.success_mean, w);
    } catch (const FitError& e) {
        res.fit = RBFit{};
        res.fit.r = std::numeric_limits<double>::quiet_NaN();
        res.warnings.push_back(std::string("decay fit failed: ") + e.what());
    }
    res.error_per_clifford = res.fit.r;
    if (res.fit.p <= 0.0 || res.fit.p > 1.0) res.warnings.push_back("fitted decay parameter outside (0, 1]");
}

}  // namespace

void NativeGateSet::validate() const {
    if (!(gate_duration > 0.0)) throw DomainError("NativeGateSet: gate_duration must be > 0");
}

void NoiseModel::validate() const {
    if (!(intensity_rms >= 0.0) || !(site_offset >= 0.0) || !(scatter_rate >= 0.0))
        throw DomainError("NoiseModel: noise amplitudes and rates must be >= 0");
    if (!(theta_x_deg >= 0.0 && theta_x_deg <= 10.0)) throw DomainError("NoiseModel: theta_x must be in [0, 10] deg");
    if (!(leakage_fraction >= 0.0 && leakage_fraction <= 1.0))
        throw DomainError("NoiseModel: leakage_fraction must be in [0, 1]");
    if (!std::isfinite(detuning)) throw DomainError("NoiseModel: detuning must be finite");
}

Mat2 native_x() { return rotation_xz(kPi / 2, 1.0, 0.0); }
Mat2 native_z() { return rotation_xz(kPi / 2, 0.0, 1.0); }

Mat2 word_unitary(const std::string& word) {
    Mat2 u = Mat2::Identity();
    for (char c : word) {
        if (c == 'X') u = native_x() * u;
        else if (c == 'Z') u = native_z() * u;
        else throw DomainError(std::string("unknown native gate '") + c + "'");
    }
    return u;
}

int CliffordTable::index_of(const Mat2& u) const {
    const auto key = phase_key(u);
    for (int i = 0; i < kCliffordCount; ++i)
        if (phase_key(unitaries[i]) == key) return i;
    return -1;
}

const CliffordTable& clifford_table() {
    static const CliffordTable table = build_table();
    return table;
}

CompiledCliffords compile_clifford_table(const NativeGateSet& gateset) {
    gateset.validate();
    const auto& t = clifford_table();
    return {&t, gateset.kind == GateSetKind::nuclear ? t.mean_length : t.mean_x_count};
}

std::vector<RBCircuit> generate_rb_sequences(std::span<const int> depths, int n_per_depth, std::uint64_t seed) {
    if (depths.empty()) throw DomainError("generate_rb_sequences: depths must be non-empty");
    if (n_per_depth < 1) throw DomainError("generate_rb_sequences: n_per_depth must be >= 1");
    const auto& t = clifford_table();
    std::vector<RBCircuit> out;
    for (int depth : depths) {
        if (depth < 0) throw DomainError("generate_rb_sequences: depths must be >= 0");
        for (int k = 0; k < n_per_depth; ++k) {
            Rng rng(substream_seed(seed, static_cast<std::uint64_t>(depth), static_cast<std::uint64_t>(k)));
            RBCircuit c;
            c.depth = depth;
            int total = t.identity;
            for (int i = 0; i < depth; ++i) {
                const int g = static_cast<int>(rng.index(kCliffordCount));
                c.cliffords.push_back(g);
                total = t.product[g][total];
            }
            c.target = static_cast<int>(rng.index(2));
            int recovery = t.inverse[total];
            if (c.target == 1) recovery = t.product[t.bit_flip][recovery];
            c.cliffords.push_back(recovery);
            out.push_back(std::move(c));
        }
    }
    return out;
}

double ideal_success(const RBCircuit& circuit) {
    const auto& t = clifford_table();
    Eigen::Vector2cd psi(1.0, 0.0);
    for (int g : circuit.cliffords) psi = t.unitaries[g] * psi;
    return std::norm(psi(circuit.target));
}

RBFit fit_rb_decay(std::span<const double> depths, std::span<const double> success, std::span<const double> weights) {
    if (depths.size() != success.size()) throw DimensionMismatch("fit_rb_decay: depths and success differ in length");
    if (!weights.empty() && weights.size() != depths.size())
        throw DimensionMismatch("fit_rb_decay: weights length mismatch");
    if (std::set<double>(depths.begin(), depths.end()).size() < 3)
        throw FitError("fit_rb_decay: need at least 3 distinct depths");
    const bool weighted = !weights.empty();
    std::vector<double> w(depths.size(), 1.0);
    if (weighted) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) throw FitError("fit_rb_decay: weights must be positive");
            w[i] = weights[i];
        }
    }

    RBFit fit;
    double mean = 0.0;
    for (double y : success) mean += y;
    mean /= static_cast<double>(success.size());
    double spread = 0.0;
    for (double y : success) spread = std::max(spread, std::abs(y - mean));
    if (spread <= 1e-12) {
        fit.flat = true;
        fit.p = 1.0;
        fit.A = 0.0;
        fit.B = mean;
        fit.r = 0.0;
        return fit;
    }

    // Variable projection: scan q = 1 - p on a log grid, then golden-section.
    auto chi2_q = [&](double lq) { return project(1.0 - std::pow(10.0, lq), depths, success, w).chi2; };
    const double lo = -12.0, hi = 0.0;
    const int grid = 241;
    int best = 0;
    double best_chi2 = chi2_q(lo);
    for (int i = 1; i < grid; ++i) {
        const double c = chi2_q(lo + (hi - lo) * i / (grid - 1));
        if (c < best_chi2) {
            best_chi2 = c;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / (grid - 1);
    double b = lo + (hi - lo) * std::min(best + 1, grid - 1) / (grid - 1);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = chi2_q(c), fd = chi2_q(d);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = chi2_q(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = chi2_q(d);
        }
    }
    double p = 1.0 - std::pow(10.0, 0.5 * (a + b));
    auto proj = project(p, depths, success, w);
    double A = proj.A, B = proj.B;

    // Levenberg-Marquardt polish on (A, p, B).
    auto jacobian = [&](double A_, double p_) {
        Eigen::MatrixXd J(depths.size(), 3);
        for (std::size_t i = 0; i < depths.size(); ++i) {
            const double m = depths[i];
            J(i, 0) = std::pow(p_, m);
            J(i, 1) = m == 0.0 ? 0.0 : A_ * m * std::pow(p_, m - 1.0);
            J(i, 2) = 1.0;
        }
        return J;
    };
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    double current = chi2_of(A, p, B, depths, success, w);
    double lambda = 1e-3;
    for (int it = 0; it < 50; ++it) {
        const Eigen::MatrixXd J = jacobian(A, p);
        Eigen::VectorXd r(depths.size());
        for (std::size_t i = 0; i < depths.size(); ++i) r(i) = success[i] - A * std::pow(p, depths[i]) - B;
        Eigen::Matrix3d N = J.transpose() * wv.asDiagonal() * J;
        const Eigen::Vector3d g = J.transpose() * wv.asDiagonal() * r;
        bool improved = false;
        for (int tries = 0; tries < 10 && !improved; ++tries) {
            Eigen::Matrix3d damped = N;
            damped.diagonal() *= 1.0 + lambda;
            const Eigen::Vector3d step = damped.ldlt().solve(g);
            const double pn = std::clamp(p + step(1), 0.0, 1.0);
            const double cn = chi2_of(A + step(0), pn, B + step(2), depths, success, w);
            if (std::isfinite(cn) && cn < current) {
                A += step(0);
                p = pn;
                B += step(2);
                improved = current - cn > 1e-15 * std::max(current, 1e-300);
                current = cn;
                lambda = std::max(lambda / 10.0, 1e-12);
                if (!improved) break;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) break;
    }

    const Eigen::MatrixXd J = jacobian(A, p);
    const Eigen::Matrix3d N = J.transpose() * wv.asDiagonal() * J;
    const Eigen::Vector3d sv = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(N).eigenvalues();
    if (!(sv(0) > 1e-14 * sv(2))) throw FitError("fit_rb_decay: singular normal equations");
    Eigen::Matrix3d cov = N.inverse();
    if (!weighted) {
        const double dof = static_cast<double>(depths.size()) - 3.0;
        cov *= dof > 0.0 ? current / dof : 0.0;
    }
    fit.A = A;
    fit.p = p;
    fit.B = B;
    fit.covariance = cov;
    fit.sigma_A = std::sqrt(std::max(cov(0, 0), 0.0));
    fit.sigma_p = std::sqrt(std::max(cov(1, 1), 0.0));
    fit.sigma_B = std::sqrt(std::max(cov(2, 2), 0.0));
    fit.r = (1.0 - p) / 2.0;
    fit.sigma_r = fit.sigma_p / 2.0;
    return fit;
}

std::vector<int> default_rb_depths() { return {1, 2, 4, 8, 16, 32, 64, 128, 256}; }

int optical_rb_n_max(double initial_nbar) { return initial_nbar > 0.2 ? 11 : 7; }

RBResult simulate_rb_nuclear(std::span<const RBCircuit> circuits, const NoiseModel& noise,
                             const NativeGateSet& gateset, const RBSimOptions& options) {
    noise.validate();
    gateset.validate();
    if (gateset.kind != GateSetKind::nuclear) throw DomainError("simulate_rb_nuclear: needs a nuclear gate set");
    if (options.shots < 1) throw DomainError("simulate_rb_nuclear: shots must be >= 1");
    if (circuits.empty()) throw DomainError("simulate_rb_nuclear: no circuits");
    const auto& table = clifford_table();

    const double t = gateset.gate_duration;
    const double rabi = (kPi / 2) / t;
    const double theta = noise.theta_x_deg * kPi / 180.0;
    const Mat2 z_gate = rotation_xz(kPi / 2, std::sin(theta), std::cos(theta));
    const double p_scatter = 1.0 - std::exp(-noise.scatter_rate * t);
    const double survive_gate = 1.0 - p_scatter * noise.leakage_fraction;
    const double coherent_gate = (1.0 - p_scatter) / survive_gate;

    std::vector<double> per_circuit(circuits.size());
    parallel_for(circuits.size(), options.threads, [&](std::size_t ci) {
        const RBCircuit& circuit = circuits[ci];
        Rng rng(substream_seed(noise.rng_seed, ci));
        const double site = 1.0 + noise.site_offset * rng.normal();
        double acc = 0.0;
        for (int shot = 0; shot < options.shots; ++shot) {
            Eigen::Vector2cd psi(1.0, 0.0);
            double coherent = 1.0;
            double survival = 1.0;
            for (int g : circuit.cliffords) {
                for (char gate : table.words[g]) {
                    if (gate == 'X') {
                        const double drive = rabi * (1.0 + noise.intensity_rms * rng.normal()) * site;
                        const double rate = std::hypot(drive, noise.detuning);
                        psi = rotation_xz(rate * t, drive / rate, noise.detuning / rate) * psi;
                    } else {
                        psi = z_gate * psi;
                    }
                    coherent *= coherent_gate;
                    survival *= survive_gate;
                }
            }
            const double prob = survival * (coherent * std::norm(psi(circuit.target)) + (1.0 - coherent) / 2.0);
            acc += options.sample_outcomes ? (rng.bernoulli(prob) ? 1.0 : 0.0) : prob;
        }
        per_circuit[ci] = acc / options.shots;
    });

    RBResult res;
    res.native_gates_per_clifford = table.mean_length;
    aggregate(std::vector<RBCircuit>(circuits.begin(), circuits.end()), per_circuit, res);
    fit_result(res);
    return res;
}

OpticalRBResult simulate_rb_optical(std::span<const RBCircuit> circuits, const DriveParams& params,
                                    double initial_nbar, const RBSimOptions& options) {
    if (!(initial_nbar >= 0.0)) throw DomainError("simulate_rb_optical: initial_nbar must be >= 0");
    if (options.shots < 1) throw DomainError("simulate_rb_optical: shots must be >= 1");
    if (circuits.empty()) throw DomainError("simulate_rb_optical: no circuits");
    params.validate();
    const auto& table = clifford_table();
    const FockSpace& fock = params.fock;
    const int n = fock.levels();

    // X after k virtual Z gates is driven at phase -k pi/2.
    std::array<Matrix, 4> x_gates;
    for (int k = 0; k < 4; ++k) {
        PulseSequence seg(SequenceLabel::custom, {{kPi / 2, -k * kPi / 2, std::nullopt, Envelope::rectangular}});
        x_gates[k] = sequence_propagator(seg, params).matrix();
    }

    // Thermal |g> state as a sum of weighted pure columns: rho = Psi Psi^dag.
    const auto init = thermal_state(fock, initial_nbar, Eigen::Vector2cd(1.0, 0.0));
    Matrix psi0 = Matrix::Zero(2 * n, n);
    for (int k = 0; k < n; ++k) psi0(k, k) = std::sqrt(init.rho()(k, k).real());

    struct CircuitOutcome {
        double success, nbar, top;
    };
    std::vector<CircuitOutcome> outcomes(circuits.size());
    parallel_for(circuits.size(), options.threads, [&](std::size_t ci) {
        const RBCircuit& circuit = circuits[ci];
        Matrix psi = psi0;
        int frame = 0;
        double top = 0.0;
        auto top_level = [&] { return psi.row(n - 1).squaredNorm() + psi.row(2 * n - 1).squaredNorm(); };
        for (int g : circuit.cliffords) {
            for (char gate : table.words[g]) {
                if (gate == 'X') psi = x_gates[frame] * psi;
                else frame = (frame + 1) % 4;
            }
            top = std::max(top, top_level());
        }
        const double p_target = psi.middleRows(circuit.target * n, n).squaredNorm();
        double nbar = 0.0;
        for (int k = 0; k < n; ++k) nbar += k * (psi.row(k).squaredNorm() + psi.row(n + k).squaredNorm());
        double success = p_target;
        if (options.sample_outcomes) {
            Rng rng(substream_seed(options.seed, ci));
            int hits = 0;
            for (int s = 0; s < options.shots; ++s) hits += rng.bernoulli(p_target) ? 1 : 0;
            success = static_cast<double>(hits) / options.shots;
        }
        outcomes[ci] = {success, nbar, top};
    });

    OpticalRBResult res;
    res.native_gates_per_clifford = table.mean_x_count;
    std::vector<double> per_circuit;
    for (const auto& o : outcomes) {
        per_circuit.push_back(o.success);
        res.final_nbar_mean += o.nbar / static_cast<double>(outcomes.size());
        res.final_nbar_max = std::max(res.final_nbar_max, o.nbar);
        res.top_level_max = std::max(res.top_level_max, o.top);
    }
    aggregate(std::vector<RBCircuit>(circuits.begin(), circuits.end()), per_circuit, res);
    fit_result(res);
    if (res.top_level_max > kTopLevelWarn) {
        std::ostringstream os;
        os << "truncation: top motional level occupation " << res.top_level_max << " exceeds " << kTopLevelWarn;
        res.warnings.push_back(os.str());
    }
    return res;
}

}  // namespace omgsim
