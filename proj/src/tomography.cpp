#include "omgsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "omgsim/errors.hpp"
#include "omgsim/rng.hpp"

namespace omgsim {

namespace {

constexpr double kCpTol = 1e-9;
constexpr double kTpTol = 1e-8;

int dim_from_choi(const Matrix& choi) {
    if (choi.rows() != choi.cols()) throw DimensionMismatch("Choi matrix must be square");
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(choi.rows()))));
    if (d < 1 || d * d != choi.rows()) throw DimensionMismatch("Choi matrix size must be d^2");
    return d;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix trace_out(const Matrix& j, int d) {
    Matrix out = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int s = 0; s < d; ++s) out(k, l) += j(k * d + s, l * d + s);
    return out;
}

// |U>> with v[k d + j] = U_{jk}
Vector vectorize(const Matrix& u) {
    const int d = static_cast<int>(u.rows());
    Vector v(d * d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) v(k * d + j) = u(j, k);
    return v;
}

Matrix pauli_columns(int d) {
    const auto basis = pauli_basis(d);
    Matrix v(d * d, d * d);
    for (int m = 0; m < d * d; ++m) v.col(m) = vectorize(basis[m]);
    return v;
}

double min_eig(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Matrix inverse_sqrt(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw FitError("Lagrange operator lost positivity during reconstruction");
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
}

struct Term {
    Matrix op;     // rho^T (x) Pi
    double weight; // count / total counts
};

double likelihood(const Matrix& j, const std::vector<Term>& terms) {
    double l = 0.0;
    for (const auto& t : terms) {
        const double p = (j.cwiseProduct(t.op.transpose())).sum().real();
        if (p <= 0.0) return -INFINITY;
        l += t.weight * std::log(p);
    }
    return l;
}

bool spans_operator_space(const std::vector<Term>& terms, int d) {
    const int n = d * d * d * d;
    if (static_cast<int>(terms.size()) < n) return false;
    Matrix rows(terms.size(), n);
    for (std::size_t i = 0; i < terms.size(); ++i)
        rows.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vector>(terms[i].op.data(), n).transpose();
    // Gram matrix is n x n; rank via its eigenvalues.
    const Matrix gram = rows.adjoint() * rows;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return ev.minCoeff() > 1e-10 * ev.maxCoeff();
}

}  // namespace

// ---- ProcessMatrix ---------------------------------------------------------

ProcessMatrix ProcessMatrix::from_choi(Matrix choi, bool trace_decreasing) {
    const int d = dim_from_choi(choi);
    if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw NonHermitianError("Choi matrix is not Hermitian");
    choi = hermitian_part(choi);
    const double lo = min_eig(choi);
    if (lo < -kCpTol) {
        std::ostringstream os;
        os << "Choi matrix is not completely positive (min eigenvalue " << lo << ")";
        throw DomainError(os.str());
    }
    const Matrix tr = trace_out(choi, d);
    if (trace_decreasing) {
        if (-min_eig(Matrix::Identity(d, d) - tr) > kTpTol) throw DomainError("process increases trace");
    } else if ((tr - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTpTol) {
        throw DomainError("process is not trace preserving");
    }
    return ProcessMatrix(d, std::move(choi));
}

ProcessMatrix ProcessMatrix::from_chi(const Matrix& chi, bool trace_decreasing) {
    return from_choi(chi_to_choi(chi), trace_decreasing);
}

ProcessMatrix ProcessMatrix::from_unitary(const Matrix& u) {
    if (u.rows() != u.cols()) throw DimensionMismatch("unitary must be square");
    if (unitarity_defect(u) > 1e-10) throw DomainError("matrix is not unitary");
    const Vector v = vectorize(u);
    return from_choi(v * v.adjoint());
}

ProcessMatrix ProcessMatrix::from_kraus(const std::vector<Matrix>& kraus) {
    if (kraus.empty()) throw DomainError("empty Kraus set");
    const auto d = kraus.front().rows();
    Matrix j = Matrix::Zero(d * d, d * d);
    for (const auto& k : kraus) {
        if (k.rows() != d || k.cols() != d) throw DimensionMismatch("Kraus operators must share one square shape");
        const Vector v = vectorize(k);
        j += v * v.adjoint();
    }
    return from_choi(j, true);
}

Matrix ProcessMatrix::chi() const { return choi_to_chi(choi_); }

Matrix ProcessMatrix::apply(const Matrix& rho) const {
    const int d = dim_;
    if (rho.rows() != d || rho.cols() != d) throw DimensionMismatch("state does not match process dimension");
    Matrix out = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
            if (rho(k, l) == cplx(0.0)) continue;
            out += rho(k, l) * choi_.block(k * d, l * d, d, d);
        }
    return out;
}

double ProcessMatrix::tp_defect() const {
    return (trace_out(choi_, dim_) - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
}

double ProcessMatrix::min_eigenvalue() const { return min_eig(choi_); }

// ---- bases and fidelities --------------------------------------------------

std::vector<Matrix> pauli_basis(int dim) {
    if (dim < 2 || (dim & (dim - 1)) != 0) throw DomainError("Pauli basis needs d = 2^n");
    const cplx i(0.0, 1.0);
    Matrix p[4] = {Matrix::Identity(2, 2), Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)};
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -i, i, 0;
    p[3] << 1, 0, 0, -1;
    std::vector<Matrix> basis(p, p + 4);
    for (int d = 4; d <= dim; d *= 2) {
        std::vector<Matrix> next;
        next.reserve(basis.size() * 4);
        for (const auto& b : basis)
            for (const auto& q : p) next.push_back(kron(b, q));
        basis = std::move(next);
    }
    return basis;
}

Matrix choi_to_chi(const Matrix& choi) {
    const int d = dim_from_choi(choi);
    const Matrix v = pauli_columns(d);
    return hermitian_part(v.adjoint() * choi * v / static_cast<double>(d * d));
}

Matrix chi_to_choi(const Matrix& chi) {
    const int d = dim_from_choi(chi);
    const Matrix v = pauli_columns(d);
    return hermitian_part(v * chi * v.adjoint());
}

double process_fidelity(const Matrix& chi, const Matrix& chi_ideal) {
    if (chi.rows() != chi_ideal.rows() || chi.cols() != chi_ideal.cols())
        throw DimensionMismatch("chi matrices differ in size");
    return (chi * chi_ideal).trace().real();
}

double average_fidelity(double process_fidelity, int dim) {
    if (dim < 1) throw DomainError("dimension must be positive");
    return (dim * process_fidelity + 1.0) / (dim + 1.0);
}

double loss_scaled_fidelity(double average_fidelity, double survival) {
    if (!(survival >= 0.0 && survival <= 1.0)) throw DomainError("survival must lie in [0, 1]");
    return average_fidelity * survival;
}

ProcessMatrix ideal_mcm_process(double theta_1, double theta_2) {
    const cplx i(0.0, 1.0);
    auto rz = [&](double t) {
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = std::exp(-i * (t / 2));
        m(1, 1) = std::exp(i * (t / 2));
        return m;
    };
    Matrix rx(2, 2);
    rx << 0, -i, -i, 0;
    return ProcessMatrix::from_unitary(rz(theta_1) * rx * rz(theta_2));
}

// ---- datasets --------------------------------------------------------------

void TomographyDataset::validate() const {
    if (dim < 2) throw DomainError("dataset dimension must be >= 2");
    if (inputs.empty()) throw EmptyDataError("no input states");
    if (settings.empty()) throw EmptyDataError("no measurement settings");
    for (const auto& rho : inputs) {
        if (rho.rows() != dim || rho.cols() != dim) throw DimensionMismatch("input state has wrong dimension");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw NonHermitianError("input state not Hermitian");
        if (std::abs(rho.trace() - cplx(1.0)) > 1e-10) throw DomainError("input state trace is not 1");
        if (min_eig(rho) < -1e-10) throw DomainError("input state not positive");
    }
    for (const auto& effects : settings) {
        if (effects.empty()) throw EmptyDataError("measurement setting without effects");
        Matrix sum = Matrix::Zero(dim, dim);
        for (const auto& e : effects) {
            if (e.rows() != dim || e.cols() != dim) throw DimensionMismatch("effect has wrong dimension");
            if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw NonHermitianError("effect not Hermitian");
            if (min_eig(e) < -1e-10) throw DomainError("effect not positive");
            sum += e;
        }
        if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
            throw DomainError("effects of a setting do not sum to identity");
    }
    if (counts.size() != inputs.size()) throw DimensionMismatch("counts must have one row per input");
    for (const auto& row : counts) {
        if (row.size() != settings.size()) throw DimensionMismatch("counts must have one entry per setting");
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (row[s].size() != settings[s].size()) throw DimensionMismatch("counts must have one entry per outcome");
            for (double n : row[s])
                if (!std::isfinite(n) || n < 0.0) throw DomainError("counts must be finite and non-negative");
        }
    }
    if (!survival.empty()) {
        if (survival.size() != inputs.size()) throw DimensionMismatch("survival must have one entry per input");
        for (double s : survival)
            if (!(s >= 0.0 && s <= 1.0)) throw DomainError("survival must lie in [0, 1]");
    }
}

std::vector<Matrix> standard_qubit_inputs() {
    const cplx i(0.0, 1.0);
    const double h = 1.0 / std::sqrt(2.0);
    const Eigen::Vector2cd kets[4] = {{1.0, 0.0}, {0.0, 1.0}, {h, h}, {h, -i * h}};
    std::vector<Matrix> out;
    for (const auto& k : kets) out.push_back(k * k.adjoint());
    return out;
}

std::vector<std::vector<Matrix>> pauli_measurement_settings() {
    const auto p = pauli_basis(2);
    const Matrix id = Matrix::Identity(2, 2);
    std::vector<std::vector<Matrix>> out;
    for (int a = 1; a <= 3; ++a) out.push_back({0.5 * (id + p[a]), 0.5 * (id - p[a])});
    return out;
}

std::vector<std::vector<std::vector<double>>> outcome_probabilities(const ProcessMatrix& proc,
                                                                    const std::vector<Matrix>& inputs,
                                                                    const std::vector<std::vector<Matrix>>& settings) {
    std::vector<std::vector<std::vector<double>>> out;
    for (const auto& rho : inputs) {
        const Matrix o = proc.apply(rho);
        auto& row = out.emplace_back();
        for (const auto& effects : settings) {
            auto& probs = row.emplace_back();
            for (const auto& e : effects) probs.push_back(std::max(0.0, (o * e).trace().real()));
        }
    }
    return out;
}

TomographyDataset exact_dataset(const ProcessMatrix& proc, const std::vector<Matrix>& inputs,
                                const std::vector<std::vector<Matrix>>& settings) {
    TomographyDataset data;
    data.dim = proc.dim();
    data.inputs = inputs;
    data.settings = settings;
    data.counts = outcome_probabilities(proc, inputs, settings);
    return data;
}

TomographyDataset sampled_dataset(const ProcessMatrix& proc, const std::vector<Matrix>& inputs,
                                  const std::vector<std::vector<Matrix>>& settings, int shots, std::uint64_t seed) {
    if (shots < 1) throw DomainError("shots must be positive");
    TomographyDataset data = exact_dataset(proc, inputs, settings);
    for (std::size_t i = 0; i < data.counts.size(); ++i)
        for (std::size_t s = 0; s < data.counts[i].size(); ++s) {
            Rng rng(substream_seed(seed, i, s));
            auto& probs = data.counts[i][s];
            std::vector<double> cdf(probs.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < probs.size(); ++k) cdf[k] = (acc += probs[k]);
            std::vector<double> n(probs.size(), 0.0);
            for (int shot = 0; shot < shots; ++shot) {
                const double u = rng.uniform() * acc;
                std::size_t k = 0;
                while (k + 1 < cdf.size() && u >= cdf[k]) ++k;
                n[k] += 1.0;
            }
            probs = std::move(n);
        }
    return data;
}

// ---- reconstruction --------------------------------------------------------

namespace {

std::vector<Term> build_terms(const TomographyDataset& data, std::vector<std::string>* warnings) {
    std::vector<Term> terms;
    double total = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i)
        for (std::size_t s = 0; s < data.settings.size(); ++s) {
            double group = 0.0;
            for (double n : data.counts[i][s]) group += n;
            if (group <= 0.0) {
                if (warnings) {
                    std::ostringstream os;
                    os << "input " << i << ", setting " << s << " has no counts; dropped";
                    warnings->push_back(os.str());
                }
                continue;
            }
            const Matrix rho_t = data.inputs[i].transpose();
            for (std::size_t k = 0; k < data.settings[s].size(); ++k) {
                // Zero-count outcomes still pin the operator span.
                terms.push_back({kron(rho_t, data.settings[s][k]), data.counts[i][s][k]});
                total += data.counts[i][s][k];
            }
        }
    for (auto& t : terms) t.weight /= total;
    return terms;
}

Matrix tp_normalize(const Matrix& j, int d) {
    const Matrix norm = kron(inverse_sqrt(trace_out(j, d)), Matrix::Identity(d, d));
    return hermitian_part(norm * j * norm);
}

// Least-squares linear inversion inside the TP affine space, eigenvalues
// clipped at zero, then mixed with a small full-rank part so the fixed-point
// iteration can still grow any direction. J = sum c_ab P_a (x) P_b / d^2 with
// TP fixing c_a0 = d delta_a0.
Matrix linear_inversion_start(const TomographyDataset& data, int d) {
    const auto basis = pauli_basis(d);
    const int nb = d * d;
    std::vector<Matrix> ops;
    std::vector<double> freq;
    for (std::size_t i = 0; i < data.inputs.size(); ++i)
        for (std::size_t s = 0; s < data.settings.size(); ++s) {
            double group = 0.0;
            for (double n : data.counts[i][s]) group += n;
            if (group <= 0.0) continue;
            for (std::size_t k = 0; k < data.settings[s].size(); ++k) {
                ops.push_back(kron(data.inputs[i].transpose(), data.settings[s][k]));
                freq.push_back(data.counts[i][s][k] / group);
            }
        }
    const int free = nb * (nb - 1);
    Eigen::MatrixXd a(ops.size(), free);
    Eigen::VectorXd b(ops.size());
    const double scale = 1.0 / static_cast<double>(nb);
    for (std::size_t t = 0; t < ops.size(); ++t) {
        // Fixed part: c_00 = d.
        b(static_cast<Eigen::Index>(t)) = freq[t] - d * scale * ops[t].trace().real();
        int col = 0;
        for (int p = 0; p < nb; ++p)
            for (int q = 1; q < nb; ++q)
                a(static_cast<Eigen::Index>(t), col++) = scale * (kron(basis[p], basis[q]) * ops[t]).trace().real();
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    Matrix j = d * scale * Matrix::Identity(nb, nb);
    int col = 0;
    for (int p = 0; p < nb; ++p)
        for (int q = 1; q < nb; ++q) j += c(col++) * scale * kron(basis[p], basis[q]);

    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(j));
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    j = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    constexpr double kMix = 1e-6;
    j = (1.0 - kMix) * j + kMix * Matrix::Identity(nb, nb) / static_cast<double>(d);
    return tp_normalize(j, d);
}

}  // namespace

double log_likelihood(const ProcessMatrix& proc, const TomographyDataset& data) {
    data.validate();
    if (proc.dim() != data.dim) throw DimensionMismatch("process and dataset dimensions differ");
    const auto terms = build_terms(data, nullptr);
    if (terms.empty()) throw EmptyDataError("dataset has no counts");
    return likelihood(proc.choi(), terms);
}

ReconstructionResult reconstruct_process(const TomographyDataset& data, const MleOptions& options) {
    data.validate();
    if (options.max_iter < 1) throw DomainError("max_iter must be positive");
    if (!(options.tol > 0.0)) throw DomainError("tol must be positive");
    const int d = data.dim;
    const int dd = d * d;

    std::vector<std::string> warnings;
    const auto terms = build_terms(data, &warnings);
    if (!spans_operator_space(terms, d))
        throw IncompleteDataError("preparations and measurements do not span the operator space");

    std::vector<Term> active;
    for (const auto& t : terms)
        if (t.weight > 0.0) active.push_back(t);

    // Start from whichever of the maximally mixed map and the linear-inversion
    // estimate is more likely.
    Matrix j = Matrix::Identity(dd, dd) / static_cast<double>(d);
    double l = likelihood(j, active);
    {
        const Matrix li = linear_inversion_start(data, d);
        const double l_li = likelihood(li, active);
        if (l_li > l) {
            j = li;
            l = l_li;
        }
    }
    std::vector<double> trace{l};

    const Matrix id = Matrix::Identity(dd, dd);
    double eps = 1.0;
    bool converged = false;
    int iter = 0;
    while (iter < options.max_iter) {
        ++iter;
        Matrix r = Matrix::Zero(dd, dd);
        for (const auto& t : active) {
            const double p = (j.cwiseProduct(t.op.transpose())).sum().real();
            r += (t.weight / p) * t.op;
        }
        r = hermitian_part(r);

        bool accepted = false;
        while (eps > 1e-14) {
            const Matrix k = id + eps * r;
            const Matrix next = tp_normalize(k * j * k, d);
            const double l_next = likelihood(next, active);
            if (l_next >= l) {
                const double gain = l_next - l;
                j = std::move(next);
                l = l_next;
                trace.push_back(l);
                accepted = true;
                if (gain < options.tol && eps >= 1.0) converged = true;
                eps = std::min(eps * 1.5, 1e3);
                break;
            }
            eps *= 0.5;
        }
        if (!accepted) {
            // No ascent direction left at machine precision: stationary point.
            converged = true;
            break;
        }
        if (converged) break;
    }
    if (!converged) {
        std::ostringstream os;
        os << "maximum-likelihood iteration hit max_iter = " << options.max_iter << " before converging";
        warnings.push_back(os.str());
    }

    // Enforce exact TP against round-off before validation.
    j = tp_normalize(j, d);
    return {ProcessMatrix::from_choi(j), std::move(trace), iter, converged, std::move(warnings)};
}

FidelityReport fidelity_report(const ProcessMatrix& proc, const ProcessMatrix& ideal, const TomographyDataset& data) {
    if (proc.dim() != ideal.dim()) throw DimensionMismatch("process and ideal dimensions differ");
    FidelityReport rep{};
    rep.process_fidelity = process_fidelity(proc.chi(), ideal.chi());
    rep.average_fidelity = average_fidelity(rep.process_fidelity, proc.dim());
    rep.survival = 1.0;
    if (!data.survival.empty()) {
        double s = 0.0;
        for (double v : data.survival) s += v;
        rep.survival = s / static_cast<double>(data.survival.size());
    }
    rep.average_fidelity_loss_scaled = loss_scaled_fidelity(rep.average_fidelity, rep.survival);
    for (const auto& rho : data.inputs)
        rep.input_fidelities.push_back((proc.apply(rho) * ideal.apply(rho)).trace().real());
    return rep;
}

// ---- JSON ------------------------------------------------------------------

nlohmann::json matrix_to_json(const Matrix& m) {
    auto out = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
    return out;
}

Matrix matrix_from_json(const nlohmann::json& doc) {
    if (!doc.is_array() || doc.empty()) throw ConfigError("matrix must be a non-empty list of [re, im] pairs");
    const auto n = doc.size();
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(n))));
    if (static_cast<std::size_t>(d * d) != n) throw ConfigError("matrix entry count must be a perfect square");
    Matrix m(d, d);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& e = doc[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError("matrix entries must be [re, im] pairs");
        m(static_cast<Eigen::Index>(k) / d, static_cast<Eigen::Index>(k) % d) =
            cplx(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

TomographyDataset dataset_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("tomography dataset must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "inputs" && key != "effects" && key != "counts" && key != "survival")
            throw ConfigError("unknown key in tomography dataset: " + key);
    for (const char* key : {"inputs", "effects", "counts"})
        if (!doc.contains(key)) throw ConfigError(std::string("tomography dataset is missing \"") + key + "\"");

    TomographyDataset data;
    const auto paulis = pauli_basis(2);
    for (const auto& in : doc.at("inputs")) {
        if (in.is_array() && in.size() == 3 && in[0].is_number()) {
            Matrix rho = 0.5 * paulis[0];
            for (int a = 0; a < 3; ++a) rho += 0.5 * in[a].get<double>() * paulis[a + 1];
            data.inputs.push_back(rho);
        } else {
            data.inputs.push_back(matrix_from_json(in));
        }
    }
    for (const auto& setting : doc.at("effects")) {
        auto& effects = data.settings.emplace_back();
        for (const auto& e : setting) effects.push_back(matrix_from_json(e));
    }
    try {
        data.counts = doc.at("counts").get<std::vector<std::vector<std::vector<double>>>>();
        if (doc.contains("survival")) data.survival = doc.at("survival").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed counts or survival: ") + e.what());
    }
    if (!data.inputs.empty()) data.dim = static_cast<int>(data.inputs.front().rows());
    data.validate();
    return data;
}

nlohmann::json to_json(const TomographyDataset& data) {
    nlohmann::json doc;
    doc["inputs"] = nlohmann::json::array();
    for (const auto& rho : data.inputs) doc["inputs"].push_back(matrix_to_json(rho));
    doc["effects"] = nlohmann::json::array();
    for (const auto& setting : data.settings) {
        auto arr = nlohmann::json::array();
        for (const auto& e : setting) arr.push_back(matrix_to_json(e));
        doc["effects"].push_back(arr);
    }
    doc["counts"] = data.counts;
    if (!data.survival.empty()) doc["survival"] = data.survival;
    return doc;
}

}  // namespace omgsim
