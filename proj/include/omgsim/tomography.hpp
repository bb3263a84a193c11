#pragma once

// Process tomography: maximum-likelihood Choi reconstruction under CPTP
// constraints, Choi <-> chi conversion in the Pauli basis, and fidelities.
//
// Choi convention: J = sum_{kl} |k><l| (x) E(|k><l|), input factor first, so
// trace preservation reads Tr_out J = I and p = Tr[J (rho^T (x) Pi)].

#include <string>
#include <vector>

#include "json.hpp"

#include "omgsim/hilbert.hpp"

namespace omgsim {

class ProcessMatrix {
  public:
    // Validates CP (min eigenvalue >= -1e-9) and, unless trace_decreasing,
    // TP (|Tr_out J - I| <= 1e-8).
    static ProcessMatrix from_choi(Matrix choi, bool trace_decreasing = false);
    static ProcessMatrix from_chi(const Matrix& chi, bool trace_decreasing = false);
    static ProcessMatrix from_unitary(const Matrix& u);
    static ProcessMatrix from_kraus(const std::vector<Matrix>& kraus);

    int dim() const { return dim_; }
    const Matrix& choi() const { return choi_; }
    Matrix chi() const;

    // E(rho) = Tr_in[J (rho^T (x) I)].
    Matrix apply(const Matrix& rho) const;

    double tp_defect() const;
    double min_eigenvalue() const;

  private:
    ProcessMatrix(int dim, Matrix choi) : dim_(dim), choi_(std::move(choi)) {}
    int dim_;
    Matrix choi_;
};

// Pauli operator basis for d = 2^n: tensor products of {I, X, Y, Z}, first
// factor most significant.
std::vector<Matrix> pauli_basis(int dim);

// chi = V^dag J V / d^2 with V's columns v_m[k d + j] = (P_m)_{jk}.
Matrix choi_to_chi(const Matrix& choi);
Matrix chi_to_choi(const Matrix& chi);

double process_fidelity(const Matrix& chi, const Matrix& chi_ideal);
double average_fidelity(double process_fidelity, int dim);
double loss_scaled_fidelity(double average_fidelity, double survival);

// R_Z(theta_1) R_X(pi) R_Z(theta_2) on a qubit.
ProcessMatrix ideal_mcm_process(double theta_1, double theta_2);

struct TomographyDataset {
    int dim = 2;
    std::vector<Matrix> inputs;                     // density matrices
    std::vector<std::vector<Matrix>> settings;      // POVM effects per measurement setting
    std::vector<std::vector<std::vector<double>>> counts;  // [input][setting][outcome]
    std::vector<double> survival;                   // per input, optional

    void validate() const;
};

// {|0>, |1>, (|0>+|1>)/sqrt2, (|0>-i|1>)/sqrt2}
std::vector<Matrix> standard_qubit_inputs();
// Projective X, Y and Z measurements, outcome +1 first.
std::vector<std::vector<Matrix>> pauli_measurement_settings();

// Exact outcome probabilities, same layout as counts.
std::vector<std::vector<std::vector<double>>> outcome_probabilities(const ProcessMatrix& proc,
                                                                    const std::vector<Matrix>& inputs,
                                                                    const std::vector<std::vector<Matrix>>& settings);

// Dataset with real-valued "counts" equal to the exact probabilities.
TomographyDataset exact_dataset(const ProcessMatrix& proc, const std::vector<Matrix>& inputs,
                                const std::vector<std::vector<Matrix>>& settings);

// Multinomial sampling with `shots` per (input, setting).
TomographyDataset sampled_dataset(const ProcessMatrix& proc, const std::vector<Matrix>& inputs,
                                  const std::vector<std::vector<Matrix>>& settings, int shots, std::uint64_t seed);

struct MleOptions {
    int max_iter = 10000;
    double tol = 1e-10;
};

struct ReconstructionResult {
    ProcessMatrix process;
    std::vector<double> log_likelihood;  // one entry per accepted iteration, starting at the initial guess
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

ReconstructionResult reconstruct_process(const TomographyDataset& data, const MleOptions& options = {});

double log_likelihood(const ProcessMatrix& proc, const TomographyDataset& data);

struct FidelityReport {
    double process_fidelity;
    double average_fidelity;
    double average_fidelity_loss_scaled;
    double survival;
    std::vector<double> input_fidelities;  // Tr[E(rho) E_ideal(rho)] per input
};

FidelityReport fidelity_report(const ProcessMatrix& proc, const ProcessMatrix& ideal, const TomographyDataset& data);

// JSON: {inputs: [[x, y, z], ...] or density matrices, effects: [[matrix, ...] per setting],
//        counts: [input][setting][outcome], survival: [...]}; matrices are row-major lists of [re, im].
TomographyDataset dataset_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TomographyDataset& data);
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& doc);

}  // namespace omgsim
