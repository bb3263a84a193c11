#pragma once

// Dense linear algebra on the composite (orbital) x (truncated Fock) space.
//
// Basis ordering is |orbital> (x) |n> with orbital index 0 = g, 1 = m, so the
// composite index of |o, n> is o * (n_max + 1) + n. Every module relies on
// this ordering.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace omgsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = -1e-10;
inline constexpr double kThermalTailTol = 1e-3;
inline constexpr double kTopLevelWarn = 5e-3;

class FockSpace {
  public:
    FockSpace(int n_max, double trap_frequency);

    int n_max() const { return n_max_; }
    double trap_frequency() const { return trap_frequency_; }
    int levels() const { return n_max_ + 1; }
    int composite_dim() const { return 2 * (n_max_ + 1); }

    bool operator==(const FockSpace&) const = default;

  private:
    int n_max_;
    double trap_frequency_;
};

enum class SpaceTag { orbital, motion, composite };

class Operator {
  public:
    Operator(SpaceTag space, Matrix matrix);

    SpaceTag space() const { return space_; }
    const Matrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    // Promote to the composite space; orbital and motional operators are
    // tensored with the identity on the other factor.
    Operator embedded(const FockSpace& fock) const;

    // Throws DimensionMismatch if the matrix size disagrees with the tag.
    void check_against(const FockSpace& fock) const;

  private:
    SpaceTag space_;
    Matrix matrix_;
};

class SpinMotionState {
  public:
    // Validates Hermiticity, unit trace and positivity.
    SpinMotionState(FockSpace fock, Matrix rho);

    const FockSpace& fock() const { return fock_; }
    const Matrix& rho() const { return rho_; }

    Matrix orbital_marginal() const;   // 2x2, traces out motion
    Matrix motional_marginal() const;  // (n_max+1)^2, traces out orbital

    double population(int orbital) const;
    double mean_occupation() const;
    double top_level_occupation() const;
    double purity() const;

    // Copy with eigenvalues below zero clamped and the trace renormalised.
    SpinMotionState clamped() const;

  private:
    struct Unchecked {};
    SpinMotionState(FockSpace fock, Matrix rho, Unchecked);
    friend SpinMotionState apply_unitary(const SpinMotionState&, const Operator&);
    friend SpinMotionState make_state_unchecked(FockSpace, Matrix);

    FockSpace fock_;
    Matrix rho_;
};

// Internal constructor for maps that preserve the invariants by construction.
SpinMotionState make_state_unchecked(FockSpace fock, Matrix rho);

// Ladder and quadrature operators on the motional factor.
Operator annihilation(const FockSpace& fock);
Operator creation(const FockSpace& fock);
Operator number_operator(const FockSpace& fock);
Operator position_operator(const FockSpace& fock);   // (a + a^dag) / sqrt(2)
Operator momentum_operator(const FockSpace& fock);   // (a - a^dag) / (i sqrt(2))
Operator displacement(const FockSpace& fock, cplx alpha);

// |m><g| on the orbital factor.
Operator raising();
Operator orbital_projector(int orbital);

Matrix kron(const Matrix& a, const Matrix& b);

SpinMotionState thermal_state(const FockSpace& fock, double nbar, const Eigen::Vector2cd& orbital);
SpinMotionState fock_state(const FockSpace& fock, int n, int orbital);
SpinMotionState pure_state(const FockSpace& fock, const Vector& psi);

cplx expectation(const SpinMotionState& state, const Operator& op);

// exp(-i H t) via eigendecomposition of the Hermitian generator.
Operator matrix_exponential(const Operator& hamiltonian, double t);

// Returns U rho U^dag. U must be composite-space and unitary.
SpinMotionState apply_unitary(const SpinMotionState& state, const Operator& unitary);

// max |(A^dag A - I)_ij|
double unitarity_defect(const Matrix& u);

// min over phases of max|A - e^{i phi} B|, phase taken from the overlap.
double distance_up_to_phase(const Matrix& a, const Matrix& b);

}  // namespace omgsim
