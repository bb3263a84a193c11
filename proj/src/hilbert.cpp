#include "omgsim/hilbert.hpp"

#include <cmath>
#include <sstream>

#include "omgsim/errors.hpp"

namespace omgsim {

namespace {

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

std::string dims(Eigen::Index r, Eigen::Index c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

Eigen::Index expected_dim(SpaceTag tag, const FockSpace& fock) {
    switch (tag) {
        case SpaceTag::orbital: return 2;
        case SpaceTag::motion: return fock.levels();
        case SpaceTag::composite: return fock.composite_dim();
    }
    return 0;
}

}  // namespace

FockSpace::FockSpace(int n_max, double trap_frequency) : n_max_(n_max), trap_frequency_(trap_frequency) {
    if (n_max < 1) throw DomainError("FockSpace: n_max must be >= 1");
    if (!(trap_frequency > 0.0)) throw DomainError("FockSpace: trap frequency must be > 0");
}

Operator::Operator(SpaceTag space, Matrix matrix) : space_(space), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
        throw DimensionMismatch("Operator must be square, got " + dims(matrix_.rows(), matrix_.cols()));
    if (space_ == SpaceTag::orbital && matrix_.rows() != 2)
        throw DimensionMismatch("orbital operator must be 2x2");
    if (space_ == SpaceTag::composite && matrix_.rows() % 2 != 0)
        throw DimensionMismatch("composite operator must have even dimension");
}

void Operator::check_against(const FockSpace& fock) const {
    const Eigen::Index want = expected_dim(space_, fock);
    if (matrix_.rows() != want)
        throw DimensionMismatch("operator is " + dims(matrix_.rows(), matrix_.cols()) + ", expected " +
                                dims(want, want));
}

Operator Operator::embedded(const FockSpace& fock) const {
    check_against(fock);
    switch (space_) {
        case SpaceTag::orbital:
            return {SpaceTag::composite, kron(matrix_, Matrix::Identity(fock.levels(), fock.levels()))};
        case SpaceTag::motion: return {SpaceTag::composite, kron(Matrix::Identity(2, 2), matrix_)};
        case SpaceTag::composite: return *this;
    }
    return *this;
}

SpinMotionState::SpinMotionState(FockSpace fock, Matrix rho, Unchecked) : fock_(fock), rho_(std::move(rho)) {}

SpinMotionState::SpinMotionState(FockSpace fock, Matrix rho) : fock_(fock), rho_(std::move(rho)) {
    const Eigen::Index d = fock_.composite_dim();
    if (rho_.rows() != d || rho_.cols() != d)
        throw DimensionMismatch("density matrix is " + dims(rho_.rows(), rho_.cols()) + ", expected " + dims(d, d));
    if (hermiticity_defect(rho_) > kHermitianTol) throw DomainError("density matrix is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kTraceTol) throw DomainError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPositivityTol) throw DomainError("density matrix is not positive");
}

SpinMotionState make_state_unchecked(FockSpace fock, Matrix rho) {
    return SpinMotionState(fock, std::move(rho), SpinMotionState::Unchecked{});
}

Matrix SpinMotionState::orbital_marginal() const {
    const int n = fock_.levels();
    Matrix out(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out(a, b) = rho_.block(a * n, b * n, n, n).trace();
    return out;
}

Matrix SpinMotionState::motional_marginal() const {
    const int n = fock_.levels();
    return rho_.block(0, 0, n, n) + rho_.block(n, n, n, n);
}

double SpinMotionState::population(int orbital) const {
    const int n = fock_.levels();
    return rho_.block(orbital * n, orbital * n, n, n).trace().real();
}

double SpinMotionState::mean_occupation() const {
    const int n = fock_.levels();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += k * (rho_(k, k).real() + rho_(n + k, n + k).real());
    return acc;
}

double SpinMotionState::top_level_occupation() const {
    const int n = fock_.levels();
    return rho_(n - 1, n - 1).real() + rho_(2 * n - 1, 2 * n - 1).real();
}

double SpinMotionState::purity() const { return (rho_ * rho_).trace().real(); }

SpinMotionState SpinMotionState::clamped() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    ev /= ev.sum();
    Matrix rho = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return make_state_unchecked(fock_, std::move(rho));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Operator annihilation(const FockSpace& fock) {
    const int n = fock.levels();
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return {SpaceTag::motion, a};
}

Operator creation(const FockSpace& fock) { return {SpaceTag::motion, annihilation(fock).matrix().adjoint()}; }

Operator number_operator(const FockSpace& fock) {
    const int n = fock.levels();
    Matrix num = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
    return {SpaceTag::motion, num};
}

Operator position_operator(const FockSpace& fock) {
    const Matrix a = annihilation(fock).matrix();
    return {SpaceTag::motion, (a + a.adjoint()) / std::sqrt(2.0)};
}

Operator momentum_operator(const FockSpace& fock) {
    const Matrix a = annihilation(fock).matrix();
    return {SpaceTag::motion, (a - a.adjoint()) / cplx(0.0, std::sqrt(2.0))};
}

Operator displacement(const FockSpace& fock, cplx alpha) {
    const Matrix a = annihilation(fock).matrix();
    // exp(alpha a^dag - alpha* a) = exp(-i H) with H = i (alpha a^dag - alpha* a).
    Matrix h = cplx(0.0, 1.0) * (alpha * a.adjoint() - std::conj(alpha) * a);
    h = 0.5 * (h + h.adjoint()).eval();
    return matrix_exponential({SpaceTag::motion, h}, 1.0);
}

Operator raising() {
    Matrix s = Matrix::Zero(2, 2);
    s(1, 0) = 1.0;
    return {SpaceTag::orbital, s};
}

Operator orbital_projector(int orbital) {
    Matrix p = Matrix::Zero(2, 2);
    p(orbital, orbital) = 1.0;
    return {SpaceTag::orbital, p};
}

SpinMotionState thermal_state(const FockSpace& fock, double nbar, const Eigen::Vector2cd& orbital) {
    if (nbar < 0.0) throw DomainError("thermal_state: nbar must be >= 0");
    if (std::abs(orbital.norm() - 1.0) > 1e-10) throw DomainError("thermal_state: orbital state must be normalised");
    const int n = fock.levels();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    if (nbar == 0.0) {
        p(0) = 1.0;
    } else {
        const double ratio = nbar / (1.0 + nbar);
        const double tail = std::pow(ratio, n);
        if (tail >= kThermalTailTol) {
            std::ostringstream os;
            os << "thermal_state: population beyond n_max=" << fock.n_max() << " is " << tail << " (nbar=" << nbar
               << ")";
            throw TruncationError(os.str());
        }
        double w = 1.0 / (1.0 + nbar);
        for (int k = 0; k < n; ++k) {
            p(k) = w;
            w *= ratio;
        }
        p /= p.sum();
    }
    Matrix orb = orbital * orbital.adjoint();
    Matrix rho = kron(orb, p.cast<cplx>().asDiagonal().toDenseMatrix());
    return make_state_unchecked(fock, std::move(rho));
}

SpinMotionState fock_state(const FockSpace& fock, int n, int orbital) {
    if (n < 0 || n > fock.n_max()) throw DomainError("fock_state: level outside truncated space");
    if (orbital != 0 && orbital != 1) throw DomainError("fock_state: orbital must be 0 (g) or 1 (m)");
    Matrix rho = Matrix::Zero(fock.composite_dim(), fock.composite_dim());
    const int idx = orbital * fock.levels() + n;
    rho(idx, idx) = 1.0;
    return make_state_unchecked(fock, std::move(rho));
}

SpinMotionState pure_state(const FockSpace& fock, const Vector& psi) {
    if (psi.size() != fock.composite_dim()) throw DimensionMismatch("pure_state: vector dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw DomainError("pure_state: vector must be normalised");
    return SpinMotionState(fock, psi * psi.adjoint());
}

cplx expectation(const SpinMotionState& state, const Operator& op) {
    const Operator full = op.embedded(state.fock());
    return (state.rho() * full.matrix()).trace();
}

Operator matrix_exponential(const Operator& hamiltonian, double t) {
    const Matrix& h = hamiltonian.matrix();
    if (hermiticity_defect(h) > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw NonHermitianError("matrix_exponential: generator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXd& w = es.eigenvalues();
    Eigen::VectorXcd phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::polar(1.0, -w(k) * t);
    Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return {hamiltonian.space(), std::move(u)};
}

SpinMotionState apply_unitary(const SpinMotionState& state, const Operator& unitary) {
    unitary.check_against(state.fock());
    if (unitary.space() != SpaceTag::composite) return apply_unitary(state, unitary.embedded(state.fock()));
    const Matrix& u = unitary.matrix();
    Matrix rho = u * state.rho() * u.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (std::abs(rho.trace().real() - 1.0) > kTraceTol)
        throw Error("apply_unitary: trace not preserved (non-unitary propagator?)");
    return SpinMotionState(state.fock(), std::move(rho), SpinMotionState::Unchecked{});
}

double unitarity_defect(const Matrix& u) {
    return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

double distance_up_to_phase(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("distance_up_to_phase");
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0, 0.0);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace omgsim
