#include "pbqc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "pbqc/error.hpp"

namespace pbqc {

ComplexMatrix haar_random_unitary(std::size_t dim, RngStream& rng) {
    if (dim == 0) throw DimensionError("haar_random_unitary: dimension must be positive");
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix g(d, d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const Complex diag = r(i, i);
        const double mag = std::abs(diag);
        q.col(i) *= mag > 0 ? diag / mag : Complex(1.0);
    }
    return q;
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    return max_abs(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols())) <= tol;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

void require_unitary(const ComplexMatrix& m, const char* context, double tol) {
    if (!is_unitary(m, tol)) throw ValidationError(std::string(context) + ": matrix is not unitary");
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw DimensionError("hermitian_eigendecomposition: matrix must be square");
    if (!is_hermitian(h, 1e-9)) throw ValidationError("hermitian_eigendecomposition: matrix is not Hermitian");
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigendecomposition: solver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& m, double cutoff) {
    const auto eig = hermitian_eigendecomposition(m);
    if (eig.values.size() > 0 && eig.values(0) < -1e-9)
        throw ValidationError("psd_inverse_sqrt: matrix has a negative eigenvalue");
    RealVector scale(eig.values.size());
    for (Eigen::Index i = 0; i < scale.size(); ++i)
        scale(i) = eig.values(i) > cutoff ? 1.0 / std::sqrt(eig.values(i)) : 0.0;
    return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
}

double phase_invariant_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols())
        throw DimensionError("phase_invariant_distance: dimension mismatch");
    const ComplexMatrix w = u.adjoint() * v;
    if (w.rows() == 1) return 0.0;
    if (w.rows() == 2) {
        // W / sqrt(det W) = aI - i v.sigma with eigenphases +-theta/2, |v| = sin(theta/2).
        const ComplexMatrix su = w / std::sqrt(w.determinant());
        const double a = std::abs(su(0, 0) + su(1, 1)) / 2.0;
        const double off = (std::abs(su(0, 1)) + std::abs(su(1, 0))) / 2.0;
        const double diag = std::abs(su(0, 0) - su(1, 1)) / 2.0;
        const double half_theta = std::atan2(std::hypot(off, diag), a);
        return 2.0 * std::sin(half_theta / 2.0);
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(w, false);
    if (solver.info() != Eigen::Success) throw NumericalError("phase_invariant_distance: eigen solver failed");
    std::vector<double> phases;
    for (Eigen::Index i = 0; i < w.rows(); ++i) phases.push_back(std::arg(solver.eigenvalues()(i)));
    std::sort(phases.begin(), phases.end());
    double max_gap = phases.front() + 2.0 * std::numbers::pi - phases.back();
    for (std::size_t i = 1; i < phases.size(); ++i) max_gap = std::max(max_gap, phases[i] - phases[i - 1]);
    const double arc = std::max(0.0, 2.0 * std::numbers::pi - max_gap);
    return 2.0 * std::sin(arc / 4.0);
}

ComplexMatrix strip_global_phase(const ComplexMatrix& u) {
    const Complex det = u.determinant();
    const double phase = std::arg(det) / static_cast<double>(u.rows());
    return u * std::polar(1.0, -phase);
}

}  // namespace pbqc
