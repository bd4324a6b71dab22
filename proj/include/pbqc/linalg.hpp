#pragma once

#include <cstddef>

#include "pbqc/rng.hpp"
#include "pbqc/types.hpp"

namespace pbqc {

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal folded back into Q.
ComplexMatrix haar_random_unitary(std::size_t dim, RngStream& rng);

bool is_unitary(const ComplexMatrix& m, double tol = kExactTol);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-9);
void require_unitary(const ComplexMatrix& m, const char* context, double tol = 1e-9);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs(const ComplexMatrix& m);

struct EigenDecomposition {
    RealVector values;     ///< ascending
    ComplexMatrix vectors; ///< columns are eigenvectors
};

/// Throws ValidationError when ||H - H^dagger||_max > 1e-9.
EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& h);

/// M^{-1/2} on the eigenspaces with eigenvalue > cutoff, zero on the rest.
/// Throws ValidationError on an eigenvalue below -1e-9.
ComplexMatrix psd_inverse_sqrt(const ComplexMatrix& m, double cutoff);

/// min over phi of ||U - e^{i phi} V||_2 for unitaries U, V.
///
/// The eigenphases of U^dagger V lie on the unit circle; the optimal phase
/// centres the shortest arc covering them, giving 2 sin(arc / 4).
double phase_invariant_distance(const ComplexMatrix& u, const ComplexMatrix& v);

/// Multiplies by the phase that makes det = 1.
ComplexMatrix strip_global_phase(const ComplexMatrix& u);

}  // namespace pbqc
