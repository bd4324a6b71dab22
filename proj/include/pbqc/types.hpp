#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace pbqc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Classical bit string, one byte per bit (values 0/1). Index i is qubit i.
using Bits = std::vector<std::uint8_t>;

/// Absolute tolerance for exact-algebra checks on double-precision data.
inline constexpr double kExactTol = 1e-10;
/// Tolerance for eigendecomposition residuals.
inline constexpr double kSpectralTol = 1e-8;

/// Qubit convention used throughout: qubit 0 is the most significant bit of
/// an amplitude index, so in an n-qubit register qubit q sits at bit n-1-q.
inline constexpr std::uint64_t qubit_bit(std::size_t num_qubits, std::size_t qubit) {
    return std::uint64_t{1} << (num_qubits - 1 - qubit);
}

std::uint64_t bits_to_index(const Bits& bits);
Bits index_to_bits(std::uint64_t index, std::size_t num_qubits);
std::size_t hamming_distance(const Bits& a, const Bits& b);

}  // namespace pbqc
