#include "pbqc/gates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pbqc/error.hpp"

namespace pbqc::gates {

namespace {
const Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix m2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

ComplexMatrix identity(std::size_t num_qubits) {
    const auto d = static_cast<Eigen::Index>(std::uint64_t{1} << num_qubits);
    return ComplexMatrix::Identity(d, d);
}

ComplexMatrix X() { return m2(0, 1, 1, 0); }
ComplexMatrix Y() { return m2(0, -kI, kI, 0); }
ComplexMatrix Z() { return m2(1, 0, 0, -1); }
ComplexMatrix H() { return m2(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2); }
ComplexMatrix S() { return m2(1, 0, 0, kI); }
ComplexMatrix Sdg() { return m2(1, 0, 0, -kI); }
ComplexMatrix T() { return m2(1, 0, 0, std::polar(1.0, std::numbers::pi / 4)); }
ComplexMatrix Tdg() { return m2(1, 0, 0, std::polar(1.0, -std::numbers::pi / 4)); }

ComplexMatrix CNOT() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

ComplexMatrix CZ() {
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
}

ComplexMatrix SWAP() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
}

ComplexMatrix rotation(double theta, double nx, double ny, double nz) {
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (!(len > 0.0)) throw ValidationError("rotation: zero axis");
    nx /= len, ny /= len, nz /= len;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return m2(Complex(c, -s * nz), Complex(-s * ny, -s * nx), Complex(s * ny, -s * nx), Complex(c, s * nz));
}

ComplexMatrix by_name(std::string_view name) {
    if (name == "I") return identity(1);
    if (name == "X") return X();
    if (name == "Y") return Y();
    if (name == "Z") return Z();
    if (name == "H") return H();
    if (name == "S") return S();
    if (name == "Sdg") return Sdg();
    if (name == "T") return T();
    if (name == "Tdg") return Tdg();
    if (name == "CNOT") return CNOT();
    if (name == "CZ") return CZ();
    if (name == "SWAP") return SWAP();
    throw ValidationError("unknown gate '" + std::string(name) + "'");
}

}  // namespace pbqc::gates
