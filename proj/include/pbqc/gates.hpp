#pragma once

#include <string_view>

#include "pbqc/types.hpp"

/// Standard gate matrices. Multi-qubit gates list their control first.
namespace pbqc::gates {

ComplexMatrix identity(std::size_t num_qubits = 1);
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
ComplexMatrix H();
ComplexMatrix S();
ComplexMatrix Sdg();
ComplexMatrix T();
ComplexMatrix Tdg();
ComplexMatrix CNOT();
ComplexMatrix CZ();
ComplexMatrix SWAP();
/// exp(-i theta/2 n·sigma); the axis is normalised.
ComplexMatrix rotation(double theta, double nx, double ny, double nz);

/// Looks a gate up by name ("I", "X", ..., "T", "Tdg", "CNOT", "CZ", "SWAP").
/// Throws ValidationError for unknown names.
ComplexMatrix by_name(std::string_view name);

}  // namespace pbqc::gates
