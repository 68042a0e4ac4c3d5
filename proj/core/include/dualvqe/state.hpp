#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dualvqe/pauli.hpp"

namespace dualvqe {

// Pure state on n qubits. Qubit 0 is the most significant bit of the index.
struct StateVector {
  int n = 0;
  Eigen::VectorXcd amps;

  static StateVector zero(int n);                     // |0...0>
  static StateVector basis(int n, std::uint64_t x);
  // Validates dimension and unit norm (1e-8).
  static StateVector from_amplitudes(int n, Eigen::VectorXcd a);

  Eigen::Index dim() const { return amps.size(); }
};

struct DensityMatrix {
  int n = 0;
  Eigen::MatrixXcd mat;

  static DensityMatrix from_pure(const StateVector& psi);

  Eigen::Index dim() const { return mat.rows(); }
};

// Reduced state on `keep` (original-register qubit indices, output ordered ascending).
DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

double exact_expectation(const PauliHamiltonian& h, const StateVector& psi);
double exact_expectation(const PauliHamiltonian& h, const DensityMatrix& rho);
double exact_purity(const DensityMatrix& rho);

}  // namespace dualvqe
