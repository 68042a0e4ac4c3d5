#pragma once

// Test-only reference implementations, deliberately written along different
// code paths than the library so the two can cross-check each other.

#include <random>

#include <Eigen/Dense>

#include "dualvqe/circuit.hpp"
#include "dualvqe/pauli.hpp"

namespace oracle {

using dualvqe::cxd;

// Single-qubit Pauli entries by letter.
inline cxd pauli_entry(dualvqe::Pauli p, int row, int col) {
  switch (p) {
    case dualvqe::Pauli::I: return row == col ? cxd(1, 0) : cxd(0, 0);
    case dualvqe::Pauli::X: return row != col ? cxd(1, 0) : cxd(0, 0);
    case dualvqe::Pauli::Y:
      if (row == col) return cxd(0, 0);
      return row == 1 ? cxd(0, 1) : cxd(0, -1);
    case dualvqe::Pauli::Z:
      if (row != col) return cxd(0, 0);
      return row == 0 ? cxd(1, 0) : cxd(-1, 0);
  }
  return cxd(0, 0);
}

// Element-wise tensor-product formula: M[i][j] = prod_q <i_q| sigma_q |j_q>.
inline Eigen::MatrixXcd dense_string(const dualvqe::PauliString& s) {
  const int n = s.size();
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      cxd v(1, 0);
      for (int q = 0; q < n && v != cxd(0, 0); ++q) {
        const int bi = static_cast<int>((i >> (n - 1 - q)) & 1);
        const int bj = static_cast<int>((j >> (n - 1 - q)) & 1);
        v *= pauli_entry(s.letters[static_cast<std::size_t>(q)], bi, bj);
      }
      m(i, j) = v;
    }
  return m;
}

inline Eigen::MatrixXcd dense_hamiltonian(const dualvqe::PauliHamiltonian& h) {
  const Eigen::Index dim = Eigen::Index(1) << h.num_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) m += t.coeff * dense_string(t.string);
  return m;
}

// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
inline Eigen::MatrixXcd haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cxd(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cxd d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

// Full-register matrix of a gate acting on the listed qubits (MSB -> qubit 0),
// assembled entry by entry rather than through the simulator kernels.
inline Eigen::MatrixXcd embed_gate(int n, const std::vector<int>& qubits,
                                   const Eigen::MatrixXcd& gate) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  const int k = static_cast<int>(qubits.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) {
      bool rest_equal = true;
      for (int q = 0; q < n && rest_equal; ++q) {
        bool onGate = false;
        for (int g = 0; g < k; ++g) onGate = onGate || (qubits[static_cast<std::size_t>(g)] == q);
        if (!onGate) rest_equal = ((i >> (n - 1 - q)) & 1) == ((j >> (n - 1 - q)) & 1);
      }
      if (!rest_equal) continue;
      Eigen::Index gi = 0, gj = 0;
      for (int g = 0; g < k; ++g) {
        gi = (gi << 1) | ((i >> (n - 1 - qubits[static_cast<std::size_t>(g)])) & 1);
        gj = (gj << 1) | ((j >> (n - 1 - qubits[static_cast<std::size_t>(g)])) & 1);
      }
      m(i, j) = gate(gi, gj);
    }
  return m;
}

// Full unitary of a parameterized circuit by multiplying embedded gate matrices.
inline Eigen::MatrixXcd circuit_unitary(const dualvqe::ParamCircuit& c,
                                        const Eigen::VectorXd& params);

}  // namespace oracle

#include "dualvqe/kak.hpp"

namespace oracle {

inline Eigen::MatrixXcd circuit_unitary(const dualvqe::ParamCircuit& c,
                                        const Eigen::VectorXd& params) {
  using namespace dualvqe;
  const Eigen::Index dim = Eigen::Index(1) << c.n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::Matrix4cd cnot, cz;
  cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  cz = Eigen::Vector4cd(1, 1, 1, -1).asDiagonal();
  for (const Gate& g : c.gates) {
    if (const auto* r = std::get_if<RotationGate>(&g)) {
      u = embed_gate(c.n, {r->qubit}, rotation_matrix(r->axis, params(r->param))) * u;
    } else if (const auto* x = std::get_if<CnotGate>(&g)) {
      u = embed_gate(c.n, {x->control, x->target}, cnot) * u;
    } else if (const auto* z = std::get_if<CzGate>(&g)) {
      u = embed_gate(c.n, {z->a, z->b}, cz) * u;
    } else if (const auto* kk = std::get_if<KakGate>(&g)) {
      u = embed_gate(c.n, {kk->qa, kk->qb}, kak_unitary(params.segment<15>(kk->param0))) * u;
    }
  }
  return u;
}

}  // namespace oracle
