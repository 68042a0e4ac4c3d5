#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dualvqe/circuit.hpp"
#include "dualvqe/measure.hpp"

namespace dualvqe {

enum class PurificationLayerKind {
  rotation,  // RY row, RZ row, CNOT chain
  kak,       // staircase of general two-qubit blocks
};

// Mixed state on n_sys qubits prepared as a pure state on reference+system
// (reference = qubits [0, n_ref), system = the rest) with the reference traced out.
struct PurificationAnsatz {
  int n_ref = 1;
  int n_sys = 1;
  int layers = 3;
  PurificationLayerKind kind = PurificationLayerKind::rotation;
  ParamCircuit circuit;

  static PurificationAnsatz make(int n_ref, int n_sys, int layers,
                                 PurificationLayerKind kind = PurificationLayerKind::rotation);

  int total_qubits() const { return n_ref + n_sys; }
  std::vector<int> system_qubits() const;
};

StateVector purification_pure_state(const PurificationAnsatz& a, const Eigen::VectorXd& theta);
DensityMatrix purification_state(const PurificationAnsatz& a, const Eigen::VectorXd& theta);

// omega(phi, gamma) = sum_x p_phi(x) U(gamma) |x><x| U(gamma)^dag with p a
// Born-machine distribution (RY row + CZ ring layers on n qubits).
struct ConvexCombinationAnsatz {
  int n = 1;
  int born_layers = 2;
  int unitary_layers = 2;
  ParamCircuit born;
  ParamCircuit unitary;

  static ConvexCombinationAnsatz make(int n, int born_layers = 2, int unitary_layers = 2);

  int param_count() const { return born.param_count + unitary.param_count; }
};

Eigen::VectorXd born_distribution(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& phi);
DensityMatrix cc_state(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& phi,
                       const Eigen::VectorXd& gamma);
DensityMatrix cc_state(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& params);

// Fraction of equal pairs among `pairs` i.i.d. draws of (x1, x2); unbiased for sum_x p(x)^2.
double collision_purity(const Eigen::VectorXd& probs, long long pairs, std::uint64_t seed);

// Monte-Carlo estimate of Tr[H omega]: sample x ~ p, evaluate <x|U^dag H U|x> exactly.
double cc_expectation_sampled(const PauliHamiltonian& h, const ConvexCombinationAnsatz& a,
                              const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma,
                              long long shots, std::uint64_t seed);

using MixedAnsatz = std::variant<PurificationAnsatz, ConvexCombinationAnsatz>;

int param_count(const MixedAnsatz& a);
int system_size(const MixedAnsatz& a);
DensityMatrix mixed_state(const MixedAnsatz& a, const Eigen::VectorXd& params);

// Estimators used by objective evaluation; route through the ansatz's natural
// measurement primitive (purified-register Paulis + swap test, or Born
// sampling + collision test).
double estimate_expectation(const PauliHamiltonian& h, const MixedAnsatz& a,
                            const Eigen::VectorXd& params, ShotModel& shot);
double estimate_purity(const MixedAnsatz& a, const Eigen::VectorXd& params, ShotModel& shot);

}  // namespace dualvqe
