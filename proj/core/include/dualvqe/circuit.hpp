#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dualvqe/state.hpp"

namespace dualvqe {

enum class Axis { X, Y, Z };

// R_a(t) = exp(-i t/2 sigma_a); t is params[param].
struct RotationGate {
  Axis axis;
  int qubit;
  int param;
};

struct CnotGate {
  int control;
  int target;
};

struct CzGate {
  int a;
  int b;
};

// General two-qubit block parameterized by 15 consecutive entries starting at
// param0: Euler angles (z,y,z) of the two left locals, the three interaction
// angles (xx, yy, zz), then Euler angles of the two right locals.
struct KakGate {
  int qa;  // more significant qubit of the block's 4-dim index
  int qb;
  int param0;
};

using Gate = std::variant<RotationGate, CnotGate, CzGate, KakGate>;

struct ParamCircuit {
  int n = 0;
  std::vector<Gate> gates;
  int param_count = 0;

  explicit ParamCircuit(int n_qubits = 0);

  int add_rotation(Axis axis, int qubit);  // returns the new parameter index
  void add_cnot(int control, int target);
  void add_cz(int a, int b);
  int add_kak(int qa, int qb);  // returns the first of 15 new parameter indices
};

Eigen::Matrix2cd rotation_matrix(Axis axis, double theta);

StateVector apply_circuit(const ParamCircuit& c, const Eigen::VectorXd& params,
                          const StateVector& in);
StateVector apply_circuit(const ParamCircuit& c, const Eigen::VectorXd& params);  // on |0...0>

// In-place primitive kernels, shared with gate-sequence code elsewhere.
void apply_single_qubit(Eigen::VectorXcd& amps, int n, int qubit, const Eigen::Matrix2cd& u);
void apply_two_qubit(Eigen::VectorXcd& amps, int n, int qa, int qb, const Eigen::Matrix4cd& u);

}  // namespace dualvqe
