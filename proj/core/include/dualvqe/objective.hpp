#pragma once

#include "dualvqe/ansatz.hpp"

namespace dualvqe {

// One iterate of the lower-bound search: the bound candidate eta, the slack
// scale nu >= 0, the ansatz parameters, and the penalty weight c.
struct DualPoint {
  double eta = 0.0;
  double nu = 1.0;
  Eigen::VectorXd params;
  double c = 10.0;
};

// Signed contributions to ||H - eta I - nu omega||_F^2.
struct PenaltyTerms {
  double h_norm;     // Tr[H^2]
  double eta_sq;     // + eta^2 2^n
  double nu_sq;      // + nu^2 Tr[omega^2]
  double eta_trace;  // - 2 eta Tr[H]
  double nu_expect;  // - 2 nu Tr[H omega]
  double cross;      // + 2 eta nu

  double sum() const { return h_norm + eta_sq + nu_sq + eta_trace + nu_expect + cross; }
};

struct ObjectiveBreakdown {
  double f;          // objective - c * penalty
  double objective;  // eta, the quantity being maximized
  double penalty;    // terms.sum()
  PenaltyTerms terms;
  double expect_h;  // Tr[H omega] estimate entering the penalty
  double purity;    // Tr[omega^2] estimate entering the penalty
};

// Tr[H] and Tr[H^2] read off the Pauli coefficients once per run.
struct HamiltonianMoments {
  double dim;
  double tr;
  double tr_sq;

  static HamiltonianMoments of(const PauliHamiltonian& h);
};

// Closed-form penalty assembly from scalar estimates; shared by every
// evaluation path (circuit, tensor-network, finite differences).
ObjectiveBreakdown penalty_breakdown(const HamiltonianMoments& m, double eta, double nu,
                                     double expect_h, double purity, double c);

ObjectiveBreakdown dual_objective(const PauliHamiltonian& h, const MixedAnsatz& a,
                                  const DualPoint& pt, ShotModel& shot);

// ||H - eta I - nu omega||_F^2 evaluated densely; the independent route used
// to cross-check the six-term expansion.
double slack_residual(const PauliHamiltonian& h, double eta, double nu, const DensityMatrix& omega);

double vqe_objective(const PauliHamiltonian& h, const ParamCircuit& c, const Eigen::VectorXd& theta,
                     ShotModel& shot);

}  // namespace dualvqe
