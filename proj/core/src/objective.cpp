#include "dualvqe/objective.hpp"

#include <cmath>

#include "dualvqe/errors.hpp"

namespace dualvqe {

HamiltonianMoments HamiltonianMoments::of(const PauliHamiltonian& h) {
  HamiltonianMoments m;
  m.dim = std::ldexp(1.0, h.num_qubits());
  m.tr = trace(h);
  m.tr_sq = trace_squared(h);
  return m;
}

ObjectiveBreakdown penalty_breakdown(const HamiltonianMoments& m, double eta, double nu,
                                     double expect_h, double purity, double c) {
  ObjectiveBreakdown b;
  b.terms.h_norm = m.tr_sq;
  b.terms.eta_sq = eta * eta * m.dim;
  b.terms.nu_sq = nu * nu * purity;
  b.terms.eta_trace = -2.0 * eta * m.tr;
  b.terms.nu_expect = -2.0 * nu * expect_h;
  b.terms.cross = 2.0 * eta * nu;
  b.penalty = b.terms.sum();
  b.objective = eta;
  b.f = eta - c * b.penalty;
  b.expect_h = expect_h;
  b.purity = purity;
  return b;
}

ObjectiveBreakdown dual_objective(const PauliHamiltonian& h, const MixedAnsatz& a,
                                  const DualPoint& pt, ShotModel& shot) {
  if (pt.nu < 0.0) throw InputError("dual_objective: nu must be >= 0");
  if (pt.params.size() != param_count(a))
    throw InputError("dual_objective: expected " + std::to_string(param_count(a)) +
                     " ansatz parameters, got " + std::to_string(pt.params.size()));
  const double e = estimate_expectation(h, a, pt.params, shot);
  const double p = estimate_purity(a, pt.params, shot);
  return penalty_breakdown(HamiltonianMoments::of(h), pt.eta, pt.nu, e, p, pt.c);
}

double slack_residual(const PauliHamiltonian& h, double eta, double nu,
                      const DensityMatrix& omega) {
  if (h.num_qubits() != omega.n) throw InputError("slack_residual: size mismatch");
  Eigen::MatrixXcd slack = to_dense(h);
  slack.diagonal().array() -= eta;
  slack -= nu * omega.mat;
  return slack.squaredNorm();
}

double vqe_objective(const PauliHamiltonian& h, const ParamCircuit& c, const Eigen::VectorXd& theta,
                     ShotModel& shot) {
  if (h.num_qubits() != c.n) throw InputError("vqe_objective: size mismatch");
  return expectation(h, apply_circuit(c, theta), shot);
}

}  // namespace dualvqe
