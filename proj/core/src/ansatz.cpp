#include "dualvqe/ansatz.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dualvqe/errors.hpp"

namespace dualvqe {

namespace {

void append_rotation_layer(ParamCircuit& c) {
  for (int q = 0; q < c.n; ++q) c.add_rotation(Axis::Y, q);
  for (int q = 0; q < c.n; ++q) c.add_rotation(Axis::Z, q);
  for (int q = 0; q + 1 < c.n; ++q) c.add_cnot(q, q + 1);
}

void append_kak_layer(ParamCircuit& c) {
  for (int q = 0; q + 1 < c.n; ++q) c.add_kak(q, q + 1);
}

void append_born_layer(ParamCircuit& c) {
  for (int q = 0; q < c.n; ++q) c.add_rotation(Axis::Y, q);
  for (int q = 0; q + 1 < c.n; ++q) c.add_cz(q, q + 1);
  if (c.n > 2) c.add_cz(c.n - 1, 0);  // close the ring; n = 2 has a single distinct pair
}

// Deterministic inverse-CDF draw, independent of stdlib distribution internals.
std::uint64_t draw_index(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  for (Eigen::Index x = 0; x < probs.size(); ++x) {
    acc += probs(x);
    if (u < acc) return static_cast<std::uint64_t>(x);
  }
  return static_cast<std::uint64_t>(probs.size() - 1);
}

}  // namespace

PurificationAnsatz PurificationAnsatz::make(int n_ref, int n_sys, int layers,
                                            PurificationLayerKind kind) {
  if (n_ref < 1) throw InputError("purification ansatz needs at least one reference qubit");
  if (n_sys < n_ref) throw InputError("purification ansatz needs n_sys >= n_ref");
  if (layers < 1) throw InputError("purification ansatz needs at least one layer");
  PurificationAnsatz a;
  a.n_ref = n_ref;
  a.n_sys = n_sys;
  a.layers = layers;
  a.kind = kind;
  a.circuit = ParamCircuit(n_ref + n_sys);
  for (int l = 0; l < layers; ++l) {
    if (kind == PurificationLayerKind::rotation)
      append_rotation_layer(a.circuit);
    else
      append_kak_layer(a.circuit);
  }
  return a;
}

std::vector<int> PurificationAnsatz::system_qubits() const {
  std::vector<int> qs(static_cast<std::size_t>(n_sys));
  std::iota(qs.begin(), qs.end(), n_ref);
  return qs;
}

StateVector purification_pure_state(const PurificationAnsatz& a, const Eigen::VectorXd& theta) {
  return apply_circuit(a.circuit, theta);
}

DensityMatrix purification_state(const PurificationAnsatz& a, const Eigen::VectorXd& theta) {
  return partial_trace(purification_pure_state(a, theta), a.system_qubits());
}

ConvexCombinationAnsatz ConvexCombinationAnsatz::make(int n, int born_layers, int unitary_layers) {
  if (n < 1) throw InputError("convex-combination ansatz needs at least one qubit");
  if (born_layers < 1 || unitary_layers < 1)
    throw InputError("convex-combination ansatz needs at least one layer of each kind");
  ConvexCombinationAnsatz a;
  a.n = n;
  a.born_layers = born_layers;
  a.unitary_layers = unitary_layers;
  a.born = ParamCircuit(n);
  a.unitary = ParamCircuit(n);
  for (int l = 0; l < born_layers; ++l) append_born_layer(a.born);
  for (int l = 0; l < unitary_layers; ++l) append_born_layer(a.unitary);
  return a;
}

Eigen::VectorXd born_distribution(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& phi) {
  const StateVector s = apply_circuit(a.born, phi);
  return s.amps.cwiseAbs2();
}

DensityMatrix cc_state(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& phi,
                       const Eigen::VectorXd& gamma) {
  const Eigen::VectorXd p = born_distribution(a, phi);
  DensityMatrix rho;
  rho.n = a.n;
  rho.mat = Eigen::MatrixXcd::Zero(p.size(), p.size());
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p(x) == 0.0) continue;
    const StateVector v =
        apply_circuit(a.unitary, gamma, StateVector::basis(a.n, static_cast<std::uint64_t>(x)));
    rho.mat += p(x) * (v.amps * v.amps.adjoint());
  }
  return rho;
}

DensityMatrix cc_state(const ConvexCombinationAnsatz& a, const Eigen::VectorXd& params) {
  if (params.size() != a.param_count())
    throw InputError("cc_state: expected " + std::to_string(a.param_count()) + " parameters");
  return cc_state(a, params.head(a.born.param_count), params.tail(a.unitary.param_count));
}

double collision_purity(const Eigen::VectorXd& probs, long long pairs, std::uint64_t seed) {
  if (pairs < 1) throw InputError("collision_purity: needs at least one pair");
  if (probs.size() < 1 || std::abs(probs.sum() - 1.0) > 1e-8 || probs.minCoeff() < -1e-12)
    throw InputError("collision_purity: not a probability distribution");
  std::mt19937_64 rng(seed);
  long long hits = 0;
  for (long long i = 0; i < pairs; ++i) {
    const auto x1 = draw_index(probs, rng);
    const auto x2 = draw_index(probs, rng);
    if (x1 == x2) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs);
}

double cc_expectation_sampled(const PauliHamiltonian& h, const ConvexCombinationAnsatz& a,
                              const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma,
                              long long shots, std::uint64_t seed) {
  if (shots < 1) throw InputError("cc_expectation_sampled: needs at least one shot");
  if (h.num_qubits() != a.n) throw InputError("cc_expectation_sampled: qubit count mismatch");
  const Eigen::VectorXd p = born_distribution(a, phi);
  std::mt19937_64 rng(seed);
  std::vector<double> cache(static_cast<std::size_t>(p.size()),
                            std::numeric_limits<double>::quiet_NaN());
  double acc = 0.0;
  for (long long i = 0; i < shots; ++i) {
    const std::uint64_t x = draw_index(p, rng);
    double& e = cache[static_cast<std::size_t>(x)];
    if (std::isnan(e)) {
      const StateVector v = apply_circuit(a.unitary, gamma, StateVector::basis(a.n, x));
      e = exact_expectation(h, v);
    }
    acc += e;
  }
  return acc / static_cast<double>(shots);
}

int param_count(const MixedAnsatz& a) {
  return std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PurificationAnsatz>)
          return x.circuit.param_count;
        else
          return x.param_count();
      },
      a);
}

int system_size(const MixedAnsatz& a) {
  return std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PurificationAnsatz>)
          return x.n_sys;
        else
          return x.n;
      },
      a);
}

DensityMatrix mixed_state(const MixedAnsatz& a, const Eigen::VectorXd& params) {
  if (const auto* p = std::get_if<PurificationAnsatz>(&a)) return purification_state(*p, params);
  return cc_state(std::get<ConvexCombinationAnsatz>(a), params);
}

double estimate_expectation(const PauliHamiltonian& h, const MixedAnsatz& a,
                            const Eigen::VectorXd& params, ShotModel& shot) {
  if (h.num_qubits() != system_size(a)) throw InputError("estimate_expectation: size mismatch");
  if (const auto* p = std::get_if<PurificationAnsatz>(&a)) {
    // Measure I (x) H on the purified register.
    const StateVector psi = purification_pure_state(*p, params);
    return expectation(prepend_identities(h, p->n_ref), psi, shot);
  }
  const auto& cc = std::get<ConvexCombinationAnsatz>(a);
  if (params.size() != cc.param_count())
    throw InputError("estimate_expectation: expected " + std::to_string(cc.param_count()) +
                     " parameters");
  const Eigen::VectorXd phi = params.head(cc.born.param_count);
  const Eigen::VectorXd gamma = params.tail(cc.unitary.param_count);
  if (shot.is_exact()) return exact_expectation(h, cc_state(cc, phi, gamma));
  return cc_expectation_sampled(h, cc, phi, gamma, shot.shots, shot.rng());
}

double estimate_purity(const MixedAnsatz& a, const Eigen::VectorXd& params, ShotModel& shot) {
  if (const auto* p = std::get_if<PurificationAnsatz>(&a))
    return purity(purification_state(*p, params), shot);
  const auto& cc = std::get<ConvexCombinationAnsatz>(a);
  const Eigen::VectorXd probs = born_distribution(cc, params.head(cc.born.param_count));
  // Unitary conjugation of a diagonal state: Tr[omega^2] equals the
  // distribution's collision probability.
  if (shot.is_exact()) return probs.squaredNorm();
  return collision_purity(probs, shot.purity_budget(), shot.rng());
}

}  // namespace dualvqe
