#include "dualvqe/measure.hpp"

#include <algorithm>
#include <cmath>

#include "dualvqe/errors.hpp"

namespace dualvqe {

ShotModel ShotModel::exact() { return ShotModel{}; }

ShotModel ShotModel::sampled(long long shots, std::uint64_t seed, long long purity_shots) {
  if (shots < 1) throw InputError("ShotModel: sampled mode needs at least one shot");
  if (purity_shots < 0) throw InputError("ShotModel: purity_shots must be >= 0");
  ShotModel m;
  m.mode = Mode::sampled;
  m.shots = shots;
  m.purity_shots = purity_shots;
  m.rng.seed(seed);
  return m;
}

double ShotModel::binomial_mean(double mean, long long trials) {
  const double p = std::clamp((1.0 + mean) / 2.0, 0.0, 1.0);
  if (trials < 1) throw InputError("binomial_mean: needs at least one trial");
  double successes;
  if (static_cast<double>(trials) > gaussian_threshold) {
    const double sd = std::sqrt(static_cast<double>(trials) * p * (1.0 - p));
    std::normal_distribution<double> g(static_cast<double>(trials) * p, sd);
    successes = sd > 0.0 ? g(rng) : static_cast<double>(trials) * p;
  } else {
    std::binomial_distribution<long long> b(trials, p);
    successes = static_cast<double>(b(rng));
  }
  return 2.0 * successes / static_cast<double>(trials) - 1.0;
}

namespace {

// Per-term exact means, then simulated readout. The identity term needs no shots.
template <typename State>
double sampled_expectation(const PauliHamiltonian& h, const State& state, ShotModel& shot) {
  double acc = 0.0;
  for (const auto& term : h.terms()) {
    if (term.string.is_identity()) {
      acc += term.coeff;
      continue;
    }
    const PauliHamiltonian single(h.num_qubits(), {{1.0, term.string}});
    const double mean = exact_expectation(single, state);
    acc += term.coeff * shot.binomial_mean(mean, shot.shots);
  }
  return acc;
}

}  // namespace

double expectation(const PauliHamiltonian& h, const StateVector& psi, ShotModel& shot) {
  if (shot.is_exact()) return exact_expectation(h, psi);
  return sampled_expectation(h, psi, shot);
}

double expectation(const PauliHamiltonian& h, const DensityMatrix& rho, ShotModel& shot) {
  if (shot.is_exact()) return exact_expectation(h, rho);
  return sampled_expectation(h, rho, shot);
}

double purity(const DensityMatrix& rho, ShotModel& shot) {
  const double exact = exact_purity(rho);
  if (shot.is_exact()) return exact;
  // Destructive swap test on two copies: coincidence probability (1 + Tr[rho^2])/2.
  return shot.binomial_mean(exact, shot.purity_budget());
}

}  // namespace dualvqe
