#pragma once

#include <cstdint>
#include <random>

#include "dualvqe/state.hpp"

namespace dualvqe {

// Measurement budget for estimators. `exact` returns true expectation values;
// `sampled` draws per-term binomial outcomes (Bernoulli eigenvalue readout for
// expectations, destructive-swap coincidences for purity). One model owns one
// rng stream, so concurrent runs must each hold their own copy.
struct ShotModel {
  enum class Mode { exact, sampled };

  Mode mode = Mode::exact;
  long long shots = 0;         // per Pauli term / per expectation estimate
  long long purity_shots = 0;  // swap-test repetitions; 0 means reuse `shots`
  // Binomials with more trials than this are drawn from a variance-matched normal.
  double gaussian_threshold = 1e7;
  std::mt19937_64 rng{0};

  static ShotModel exact();
  static ShotModel sampled(long long shots, std::uint64_t seed, long long purity_shots = 0);

  bool is_exact() const { return mode == Mode::exact; }
  long long purity_budget() const { return purity_shots > 0 ? purity_shots : shots; }

  // Unbiased estimate of a mean in [-1, 1] observed through `trials`
  // two-outcome measurements.
  double binomial_mean(double mean, long long trials);
};

double expectation(const PauliHamiltonian& h, const StateVector& psi, ShotModel& shot);
double expectation(const PauliHamiltonian& h, const DensityMatrix& rho, ShotModel& shot);

// Tr[rho^2] via repeated two-copy destructive swap tests in sampled mode.
double purity(const DensityMatrix& rho, ShotModel& shot);

}  // namespace dualvqe
