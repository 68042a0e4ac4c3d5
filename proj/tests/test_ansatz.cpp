#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dualvqe/ansatz.hpp"
#include "dualvqe/errors.hpp"
#include "oracles.hpp"

using namespace dualvqe;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd random_params(int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.0, 2 * kPi);
  Eigen::VectorXd v(count);
  for (int i = 0; i < count; ++i) v(i) = a(rng);
  return v;
}

}  // namespace

TEST_SUITE("ansatz") {

TEST_CASE("purification layer structure and parameter counts") {
  const PurificationAnsatz a = PurificationAnsatz::make(1, 2, 3);
  CHECK(a.total_qubits() == 3);
  CHECK(a.circuit.param_count == 3 * 2 * 3);  // layers * (RY+RZ rows) * qubits
  CHECK(a.system_qubits() == std::vector<int>{1, 2});
  // One layer is an RY row, an RZ row, then the CNOT chain.
  const PurificationAnsatz one = PurificationAnsatz::make(1, 1, 1);
  REQUIRE(one.circuit.gates.size() == 5);
  CHECK(std::get<RotationGate>(one.circuit.gates[0]).axis == Axis::Y);
  CHECK(std::get<RotationGate>(one.circuit.gates[2]).axis == Axis::Z);
  CHECK(std::get<CnotGate>(one.circuit.gates[4]).control == 0);

  const PurificationAnsatz k = PurificationAnsatz::make(2, 2, 2, PurificationLayerKind::kak);
  CHECK(k.circuit.param_count == 2 * 3 * 15);  // layers * blocks * block params

  CHECK_THROWS_AS(PurificationAnsatz::make(0, 2, 3), InputError);
  CHECK_THROWS_AS(PurificationAnsatz::make(2, 1, 3), InputError);
  CHECK_THROWS_AS(PurificationAnsatz::make(1, 1, 0), InputError);
}

TEST_CASE("purification state is a valid density matrix") {
  std::mt19937_64 rng(41);
  const PurificationAnsatz a = PurificationAnsatz::make(1, 2, 3);
  const Eigen::VectorXd theta = random_params(a.circuit.param_count, rng);
  const DensityMatrix rho = purification_state(a, theta);
  CHECK(rho.n == 2);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0));
  CHECK((rho.mat - rho.mat.adjoint()).norm() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.mat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(exact_purity(rho) <= 1.0 + 1e-12);
}

TEST_CASE("zero parameters leave the register in the ground basis state") {
  const PurificationAnsatz a = PurificationAnsatz::make(1, 2, 3);
  const DensityMatrix rho = purification_state(a, Eigen::VectorXd::Zero(a.circuit.param_count));
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
  want(0, 0) = 1.0;
  CHECK((rho.mat - want).norm() <= 1e-14);
}

TEST_CASE("reduction traces out the leading reference qubits") {
  std::mt19937_64 rng(42);
  const PurificationAnsatz a = PurificationAnsatz::make(1, 2, 2);
  const Eigen::VectorXd theta = random_params(a.circuit.param_count, rng);
  const Eigen::VectorXcd psi =
      oracle::circuit_unitary(a.circuit, theta).col(0);  // action on |000>
  // Hand contraction over the reference bit (most significant).
  Eigen::Matrix4cd want = Eigen::Matrix4cd::Zero();
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 4; ++s)
      for (int t = 0; t < 4; ++t) want(s, t) += psi(4 * r + s) * std::conj(psi(4 * r + t));
  CHECK((purification_state(a, theta).mat - want).norm() <= 1e-11);
}

TEST_CASE("born machine produces normalized distributions") {
  std::mt19937_64 rng(43);
  const ConvexCombinationAnsatz a = ConvexCombinationAnsatz::make(3);
  CHECK(a.param_count() == a.born.param_count + a.unitary.param_count);
  const Eigen::VectorXd p = born_distribution(a, random_params(a.born.param_count, rng));
  CHECK(p.size() == 8);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p.minCoeff() >= 0.0);
  // Zero angles: all mass on |0...0>.
  const Eigen::VectorXd p0 = born_distribution(a, Eigen::VectorXd::Zero(a.born.param_count));
  CHECK(p0(0) == doctest::Approx(1.0));
}

TEST_CASE("half-turn rotations give the uniform distribution") {
  const ConvexCombinationAnsatz a = ConvexCombinationAnsatz::make(3, 1, 1);
  const Eigen::VectorXd phi = Eigen::VectorXd::Constant(a.born.param_count, kPi / 2);
  const Eigen::VectorXd p = born_distribution(a, phi);
  for (Eigen::Index x = 0; x < p.size(); ++x) CHECK(p(x) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("convex combination state has the Born spectrum") {
  std::mt19937_64 rng(44);
  const ConvexCombinationAnsatz a = ConvexCombinationAnsatz::make(2);
  const Eigen::VectorXd phi = random_params(a.born.param_count, rng);
  const Eigen::VectorXd gamma = random_params(a.unitary.param_count, rng);
  const Eigen::VectorXd p = born_distribution(a, phi);
  const DensityMatrix rho = cc_state(a, phi, gamma);
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.mat);
  Eigen::VectorXd sorted = p;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(es.eigenvalues()(i) == doctest::Approx(sorted(i)).epsilon(1e-10));
  CHECK(exact_purity(rho) == doctest::Approx(p.squaredNorm()));
  // Packed-parameter overload splits phi | gamma.
  Eigen::VectorXd packed(a.param_count());
  packed << phi, gamma;
  CHECK((cc_state(a, packed).mat - rho.mat).norm() <= 1e-13);
}

TEST_CASE("collision sampling is unbiased for the distribution purity") {
  Eigen::VectorXd p(4);
  p << 0.4, 0.3, 0.2, 0.1;
  const double exact = p.squaredNorm();
  std::mt19937_64 seeder(45);
  const int reps = 3000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double e = collision_purity(p, 200, seeder());
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
  CHECK_THROWS_AS(collision_purity(p, 0, 1), InputError);
  Eigen::VectorXd bad(2);
  bad << 0.7, 0.6;
  CHECK_THROWS_AS(collision_purity(bad, 10, 1), InputError);
}

TEST_CASE("sampled convex-combination expectation is unbiased") {
  std::mt19937_64 rng(46);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  const ConvexCombinationAnsatz a = ConvexCombinationAnsatz::make(2);
  const Eigen::VectorXd phi = random_params(a.born.param_count, rng);
  const Eigen::VectorXd gamma = random_params(a.unitary.param_count, rng);
  const double exact = exact_expectation(h, cc_state(a, phi, gamma));
  const int reps = 3000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double e = cc_expectation_sampled(h, a, phi, gamma, 64, rng());
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("mixed-ansatz dispatch routes both families") {
  std::mt19937_64 rng(47);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  ShotModel exact = ShotModel::exact();

  const MixedAnsatz pa = PurificationAnsatz::make(2, 2, 2);
  CHECK(system_size(pa) == 2);
  const Eigen::VectorXd tp = random_params(param_count(pa), rng);
  const DensityMatrix rp = mixed_state(pa, tp);
  CHECK(estimate_expectation(h, pa, tp, exact) == doctest::Approx(exact_expectation(h, rp)));
  CHECK(estimate_purity(pa, tp, exact) == doctest::Approx(exact_purity(rp)));

  const MixedAnsatz ca = ConvexCombinationAnsatz::make(2);
  CHECK(system_size(ca) == 2);
  const Eigen::VectorXd tc = random_params(param_count(ca), rng);
  const DensityMatrix rc = mixed_state(ca, tc);
  CHECK(estimate_expectation(h, ca, tc, exact) == doctest::Approx(exact_expectation(h, rc)));
  CHECK(estimate_purity(ca, tc, exact) == doctest::Approx(exact_purity(rc)));

  // Sampled estimates concentrate near the exact values.
  ShotModel wide = ShotModel::sampled(200000, 7);
  CHECK(estimate_expectation(h, pa, tp, wide) == doctest::Approx(exact_expectation(h, rp)).epsilon(0.05));
  CHECK(estimate_purity(pa, tp, wide) == doctest::Approx(exact_purity(rp)).epsilon(0.05));
  CHECK(estimate_expectation(h, ca, tc, wide) == doctest::Approx(exact_expectation(h, rc)).epsilon(0.05));
  CHECK(estimate_purity(ca, tc, wide) == doctest::Approx(exact_purity(rc)).epsilon(0.05));
}

}  // TEST_SUITE
