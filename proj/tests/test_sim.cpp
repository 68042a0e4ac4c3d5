#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dualvqe/circuit.hpp"
#include "dualvqe/errors.hpp"
#include "dualvqe/kak.hpp"
#include "dualvqe/measure.hpp"
#include "dualvqe/state.hpp"
#include "oracles.hpp"

using namespace dualvqe;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(Eigen::Index(1) << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cxd(g(rng), g(rng));
  v /= v.norm();
  return StateVector::from_amplitudes(n, v);
}

ParamCircuit random_circuit(int n, int gates, std::mt19937_64& rng) {
  ParamCircuit c(n);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  for (int i = 0; i < gates; ++i) {
    int a = qubit(rng), b = qubit(rng);
    while (b == a) b = qubit(rng);
    switch (kind(rng)) {
      case 0: c.add_rotation(static_cast<Axis>(rng() % 3), a); break;
      case 1: c.add_cnot(a, b); break;
      case 2: c.add_cz(a, b); break;
      default: c.add_kak(a, b); break;
    }
  }
  return c;
}

Eigen::Matrix4cd exp_i_interaction(double kx, double ky, double kz) {
  // Independent route: assemble the Hermitian generator and exponentiate it.
  const Eigen::Matrix4cd gen =
      kx * oracle::dense_string(PauliString::parse("XX")) +
      ky * oracle::dense_string(PauliString::parse("YY")) +
      kz * oracle::dense_string(PauliString::parse("ZZ"));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(gen);
  Eigen::Vector4cd phases;
  for (int j = 0; j < 4; ++j) phases(j) = std::exp(cxd(0.0, es.eigenvalues()(j)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_SUITE("quantum-sim") {

TEST_CASE("basis states and validation") {
  const StateVector z = StateVector::zero(3);
  CHECK(z.amps(0) == cxd(1, 0));
  CHECK(z.amps.norm() == doctest::Approx(1.0));
  const StateVector b = StateVector::basis(2, 3);
  CHECK(b.amps(3) == cxd(1, 0));
  CHECK_THROWS_AS(StateVector::basis(2, 4), InputError);
  CHECK_THROWS_AS(StateVector::from_amplitudes(2, Eigen::VectorXcd::Ones(4)), InputError);
  CHECK_THROWS_AS(StateVector::zero(kMaxDenseQubits + 1), ResourceError);
}

TEST_CASE("partial trace on known entangled states") {
  // Bell pair: either side reduces to the maximally mixed state.
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const StateVector psi = StateVector::from_amplitudes(2, bell);
  for (int keep = 0; keep < 2; ++keep) {
    const DensityMatrix rho = partial_trace(psi, {keep});
    CHECK((rho.mat - 0.5 * Eigen::Matrix2cd::Identity()).norm() <= 1e-14);
  }
  // Three-site GHZ, keeping the non-adjacent pair {0, 2}.
  Eigen::VectorXcd ghz = Eigen::VectorXcd::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho02 = partial_trace(StateVector::from_amplitudes(3, ghz), {0, 2});
  Eigen::Matrix4cd want = Eigen::Matrix4cd::Zero();
  want(0, 0) = want(3, 3) = 0.5;
  CHECK((rho02.mat - want).norm() <= 1e-14);
}

TEST_CASE("partial trace of product states splits cleanly") {
  std::mt19937_64 rng(21);
  const StateVector a = random_state(1, rng);
  const StateVector b = random_state(2, rng);
  Eigen::VectorXcd prod(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) prod(4 * i + j) = a.amps(i) * b.amps(j);
  const StateVector psi = StateVector::from_amplitudes(3, prod);
  const DensityMatrix left = partial_trace(psi, {0});
  const DensityMatrix right = partial_trace(psi, {1, 2});
  CHECK((left.mat - a.amps * a.amps.adjoint()).norm() <= 1e-13);
  CHECK((right.mat - b.amps * b.amps.adjoint()).norm() <= 1e-13);
  CHECK(exact_purity(left) == doctest::Approx(1.0));
}

TEST_CASE("partial trace basics on random states") {
  std::mt19937_64 rng(22);
  const StateVector psi = random_state(4, rng);
  const DensityMatrix rho = partial_trace(psi, {1, 3});
  CHECK(rho.mat.trace().real() == doctest::Approx(1.0));
  CHECK((rho.mat - rho.mat.adjoint()).norm() <= 1e-13);
  CHECK(exact_purity(rho) <= 1.0 + 1e-12);
  // Keeping the whole register reproduces the projector.
  const DensityMatrix full = partial_trace(psi, {0, 1, 2, 3});
  CHECK((full.mat - psi.amps * psi.amps.adjoint()).norm() <= 1e-13);
  // Density-matrix input agrees with the pure-state path.
  const DensityMatrix viaDm = partial_trace(DensityMatrix::from_pure(psi), {1, 3});
  CHECK((viaDm.mat - rho.mat).norm() <= 1e-13);
  CHECK_THROWS_AS(partial_trace(psi, {0, 0}), InputError);
  CHECK_THROWS_AS(partial_trace(psi, {4}), InputError);
  CHECK_THROWS_AS(partial_trace(psi, {}), InputError);
}

TEST_CASE("rotation gates match their closed forms") {
  const double t = 0.7331;
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  Eigen::Matrix2cd rx, ry, rz;
  rx << cxd(c, 0), cxd(0, -s), cxd(0, -s), cxd(c, 0);
  ry << cxd(c, 0), cxd(-s, 0), cxd(s, 0), cxd(c, 0);
  rz << std::exp(cxd(0, -t / 2)), cxd(0, 0), cxd(0, 0), std::exp(cxd(0, t / 2));
  CHECK((rotation_matrix(Axis::X, t) - rx).norm() <= 1e-15);
  CHECK((rotation_matrix(Axis::Y, t) - ry).norm() <= 1e-15);
  CHECK((rotation_matrix(Axis::Z, t) - rz).norm() <= 1e-15);
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
    const Eigen::Matrix2cd roundtrip = rotation_matrix(ax, t) * rotation_matrix(ax, -t);
    CHECK((roundtrip - Eigen::Matrix2cd::Identity()).norm() <= 1e-15);
  }
}

TEST_CASE("apply_circuit agrees with the embedded-matrix oracle") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 12; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const ParamCircuit c = random_circuit(n, 8, rng);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    Eigen::VectorXd params(c.param_count);
    for (Eigen::Index i = 0; i < params.size(); ++i) params(i) = angle(rng);
    const StateVector in = random_state(n, rng);
    const StateVector got = apply_circuit(c, params, in);
    const Eigen::VectorXcd want = oracle::circuit_unitary(c, params) * in.amps;
    CHECK((got.amps - want).norm() <= 1e-10);
  }
}

TEST_CASE("circuit construction and application validate sizes") {
  ParamCircuit c(2);
  c.add_rotation(Axis::Y, 0);
  CHECK_THROWS_AS(c.add_rotation(Axis::Y, 2), InputError);
  CHECK_THROWS_AS(c.add_cnot(1, 1), InputError);
  CHECK_THROWS_AS(apply_circuit(c, Eigen::VectorXd::Zero(2)), InputError);
  CHECK_THROWS_AS(apply_circuit(c, Eigen::VectorXd::Zero(1), StateVector::zero(3)), InputError);
}

TEST_CASE("exact expectations match dense linear algebra") {
  std::mt19937_64 rng(24);
  const PauliHamiltonian h = transverse_field_ising(3, 0.8, 1.2);
  const Eigen::MatrixXcd hd = oracle::dense_hamiltonian(h);
  for (int rep = 0; rep < 5; ++rep) {
    const StateVector psi = random_state(3, rng);
    const double want = (psi.amps.adjoint() * hd * psi.amps)(0).real();
    CHECK(exact_expectation(h, psi) == doctest::Approx(want).epsilon(1e-12));
    const DensityMatrix rho = partial_trace(random_state(5, rng), {0, 2, 4});
    const double wantDm = (hd * rho.mat).trace().real();
    CHECK(exact_expectation(h, rho) == doctest::Approx(wantDm).epsilon(1e-12));
    CHECK(exact_purity(rho) == doctest::Approx((rho.mat * rho.mat).trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("sampled expectation is unbiased with binomial spread") {
  std::mt19937_64 seeder(25);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  const StateVector psi = random_state(2, seeder);
  const double exact = exact_expectation(h, psi);
  const long long shots = 128;
  const int reps = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    ShotModel m = ShotModel::sampled(shots, seeder());
    const double e = expectation(h, psi, m);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  const double se = std::sqrt(var / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
  // Identity terms carry no shot noise.
  const PauliHamiltonian id(2, {{2.5, PauliString::identity(2)}});
  ShotModel m = ShotModel::sampled(16, 7);
  CHECK(expectation(id, psi, m) == 2.5);
}

TEST_CASE("variance-matched normal branch stays unbiased") {
  std::mt19937_64 seeder(26);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  const StateVector psi = random_state(2, seeder);
  const double exact = exact_expectation(h, psi);
  const int reps = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    ShotModel m = ShotModel::sampled(static_cast<long long>(2e7), seeder());
    const double e = expectation(h, psi, m);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
}

TEST_CASE("sampled purity behaves like repeated swap tests") {
  std::mt19937_64 seeder(27);
  const DensityMatrix rho = partial_trace(random_state(4, seeder), {2, 3});
  const double exact = exact_purity(rho);
  const int reps = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    ShotModel m = ShotModel::sampled(64, seeder(), 256);
    const double p = purity(rho, m);
    sum += p;
    sumsq += p * p;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - exact) <= 3.0 * se);
  // Separate purity budget is honored: with purity_shots=0 it reuses shots.
  ShotModel m = ShotModel::sampled(5, 1);
  CHECK(m.purity_budget() == 5);
  ShotModel m2 = ShotModel::sampled(5, 1, 11);
  CHECK(m2.purity_budget() == 11);
}

TEST_CASE("interaction unitary equals a matrix exponential") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> k(-1.5, 1.5);
  for (int rep = 0; rep < 10; ++rep) {
    const double kx = k(rng), ky = k(rng), kz = k(rng);
    CHECK((interaction_unitary(kx, ky, kz) - exp_i_interaction(kx, ky, kz)).norm() <= 1e-12);
  }
}

TEST_CASE("euler angles reproduce single-qubit unitaries") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Matrix2cd u = oracle::haar_unitary(2, rng);
    const auto [a, b, g] = euler_angles_zyz(u);
    CHECK(phase_distance(euler_zyz(a, b, g), u) <= 1e-10);
  }
  // Diagonal and antidiagonal corner cases.
  const Eigen::Matrix2cd rz = rotation_matrix(Axis::Z, 1.1);
  const auto [a1, b1, g1] = euler_angles_zyz(rz);
  CHECK(b1 == doctest::Approx(0.0));
  CHECK(phase_distance(euler_zyz(a1, b1, g1), rz) <= 1e-12);
  Eigen::Matrix2cd flip;
  flip << cxd(0, 0), cxd(1, 0), cxd(-1, 0), cxd(0, 0);
  const auto [a2, b2, g2] = euler_angles_zyz(flip);
  CHECK(b2 == doctest::Approx(kPi));
  CHECK(phase_distance(euler_zyz(a2, b2, g2), flip) <= 1e-12);
}

TEST_CASE("kron_factor splits two-qubit products") {
  std::mt19937_64 rng(30);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::Matrix2cd a = oracle::haar_unitary(2, rng);
    const Eigen::Matrix2cd b = oracle::haar_unitary(2, rng);
    Eigen::Matrix4cd g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    const auto [fa, fb] = kron_factor(g);
    Eigen::Matrix4cd back;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) back.block<2, 2>(2 * i, 2 * j) = fa(i, j) * fb;
    CHECK((back - g).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(kron_factor(oracle::haar_unitary(4, rng) * 0.0), NumericError);
}

TEST_CASE("named two-qubit gates land on canonical interaction coefficients") {
  Eigen::Matrix4cd cnot, swap, iswap;
  cnot << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  swap << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1;
  iswap << 1, 0, 0, 0, 0, 0, cxd(0, 1), 0, 0, cxd(0, 1), 0, 0, 0, 0, 0, 1;
  const Eigen::VectorXd pc = kak_decompose(cnot);
  CHECK(pc(6) == doctest::Approx(kPi / 4));
  CHECK(std::abs(pc(7)) <= 1e-9);
  CHECK(std::abs(pc(8)) <= 1e-9);
  const Eigen::VectorXd ps = kak_decompose(swap);
  for (int i = 6; i < 9; ++i) CHECK(ps(i) == doctest::Approx(kPi / 4));
  const Eigen::VectorXd pi_ = kak_decompose(iswap);
  CHECK(pi_(6) == doctest::Approx(kPi / 4));
  CHECK(pi_(7) == doctest::Approx(kPi / 4));
  CHECK(std::abs(pi_(8)) <= 1e-9);
  const Eigen::VectorXd pid = kak_decompose(Eigen::Matrix4cd::Identity());
  for (int i = 6; i < 9; ++i) CHECK(std::abs(pid(i)) <= 1e-9);
}

TEST_CASE("local products decompose with zero interaction") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Matrix2cd a = oracle::haar_unitary(2, rng);
    const Eigen::Matrix2cd b = oracle::haar_unitary(2, rng);
    Eigen::Matrix4cd g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    const Eigen::VectorXd p = kak_decompose(g);
    for (int i = 6; i < 9; ++i) CHECK(std::abs(p(i)) <= 1e-9);
    CHECK(phase_distance(kak_unitary(p), g) <= 1e-9);
  }
}

TEST_CASE("decomposition round trips Haar-random unitaries in canonical ranges") {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Matrix4cd u = oracle::haar_unitary(4, rng);
    const Eigen::VectorXd p = kak_decompose(u);
    CHECK(phase_distance(kak_unitary(p), u) <= 1e-8);
    const double kx = p(6), ky = p(7), kz = p(8);
    CHECK(kx >= -1e-12);
    CHECK(kx <= kPi / 4 + 1e-12);
    CHECK(ky >= -1e-12);
    CHECK(ky <= kx + 1e-12);
    CHECK(std::abs(kz) <= ky + 1e-12);
    if (kx >= kPi / 4 - 1e-9) CHECK(kz >= -1e-9);
  }
}

TEST_CASE("boundary interaction with negative zz is renormalized") {
  const Eigen::Matrix4cd u = interaction_unitary(kPi / 4, 0.3, -0.2);
  const Eigen::VectorXd p = kak_decompose(u);
  CHECK(p(6) == doctest::Approx(kPi / 4));
  CHECK(p(7) == doctest::Approx(0.3));
  CHECK(p(8) == doctest::Approx(0.2));
  CHECK(phase_distance(kak_unitary(p), u) <= 1e-9);
}

TEST_CASE("decompose rejects non-unitary input") {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity() * 1.5;
  CHECK_THROWS_AS(kak_decompose(m), InputError);
}

TEST_CASE("phase distance ignores global phase") {
  std::mt19937_64 rng(33);
  const Eigen::Matrix4cd u = oracle::haar_unitary(4, rng);
  CHECK(phase_distance(u, std::exp(cxd(0, 1.234)) * u) <= 1e-12);
  CHECK(phase_distance(u, oracle::haar_unitary(4, rng)) > 1e-3);
}

}  // TEST_SUITE
