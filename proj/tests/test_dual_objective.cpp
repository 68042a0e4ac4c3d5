#include <cmath>
#include <random>

#include "doctest.h"
#include "dualvqe/errors.hpp"
#include "dualvqe/objective.hpp"
#include "oracles.hpp"

using namespace dualvqe;

namespace {

PauliHamiltonian random_hamiltonian(int n, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter(0, 3);
  std::normal_distribution<double> coeff(0.0, 1.0);
  std::vector<PauliTerm> ts;
  for (int t = 0; t < terms; ++t) {
    PauliString s = PauliString::identity(n);
    for (int q = 0; q < n; ++q) s.letters[static_cast<std::size_t>(q)] = static_cast<Pauli>(letter(rng));
    ts.push_back({coeff(rng), s});
  }
  return PauliHamiltonian(n, std::move(ts));
}

DensityMatrix random_mixed(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = cxd(g(rng), g(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  DensityMatrix out;
  out.n = n;
  out.mat = rho;
  return out;
}

}  // namespace

TEST_SUITE("dual-objective") {

TEST_CASE("single-qubit flip operator feasible point zeroes every margin") {
  // H = X, lowest eigenvalue -1; slack (X + I) = 2 * |+><+|.
  const PauliHamiltonian h(1, {{1.0, PauliString::parse("X")}});
  DensityMatrix omega;
  omega.n = 1;
  omega.mat = 0.5 * (oracle::dense_string(PauliString::parse("X")) + Eigen::Matrix2cd::Identity());
  const double e = exact_expectation(h, omega);
  const double p = exact_purity(omega);
  const ObjectiveBreakdown b = penalty_breakdown(HamiltonianMoments::of(h), -1.0, 2.0, e, p, 10.0);
  CHECK(b.terms.h_norm == doctest::Approx(2.0));
  CHECK(b.terms.eta_sq == doctest::Approx(2.0));
  CHECK(b.terms.nu_sq == doctest::Approx(4.0));
  CHECK(b.terms.eta_trace == doctest::Approx(0.0));
  CHECK(b.terms.nu_expect == doctest::Approx(-4.0));
  CHECK(b.terms.cross == doctest::Approx(-4.0));
  CHECK(b.penalty == doctest::Approx(0.0));
  CHECK(b.f == doctest::Approx(-1.0));
  CHECK(b.objective == doctest::Approx(-1.0));
}

TEST_CASE("six-term expansion equals the dense slack residual") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const PauliHamiltonian h = random_hamiltonian(n, 5, rng);
    const DensityMatrix omega = random_mixed(n, rng);
    const double eta = u(rng);
    const double nu = std::abs(u(rng));
    const double e = exact_expectation(h, omega);
    const double p = exact_purity(omega);
    const ObjectiveBreakdown b = penalty_breakdown(HamiltonianMoments::of(h), eta, nu, e, p, 10.0);
    const double dense = slack_residual(h, eta, nu, omega);
    CHECK(b.penalty == doctest::Approx(dense).epsilon(1e-10));
    CHECK(b.terms.sum() == doctest::Approx(b.penalty));
    CHECK(b.f == doctest::Approx(eta - 10.0 * b.penalty));
  }
}

TEST_CASE("feasible slack construction drives the penalty to zero") {
  std::mt19937_64 rng(52);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const PauliHamiltonian h = random_hamiltonian(n, 5, rng);
    const Eigen::MatrixXcd hd = oracle::dense_hamiltonian(h);
    const double eta = min_eigenvalue(h);
    const double nu = trace(h) - std::ldexp(eta, n);
    if (nu < 1e-9) continue;  // operator proportional to the identity
    DensityMatrix omega;
    omega.n = n;
    omega.mat = (hd - eta * Eigen::MatrixXcd::Identity(hd.rows(), hd.cols())) / nu;
    const ObjectiveBreakdown b =
        penalty_breakdown(HamiltonianMoments::of(h), eta, nu, exact_expectation(h, omega),
                          exact_purity(omega), 10.0);
    CHECK(std::abs(b.penalty) <= 1e-9 * std::max(1.0, trace_squared(h)));
    CHECK(std::abs(slack_residual(h, eta, nu, omega)) <= 1e-9 * std::max(1.0, trace_squared(h)));
  }
}

TEST_CASE("dual objective evaluates ansatz states end to end") {
  std::mt19937_64 rng(53);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  const MixedAnsatz a = PurificationAnsatz::make(2, 2, 3);
  std::uniform_real_distribution<double> ang(0.0, 6.28);
  DualPoint pt;
  pt.eta = -1.3;
  pt.nu = 2.4;
  pt.c = 10.0;
  pt.params.resize(param_count(a));
  for (Eigen::Index i = 0; i < pt.params.size(); ++i) pt.params(i) = ang(rng);
  ShotModel exact = ShotModel::exact();
  const ObjectiveBreakdown b = dual_objective(h, a, pt, exact);
  const DensityMatrix omega = mixed_state(a, pt.params);
  CHECK(b.expect_h == doctest::Approx(exact_expectation(h, omega)));
  CHECK(b.purity == doctest::Approx(exact_purity(omega)));
  CHECK(b.penalty == doctest::Approx(slack_residual(h, pt.eta, pt.nu, omega)).epsilon(1e-10));
  CHECK(b.f == doctest::Approx(pt.eta - pt.c * b.penalty));

  DualPoint bad = pt;
  bad.nu = -0.5;
  CHECK_THROWS_AS(dual_objective(h, a, bad, exact), InputError);
  bad = pt;
  bad.params = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(dual_objective(h, a, bad, exact), InputError);
}

TEST_CASE("vqe objective is the circuit energy") {
  std::mt19937_64 rng(54);
  const PauliHamiltonian h = transverse_field_ising(2, 1.0, 1.0);
  ParamCircuit c(2);
  c.add_rotation(Axis::Y, 0);
  c.add_rotation(Axis::Y, 1);
  c.add_cnot(0, 1);
  std::uniform_real_distribution<double> ang(0.0, 6.28);
  Eigen::VectorXd theta(c.param_count);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = ang(rng);
  ShotModel exact = ShotModel::exact();
  const StateVector psi = apply_circuit(c, theta);
  CHECK(vqe_objective(h, c, theta, exact) == doctest::Approx(exact_expectation(h, psi)));
  // Never below the true ground state.
  CHECK(vqe_objective(h, c, theta, exact) >= min_eigenvalue(h) - 1e-12);
}

}  // TEST_SUITE
