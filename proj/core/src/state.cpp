#include "dualvqe/state.hpp"

#include <algorithm>
#include <cmath>

#include "dualvqe/errors.hpp"

namespace dualvqe {

namespace {

void check_register(int n) {
  if (n < 1) throw InputError("state needs at least one qubit");
  if (n > kMaxDenseQubits)
    throw ResourceError("dense state on " + std::to_string(n) + " qubits exceeds the limit of " +
                        std::to_string(kMaxDenseQubits));
}

}  // namespace

StateVector StateVector::zero(int n) { return basis(n, 0); }

StateVector StateVector::basis(int n, std::uint64_t x) {
  check_register(n);
  if (x >> n) throw InputError("basis index out of range");
  StateVector s;
  s.n = n;
  s.amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
  s.amps(static_cast<Eigen::Index>(x)) = 1.0;
  return s;
}

StateVector StateVector::from_amplitudes(int n, Eigen::VectorXcd a) {
  check_register(n);
  if (a.size() != (Eigen::Index(1) << n))
    throw InputError("amplitude vector has wrong dimension for " + std::to_string(n) + " qubits");
  if (std::abs(a.norm() - 1.0) > 1e-8) throw InputError("amplitude vector is not normalized");
  StateVector s;
  s.n = n;
  s.amps = std::move(a);
  return s;
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  DensityMatrix rho;
  rho.n = psi.n;
  rho.mat = psi.amps * psi.amps.adjoint();
  return rho;
}

namespace {

// Shared index bookkeeping: split basis indices into kept and traced parts.
struct KeepPlan {
  std::vector<int> keep;   // ascending original qubit indices
  std::vector<int> trace;  // the rest, ascending
  int n;

  KeepPlan(int n_, const std::vector<int>& keep_) : keep(keep_), n(n_) {
    std::sort(keep.begin(), keep.end());
    if (keep.empty()) throw InputError("partial_trace: must keep at least one qubit");
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
      throw InputError("partial_trace: duplicate qubit index");
    if (keep.front() < 0 || keep.back() >= n) throw InputError("partial_trace: qubit index out of range");
    for (int q = 0; q < n; ++q)
      if (!std::binary_search(keep.begin(), keep.end(), q)) trace.push_back(q);
  }

  // Assemble a full index from a kept sub-index and a traced sub-index
  // (both MSB-first within their own sub-register).
  std::uint64_t full_index(std::uint64_t kept, std::uint64_t traced) const {
    std::uint64_t out = 0;
    const int nk = static_cast<int>(keep.size());
    const int nt = static_cast<int>(trace.size());
    for (int i = 0; i < nk; ++i)
      if (kept & (1ull << (nk - 1 - i))) out |= 1ull << (n - 1 - keep[static_cast<std::size_t>(i)]);
    for (int i = 0; i < nt; ++i)
      if (traced & (1ull << (nt - 1 - i))) out |= 1ull << (n - 1 - trace[static_cast<std::size_t>(i)]);
    return out;
  }
};

}  // namespace

DensityMatrix partial_trace(const StateVector& psi, const std::vector<int>& keep) {
  const KeepPlan plan(psi.n, keep);
  const int nk = static_cast<int>(plan.keep.size());
  const Eigen::Index dk = Eigen::Index(1) << nk;
  const std::uint64_t dt = 1ull << plan.trace.size();
  DensityMatrix rho;
  rho.n = nk;
  rho.mat = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::uint64_t t = 0; t < dt; ++t) {
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dk); ++a) {
      const cxd va = psi.amps(static_cast<Eigen::Index>(plan.full_index(a, t)));
      if (va == cxd(0.0, 0.0)) continue;
      for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dk); ++b) {
        const cxd vb = psi.amps(static_cast<Eigen::Index>(plan.full_index(b, t)));
        rho.mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += va * std::conj(vb);
      }
    }
  }
  return rho;
}

DensityMatrix partial_trace(const DensityMatrix& rho_in, const std::vector<int>& keep) {
  const KeepPlan plan(rho_in.n, keep);
  const int nk = static_cast<int>(plan.keep.size());
  const Eigen::Index dk = Eigen::Index(1) << nk;
  const std::uint64_t dt = 1ull << plan.trace.size();
  DensityMatrix rho;
  rho.n = nk;
  rho.mat = Eigen::MatrixXcd::Zero(dk, dk);
  for (std::uint64_t t = 0; t < dt; ++t)
    for (std::uint64_t a = 0; a < static_cast<std::uint64_t>(dk); ++a)
      for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dk); ++b)
        rho.mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
            rho_in.mat(static_cast<Eigen::Index>(plan.full_index(a, t)),
                       static_cast<Eigen::Index>(plan.full_index(b, t)));
  return rho;
}

double exact_expectation(const PauliHamiltonian& h, const StateVector& psi) {
  if (h.num_qubits() != psi.n) throw InputError("expectation: qubit count mismatch");
  cxd acc(0.0, 0.0);
  const auto dim = static_cast<std::uint64_t>(psi.dim());
  for (const auto& term : h.terms()) {
    cxd v(0.0, 0.0);
    for (std::uint64_t i = 0; i < dim; ++i) {
      const cxd ai = psi.amps(static_cast<Eigen::Index>(i));
      if (ai == cxd(0.0, 0.0)) continue;
      const PauliAction a = pauli_action(term.string, i);
      v += std::conj(psi.amps(static_cast<Eigen::Index>(a.target))) * a.phase * ai;
    }
    acc += term.coeff * v;
  }
  return acc.real();
}

double exact_expectation(const PauliHamiltonian& h, const DensityMatrix& rho) {
  if (h.num_qubits() != rho.n) throw InputError("expectation: qubit count mismatch");
  cxd acc(0.0, 0.0);
  const auto dim = static_cast<std::uint64_t>(rho.dim());
  for (const auto& term : h.terms()) {
    cxd v(0.0, 0.0);
    for (std::uint64_t i = 0; i < dim; ++i) {
      const PauliAction a = pauli_action(term.string, i);
      v += a.phase * rho.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.target));
    }
    acc += term.coeff * v;
  }
  return acc.real();
}

double exact_purity(const DensityMatrix& rho) { return rho.mat.squaredNorm(); }

}  // namespace dualvqe
