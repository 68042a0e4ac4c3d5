#include "dualvqe/circuit.hpp"

#include <cmath>

#include "dualvqe/errors.hpp"
#include "dualvqe/kak.hpp"

namespace dualvqe {

ParamCircuit::ParamCircuit(int n_qubits) : n(n_qubits) {}

namespace {

void check_qubit(const ParamCircuit& c, int q) {
  if (q < 0 || q >= c.n) throw InputError("circuit qubit index out of range");
}

}  // namespace

int ParamCircuit::add_rotation(Axis axis, int qubit) {
  check_qubit(*this, qubit);
  gates.push_back(RotationGate{axis, qubit, param_count});
  return param_count++;
}

void ParamCircuit::add_cnot(int control, int target) {
  check_qubit(*this, control);
  check_qubit(*this, target);
  if (control == target) throw InputError("CNOT control equals target");
  gates.push_back(CnotGate{control, target});
}

void ParamCircuit::add_cz(int a, int b) {
  check_qubit(*this, a);
  check_qubit(*this, b);
  if (a == b) throw InputError("CZ qubits must differ");
  gates.push_back(CzGate{a, b});
}

int ParamCircuit::add_kak(int qa, int qb) {
  check_qubit(*this, qa);
  check_qubit(*this, qb);
  if (qa == qb) throw InputError("two-qubit block qubits must differ");
  const int base = param_count;
  gates.push_back(KakGate{qa, qb, base});
  param_count += 15;
  return base;
}

Eigen::Matrix2cd rotation_matrix(Axis axis, double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  switch (axis) {
    case Axis::X:
      m << cxd(c, 0), cxd(0, -s), cxd(0, -s), cxd(c, 0);
      break;
    case Axis::Y:
      m << cxd(c, 0), cxd(-s, 0), cxd(s, 0), cxd(c, 0);
      break;
    case Axis::Z:
      m << std::exp(cxd(0, -theta / 2.0)), cxd(0, 0), cxd(0, 0), std::exp(cxd(0, theta / 2.0));
      break;
  }
  return m;
}

void apply_single_qubit(Eigen::VectorXcd& amps, int n, int qubit, const Eigen::Matrix2cd& u) {
  const std::uint64_t mask = 1ull << (n - 1 - qubit);
  const std::uint64_t dim = 1ull << n;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Eigen::Index i0 = static_cast<Eigen::Index>(i);
    const Eigen::Index i1 = static_cast<Eigen::Index>(i | mask);
    const cxd a0 = amps(i0), a1 = amps(i1);
    amps(i0) = u(0, 0) * a0 + u(0, 1) * a1;
    amps(i1) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void apply_two_qubit(Eigen::VectorXcd& amps, int n, int qa, int qb, const Eigen::Matrix4cd& u) {
  const std::uint64_t ma = 1ull << (n - 1 - qa);
  const std::uint64_t mb = 1ull << (n - 1 - qb);
  const std::uint64_t dim = 1ull << n;
  for (std::uint64_t i = 0; i < dim; ++i) {
    if (i & (ma | mb)) continue;
    Eigen::Index idx[4];
    idx[0] = static_cast<Eigen::Index>(i);
    idx[1] = static_cast<Eigen::Index>(i | mb);
    idx[2] = static_cast<Eigen::Index>(i | ma);
    idx[3] = static_cast<Eigen::Index>(i | ma | mb);
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v(k) = amps(idx[k]);
    v = u * v;
    for (int k = 0; k < 4; ++k) amps(idx[k]) = v(k);
  }
}

StateVector apply_circuit(const ParamCircuit& c, const Eigen::VectorXd& params,
                          const StateVector& in) {
  if (in.n != c.n) throw InputError("apply_circuit: state register size mismatch");
  if (params.size() != c.param_count)
    throw InputError("apply_circuit: expected " + std::to_string(c.param_count) + " parameters, got " +
                     std::to_string(params.size()));
  StateVector out = in;
  for (const Gate& g : c.gates) {
    if (const auto* r = std::get_if<RotationGate>(&g)) {
      apply_single_qubit(out.amps, c.n, r->qubit, rotation_matrix(r->axis, params(r->param)));
    } else if (const auto* x = std::get_if<CnotGate>(&g)) {
      const std::uint64_t mc = 1ull << (c.n - 1 - x->control);
      const std::uint64_t mt = 1ull << (c.n - 1 - x->target);
      const std::uint64_t dim = 1ull << c.n;
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & mc) && !(i & mt))
          std::swap(out.amps(static_cast<Eigen::Index>(i)), out.amps(static_cast<Eigen::Index>(i | mt)));
    } else if (const auto* z = std::get_if<CzGate>(&g)) {
      const std::uint64_t mz = (1ull << (c.n - 1 - z->a)) | (1ull << (c.n - 1 - z->b));
      const std::uint64_t dim = 1ull << c.n;
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & mz) == mz) out.amps(static_cast<Eigen::Index>(i)) = -out.amps(static_cast<Eigen::Index>(i));
    } else if (const auto* k = std::get_if<KakGate>(&g)) {
      apply_two_qubit(out.amps, c.n, k->qa, k->qb,
                      kak_unitary(params.segment<15>(k->param0)));
    }
  }
  return out;
}

StateVector apply_circuit(const ParamCircuit& c, const Eigen::VectorXd& params) {
  return apply_circuit(c, params, StateVector::zero(c.n));
}

}  // namespace dualvqe
