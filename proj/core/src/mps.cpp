#include "dualvqe/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "dualvqe/errors.hpp"

namespace dualvqe {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// M (r x c) = Q (r x m) R (m x c) with m = min(r, c) and Q' Q = I.
void thin_qr(const MatrixXcd& m, MatrixXcd& q, MatrixXcd& r) {
  Eigen::HouseholderQR<MatrixXcd> qr(m);
  const Index k = std::min(m.rows(), m.cols());
  q = qr.householderQ() * MatrixXcd::Identity(m.rows(), k);
  r = MatrixXcd(qr.matrixQR().topRows(k).triangularView<Eigen::Upper>());
}

// Left-orthogonalize site k, pushing the residual into site k+1.
void push_right(Mps& m, int k) {
  auto& a = m.site[static_cast<std::size_t>(k)];
  const Index l = a[0].rows();
  MatrixXcd stacked(2 * l, a[0].cols());
  stacked << a[0], a[1];
  MatrixXcd q, r;
  thin_qr(stacked, q, r);
  a[0] = q.topRows(l);
  a[1] = q.bottomRows(l);
  auto& b = m.site[static_cast<std::size_t>(k) + 1];
  b[0] = r * b[0];
  b[1] = r * b[1];
}

// Right-orthogonalize site k, pushing the residual into site k-1.
void push_left(Mps& m, int k) {
  auto& a = m.site[static_cast<std::size_t>(k)];
  const Index r = a[0].cols();
  MatrixXcd wide(a[0].rows(), 2 * r);
  wide << a[0], a[1];
  MatrixXcd q, rr;
  thin_qr(wide.adjoint(), q, rr);  // wide = rr' q'
  a[0] = q.topRows(r).adjoint();
  a[1] = q.bottomRows(r).adjoint();
  auto& b = m.site[static_cast<std::size_t>(k) - 1];
  b[0] = b[0] * rr.adjoint();
  b[1] = b[1] * rr.adjoint();
}

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Zero();
  switch (p) {
    case Pauli::I: s(0, 0) = 1.0; s(1, 1) = 1.0; break;
    case Pauli::X: s(0, 1) = 1.0; s(1, 0) = 1.0; break;
    case Pauli::Y: s(0, 1) = cxd(0.0, -1.0); s(1, 0) = cxd(0.0, 1.0); break;
    case Pauli::Z: s(0, 0) = 1.0; s(1, 1) = -1.0; break;
  }
  return s;
}

// Flat rank-4 tensor, row-major over (i0, i1, i2, i3). The four modes track
// the bond indices of ket copy 1, bra copy 1, ket copy 2, bra copy 2.
struct Tensor4 {
  std::array<Index, 4> dim;
  VectorXcd v;

  cxd at(Index i0, Index i1, Index i2, Index i3) const {
    return v(((i0 * dim[1] + i1) * dim[2] + i2) * dim[3] + i3);
  }
};

Tensor4 unit_tensor4() {
  Tensor4 t;
  t.dim = {1, 1, 1, 1};
  t.v = VectorXcd::Ones(1);
  return t;
}

// out[..., j, ...] = sum_i t[..., i, ...] mat(i, j) on the given mode.
Tensor4 mode_mult(const Tensor4& t, int mode, const MatrixXcd& mat) {
  const Index d = t.dim[static_cast<std::size_t>(mode)];
  const Index e = mat.cols();
  Index outer = 1, inner = 1;
  for (int a = 0; a < mode; ++a) outer *= t.dim[static_cast<std::size_t>(a)];
  for (int a = mode + 1; a < 4; ++a) inner *= t.dim[static_cast<std::size_t>(a)];
  Tensor4 out;
  out.dim = t.dim;
  out.dim[static_cast<std::size_t>(mode)] = e;
  out.v = VectorXcd::Zero(outer * e * inner);
  for (Index o = 0; o < outer; ++o) {
    for (Index i = 0; i < d; ++i) {
      const auto src = t.v.segment((o * d + i) * inner, inner);
      for (Index j = 0; j < e; ++j) {
        out.v.segment((o * e + j) * inner, inner) += mat(i, j) * src;
      }
    }
  }
  return out;
}

// Physical wirings of the two-copy overlap network. Reference sites tie each
// ket to its own bra; system sites tie each ket to the other copy's bra,
// which is what turns <psi x psi| SWAP_sys |psi x psi> into Tr[omega^2].
void purity_wiring(bool system_site, int p, int u, int& q, int& v) {
  q = system_site ? u : p;
  v = system_site ? p : u;
}

// Transfer the four-chain tensor through one site, left to right.
Tensor4 purity_step_left(const Tensor4& t, const std::array<MatrixXcd, 2>& a, bool system_site) {
  Tensor4 acc;
  acc.dim = {a[0].cols(), a[0].cols(), a[0].cols(), a[0].cols()};
  acc.v = VectorXcd::Zero(acc.dim[0] * acc.dim[1] * acc.dim[2] * acc.dim[3]);
  for (int p = 0; p < 2; ++p) {
    for (int u = 0; u < 2; ++u) {
      int q, v;
      purity_wiring(system_site, p, u, q, v);
      Tensor4 tmp = mode_mult(t, 0, a[static_cast<std::size_t>(p)]);
      tmp = mode_mult(tmp, 1, a[static_cast<std::size_t>(q)].conjugate());
      tmp = mode_mult(tmp, 2, a[static_cast<std::size_t>(u)]);
      tmp = mode_mult(tmp, 3, a[static_cast<std::size_t>(v)].conjugate());
      acc.v += tmp.v;
    }
  }
  return acc;
}

// Transfer right to left: contract the site's right bonds against t.
Tensor4 purity_step_right(const Tensor4& t, const std::array<MatrixXcd, 2>& a, bool system_site) {
  Tensor4 acc;
  acc.dim = {a[0].rows(), a[0].rows(), a[0].rows(), a[0].rows()};
  acc.v = VectorXcd::Zero(acc.dim[0] * acc.dim[1] * acc.dim[2] * acc.dim[3]);
  for (int p = 0; p < 2; ++p) {
    for (int u = 0; u < 2; ++u) {
      int q, v;
      purity_wiring(system_site, p, u, q, v);
      Tensor4 tmp = mode_mult(t, 0, a[static_cast<std::size_t>(p)].transpose());
      tmp = mode_mult(tmp, 1, a[static_cast<std::size_t>(q)].adjoint());
      tmp = mode_mult(tmp, 2, a[static_cast<std::size_t>(u)].transpose());
      tmp = mode_mult(tmp, 3, a[static_cast<std::size_t>(v)].adjoint());
      acc.v += tmp.v;
    }
  }
  return acc;
}

Pauli site_letter(const PauliString& s, const Partition& part, int k) {
  return k < part.n_ref ? Pauli::I : s.letters[static_cast<std::size_t>(k - part.n_ref)];
}

void write_raw(std::ofstream& out, const void* p, std::size_t bytes) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* p, std::size_t bytes) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
  if (!in) throw InputError("truncated tensor checkpoint");
}

constexpr char kMagic[8] = {'D', 'V', 'Q', 'E', 'M', 'P', 'S', '1'};

}  // namespace

Eigen::Index Mps::max_bond() const {
  Index best = 1;
  for (const auto& a : site) best = std::max(best, a[0].cols());
  return best;
}

void Mps::check_shapes() const {
  if (n < 1 || site.size() != static_cast<std::size_t>(n)) {
    throw InputError("tensor train site count does not match n");
  }
  for (int k = 0; k < n; ++k) {
    const auto& a = site[static_cast<std::size_t>(k)];
    if (a[0].rows() != a[1].rows() || a[0].cols() != a[1].cols()) {
      throw InputError("tensor train physical slices disagree in shape");
    }
    if (a[0].rows() < 1 || a[0].cols() < 1) throw InputError("empty tensor train bond");
  }
  if (left_bond(0) != 1 || right_bond(n - 1) != 1) {
    throw InputError("tensor train boundary bonds must have size 1");
  }
  for (int k = 0; k + 1 < n; ++k) {
    if (right_bond(k) != left_bond(k + 1)) throw InputError("tensor train bond mismatch");
  }
}

void Partition::validate(int n) const {
  if (n_ref < 1) throw InputError("partition needs at least one reference site");
  if (n_sys < n_ref) throw InputError("partition needs n_sys >= n_ref");
  if (n_ref + n_sys != n) throw InputError("partition does not cover the chain");
}

Mps random_mps(int n, int chi_max, std::uint64_t seed) {
  if (n < 1) throw InputError("random_mps needs n >= 1");
  if (chi_max < 1) throw InputError("random_mps needs chi_max >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto bond = [&](int cut) {  // bond between site cut-1 and cut
    const int e = std::min(cut, n - cut);
    const Index cap = e >= 30 ? std::numeric_limits<Index>::max() : (Index{1} << e);
    return std::min<Index>(chi_max, cap);
  };
  Mps m;
  m.n = n;
  m.site.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const Index l = bond(k), r = bond(k + 1);
    for (auto& slice : m.site[static_cast<std::size_t>(k)]) {
      slice.resize(l, r);
      for (Index j = 0; j < r; ++j) {
        for (Index i = 0; i < l; ++i) slice(i, j) = gauss(rng);
      }
    }
  }
  m = canonicalize(std::move(m), 0);
  double nm = std::sqrt(m.site[0][0].squaredNorm() + m.site[0][1].squaredNorm());
  if (!(nm > 0.0)) throw NumericError("random tensor train collapsed to zero");
  m.site[0][0] /= nm;
  m.site[0][1] /= nm;
  return m;
}

double norm(const Mps& m) { return std::sqrt(std::max(0.0, mps_overlap(m, m).real())); }

Mps canonicalize(Mps m, int center) {
  m.check_shapes();
  if (center < 0 || center >= m.n) throw InputError("canonical center out of range");
  for (int k = 0; k < center; ++k) push_right(m, k);
  for (int k = m.n - 1; k > center; --k) push_left(m, k);
  return m;
}

StateVector densify(const Mps& m) {
  m.check_shapes();
  if (m.n > kMaxDenseQubits) throw ResourceError("tensor train too wide to densify");
  MatrixXcd acc = MatrixXcd::Ones(1, 1);
  for (int k = 0; k < m.n; ++k) {
    const auto& a = m.site[static_cast<std::size_t>(k)];
    MatrixXcd next(acc.rows() * 2, a[0].cols());
    for (Index row = 0; row < acc.rows(); ++row) {
      for (int p = 0; p < 2; ++p) {
        next.row(2 * row + p) = acc.row(row) * a[static_cast<std::size_t>(p)];
      }
    }
    acc = std::move(next);
  }
  StateVector out;
  out.n = m.n;
  out.amps = acc.col(0);
  return out;
}

cxd mps_overlap(const Mps& a, const Mps& b) {
  a.check_shapes();
  b.check_shapes();
  if (a.n != b.n) throw InputError("overlap needs equal chain lengths");
  MatrixXcd t = MatrixXcd::Ones(1, 1);
  for (int k = 0; k < a.n; ++k) {
    const auto& sa = a.site[static_cast<std::size_t>(k)];
    const auto& sb = b.site[static_cast<std::size_t>(k)];
    MatrixXcd next = MatrixXcd::Zero(sa[0].cols(), sb[0].cols());
    for (int p = 0; p < 2; ++p) {
      next += sa[static_cast<std::size_t>(p)].adjoint() * t * sb[static_cast<std::size_t>(p)];
    }
    t = std::move(next);
  }
  return t(0, 0);
}

double mps_fidelity(const Mps& m, const StateVector& psi) {
  const StateVector dense = densify(m);
  if (dense.amps.size() != psi.amps.size()) throw InputError("fidelity needs equal dimensions");
  return std::norm(dense.amps.dot(psi.amps));
}

TruncationResult truncate(const Mps& m, int chi) {
  if (chi < 1) throw InputError("truncate needs chi >= 1");
  TruncationResult out;
  out.mps = canonicalize(m, 0);
  out.fidelity = 1.0;
  for (int k = 0; k + 1 < out.mps.n; ++k) {
    auto& a = out.mps.site[static_cast<std::size_t>(k)];
    const Index l = a[0].rows();
    MatrixXcd stacked(2 * l, a[0].cols());
    stacked << a[0], a[1];
    Eigen::JacobiSVD<MatrixXcd> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd s = svd.singularValues();
    const Index keep = std::min<Index>(chi, s.size());
    const double total = s.squaredNorm();
    if (!(total > 0.0)) throw NumericError("truncation hit a zero norm");
    out.fidelity *= s.head(keep).squaredNorm() / total;
    a[0] = svd.matrixU().topRows(l).leftCols(keep);
    a[1] = svd.matrixU().bottomRows(l).leftCols(keep);
    const MatrixXcd carry =
        s.head(keep).cast<cxd>().asDiagonal() * MatrixXcd(svd.matrixV().leftCols(keep).adjoint());
    auto& b = out.mps.site[static_cast<std::size_t>(k) + 1];
    b[0] = carry * b[0];
    b[1] = carry * b[1];
  }
  auto& last = out.mps.site[static_cast<std::size_t>(out.mps.n) - 1];
  const double nm = std::sqrt(last[0].squaredNorm() + last[1].squaredNorm());
  if (!(nm > 0.0)) throw NumericError("truncation hit a zero norm");
  last[0] /= nm;
  last[1] /= nm;
  return out;
}

void apply_two_site(Mps& m, int j, const Eigen::Matrix4cd& gate, int chi_limit, bool absorb_right) {
  m.check_shapes();
  if (j < 0 || j + 1 >= m.n) throw InputError("two-site gate position out of range");
  const auto& a = m.site[static_cast<std::size_t>(j)];
  const auto& b = m.site[static_cast<std::size_t>(j) + 1];
  const Index l = a[0].rows(), r = b[0].cols();
  MatrixXcd theta = MatrixXcd::Zero(2 * l, 2 * r);
  for (int pp = 0; pp < 2; ++pp) {
    for (int qq = 0; qq < 2; ++qq) {
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
          const cxd g = gate(2 * pp + qq, 2 * p + q);
          if (g == cxd(0.0, 0.0)) continue;
          theta.block(pp * l, qq * r, l, r) +=
              g * (a[static_cast<std::size_t>(p)] * b[static_cast<std::size_t>(q)]);
        }
      }
    }
  }
  Eigen::JacobiSVD<MatrixXcd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd s = svd.singularValues();
  Index keep = 1;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-14 * s(0)) keep = i + 1;
  }
  if (chi_limit > 0) keep = std::min<Index>(keep, chi_limit);
  const MatrixXcd u = svd.matrixU().leftCols(keep);
  const MatrixXcd vh = svd.matrixV().leftCols(keep).adjoint();
  auto& na = m.site[static_cast<std::size_t>(j)];
  auto& nb = m.site[static_cast<std::size_t>(j) + 1];
  for (int p = 0; p < 2; ++p) {
    if (absorb_right) {
      na[static_cast<std::size_t>(p)] = u.middleRows(p * l, l);
      nb[static_cast<std::size_t>(p)] =
          s.head(keep).cast<cxd>().asDiagonal() * vh.middleCols(p * r, r);
    } else {
      na[static_cast<std::size_t>(p)] =
          u.middleRows(p * l, l) * s.head(keep).cast<cxd>().asDiagonal();
      nb[static_cast<std::size_t>(p)] = vh.middleCols(p * r, r);
    }
  }
}

double mps_expectation(const PauliHamiltonian& h_sys, const Mps& m, const Partition& part) {
  m.check_shapes();
  part.validate(m.n);
  if (h_sys.num_qubits() != part.n_sys) {
    throw InputError("hamiltonian width does not match the system sites");
  }
  double acc = 0.0;
  for (const auto& term : h_sys.terms()) {
    MatrixXcd t = MatrixXcd::Ones(1, 1);
    for (int k = 0; k < m.n; ++k) {
      const auto& a = m.site[static_cast<std::size_t>(k)];
      const Pauli letter = site_letter(term.string, part, k);
      MatrixXcd next = MatrixXcd::Zero(a[0].cols(), a[0].cols());
      if (letter == Pauli::I) {
        for (int p = 0; p < 2; ++p) {
          next += a[static_cast<std::size_t>(p)].adjoint() * t * a[static_cast<std::size_t>(p)];
        }
      } else {
        const Eigen::Matrix2cd sigma = pauli_matrix(letter);
        for (int pb = 0; pb < 2; ++pb) {
          for (int p = 0; p < 2; ++p) {
            if (sigma(pb, p) == cxd(0.0, 0.0)) continue;
            next += sigma(pb, p) * (a[static_cast<std::size_t>(pb)].adjoint() * t *
                                    a[static_cast<std::size_t>(p)]);
          }
        }
      }
      t = std::move(next);
    }
    acc += term.coeff * t(0, 0).real();
  }
  return acc;
}

double mps_purity(const Mps& m, const Partition& part) {
  m.check_shapes();
  part.validate(m.n);
  Tensor4 t = unit_tensor4();
  for (int k = 0; k < m.n; ++k) {
    t = purity_step_left(t, m.site[static_cast<std::size_t>(k)], k >= part.n_ref);
  }
  return t.v(0).real();
}

void save_mps(const Mps& m, const std::string& path) {
  m.check_shapes();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open checkpoint for writing: " + path);
  write_raw(out, kMagic, sizeof(kMagic));
  const std::int64_t n = m.n;
  write_raw(out, &n, sizeof(n));
  for (int k = 0; k <= m.n; ++k) {
    const std::int64_t bond = k < m.n ? m.left_bond(k) : 1;
    write_raw(out, &bond, sizeof(bond));
  }
  for (const auto& a : m.site) {  // row-major over (left, physical, right)
    for (Index i = 0; i < a[0].rows(); ++i) {
      for (const auto& slice : a) {
        for (Index j = 0; j < slice.cols(); ++j) {
          const cxd value = slice(i, j);
          write_raw(out, &value, sizeof(value));
        }
      }
    }
  }
  if (!out) throw InputError("failed writing checkpoint: " + path);
}

Mps load_mps(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint: " + path);
  char magic[8];
  read_raw(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw InputError("not a tensor checkpoint: " + path);
  }
  std::int64_t n = 0;
  read_raw(in, &n, sizeof(n));
  if (n < 1 || n > 4096) throw InputError("checkpoint chain length out of range");
  std::vector<std::int64_t> bond(static_cast<std::size_t>(n) + 1);
  for (auto& b : bond) {
    read_raw(in, &b, sizeof(b));
    if (b < 1 || b > (1 << 20)) throw InputError("checkpoint bond dimension out of range");
  }
  Mps m;
  m.n = static_cast<int>(n);
  m.site.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < m.n; ++k) {
    auto& a = m.site[static_cast<std::size_t>(k)];
    const Index rows = bond[static_cast<std::size_t>(k)];
    const Index cols = bond[static_cast<std::size_t>(k) + 1];
    a[0].resize(rows, cols);
    a[1].resize(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (auto& slice : a) {
        for (Index j = 0; j < cols; ++j) {
          cxd value;
          read_raw(in, &value, sizeof(value));
          slice(i, j) = value;
        }
      }
    }
  }
  m.check_shapes();
  return m;
}

PretrainGradient pretrain_gradient(const PauliHamiltonian& h_sys, const Mps& m,
                                   const Partition& part, double eta, double nu, double c) {
  m.check_shapes();
  part.validate(m.n);
  if (h_sys.num_qubits() != part.n_sys) {
    throw InputError("hamiltonian width does not match the system sites");
  }
  const int n = m.n;
  const auto moments = HamiltonianMoments::of(h_sys);

  // Value and per-tensor removal gradient of <psi| O |psi> for a product of
  // one-site operators, via two-sided environments.
  auto chain_value_grad = [&](const std::vector<Eigen::Matrix2cd>& sigma, double coeff,
                              double& value, std::vector<std::array<MatrixXcd, 2>>& grad) {
    std::vector<MatrixXcd> left(static_cast<std::size_t>(n) + 1);
    left[0] = MatrixXcd::Ones(1, 1);
    for (int k = 0; k < n; ++k) {
      const auto& a = m.site[static_cast<std::size_t>(k)];
      MatrixXcd next = MatrixXcd::Zero(a[0].cols(), a[0].cols());
      for (int pb = 0; pb < 2; ++pb) {
        for (int p = 0; p < 2; ++p) {
          const cxd w = sigma[static_cast<std::size_t>(k)](pb, p);
          if (w == cxd(0.0, 0.0)) continue;
          next += w * (a[static_cast<std::size_t>(pb)].adjoint() * left[static_cast<std::size_t>(k)] *
                       a[static_cast<std::size_t>(p)]);
        }
      }
      left[static_cast<std::size_t>(k) + 1] = std::move(next);
    }
    value += coeff * left[static_cast<std::size_t>(n)](0, 0).real();
    MatrixXcd right = MatrixXcd::Ones(1, 1);  // environment right of site k
    for (int k = n - 1; k >= 0; --k) {
      const auto& a = m.site[static_cast<std::size_t>(k)];
      for (int pb = 0; pb < 2; ++pb) {
        MatrixXcd g = MatrixXcd::Zero(a[0].rows(), a[0].cols());
        for (int p = 0; p < 2; ++p) {
          const cxd w = sigma[static_cast<std::size_t>(k)](pb, p);
          if (w == cxd(0.0, 0.0)) continue;
          g += w * (left[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(p)] *
                    right.transpose());
        }
        grad[static_cast<std::size_t>(k)][static_cast<std::size_t>(pb)] += coeff * g;
      }
      MatrixXcd next = MatrixXcd::Zero(a[0].rows(), a[0].rows());
      for (int pb = 0; pb < 2; ++pb) {
        for (int p = 0; p < 2; ++p) {
          const cxd w = sigma[static_cast<std::size_t>(k)](pb, p);
          if (w == cxd(0.0, 0.0)) continue;
          next += w * (a[static_cast<std::size_t>(pb)].conjugate() * right *
                       a[static_cast<std::size_t>(p)].transpose());
        }
      }
      right = std::move(next);
    }
  };

  auto zero_like = [&] {
    std::vector<std::array<MatrixXcd, 2>> grad(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto& a = m.site[static_cast<std::size_t>(k)];
      grad[static_cast<std::size_t>(k)][0] = MatrixXcd::Zero(a[0].rows(), a[0].cols());
      grad[static_cast<std::size_t>(k)][1] = MatrixXcd::Zero(a[0].rows(), a[0].cols());
    }
    return grad;
  };

  // Raw <H> and its removal gradient, term by term.
  std::vector<std::array<MatrixXcd, 2>> de = zero_like();
  double expect = 0.0;
  for (const auto& term : h_sys.terms()) {
    std::vector<Eigen::Matrix2cd> sigma(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      sigma[static_cast<std::size_t>(k)] = pauli_matrix(site_letter(term.string, part, k));
    }
    chain_value_grad(sigma, term.coeff, expect, de);
  }

  // Raw squared norm and its removal gradient (identity chain).
  std::vector<std::array<MatrixXcd, 2>> dn = zero_like();
  double norm_sq = 0.0;
  {
    const std::vector<Eigen::Matrix2cd> ones(static_cast<std::size_t>(n),
                                             Eigen::Matrix2cd::Identity());
    chain_value_grad(ones, 1.0, norm_sq, dn);
  }
  if (!(norm_sq > 0.0)) throw NumericError("gradient evaluated on a zero state");

  // Purity value and d Tr[omega^2]/d conj(A) from the four-chain network.
  // conj(A_k) appears on modes 1 and 3; the copy-swap symmetry makes both
  // removals equal, hence the single mode-1 removal doubled below.
  std::vector<Tensor4> pleft(static_cast<std::size_t>(n) + 1);
  pleft[0] = unit_tensor4();
  for (int k = 0; k < n; ++k) {
    pleft[static_cast<std::size_t>(k) + 1] =
        purity_step_left(pleft[static_cast<std::size_t>(k)], m.site[static_cast<std::size_t>(k)],
                         k >= part.n_ref);
  }
  const double purity = pleft[static_cast<std::size_t>(n)].v(0).real();
  std::vector<std::array<MatrixXcd, 2>> dp(static_cast<std::size_t>(n));
  Tensor4 pright = unit_tensor4();  // environment right of site k
  for (int k = n - 1; k >= 0; --k) {
    const auto& a = m.site[static_cast<std::size_t>(k)];
    const bool system_site = k >= part.n_ref;
    const Index l = a[0].rows(), r = a[0].cols();
    auto& g = dp[static_cast<std::size_t>(k)];
    g[0] = MatrixXcd::Zero(l, r);
    g[1] = MatrixXcd::Zero(l, r);
    for (int p = 0; p < 2; ++p) {
      for (int u = 0; u < 2; ++u) {
        int q, v;
        purity_wiring(system_site, p, u, q, v);
        Tensor4 tmp = mode_mult(pleft[static_cast<std::size_t>(k)], 0, a[static_cast<std::size_t>(p)]);
        tmp = mode_mult(tmp, 2, a[static_cast<std::size_t>(u)]);
        tmp = mode_mult(tmp, 3, a[static_cast<std::size_t>(v)].conjugate());
        auto& target = g[static_cast<std::size_t>(q)];
        for (Index bl = 0; bl < l; ++bl) {
          for (Index br = 0; br < r; ++br) {
            cxd s = 0.0;
            for (Index j0 = 0; j0 < r; ++j0) {
              for (Index j2 = 0; j2 < r; ++j2) {
                for (Index j3 = 0; j3 < r; ++j3) {
                  s += tmp.at(j0, bl, j2, j3) * pright.at(j0, br, j2, j3);
                }
              }
            }
            target(bl, br) += s;
          }
        }
      }
    }
    g[0] *= 2.0;
    g[1] *= 2.0;
    if (k > 0) pright = purity_step_right(pright, a, system_site);
  }

  // The cost is defined on the normalized state: E = <H>/|psi|^2 and
  // Tr[omega^2] = P/|psi|^4, which removes the norm-scaling direction from
  // the gradient.
  const double e_hat = expect / norm_sq;
  const double p_hat = purity / (norm_sq * norm_sq);
  PretrainGradient out;
  out.value = penalty_breakdown(moments, eta, nu, e_hat, p_hat, c);
  out.site.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int p = 0; p < 2; ++p) {
      const auto& de_k = de[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      const auto& dp_k = dp[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      const auto& dn_k = dn[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      const MatrixXcd de_hat = de_k / norm_sq - (e_hat / norm_sq) * dn_k;
      const MatrixXcd dp_hat =
          dp_k / (norm_sq * norm_sq) - (2.0 * p_hat / norm_sq) * dn_k;
      // d f / d conj(A) = -c (nu^2 dP - 2 nu dE); real-coordinate gradient is
      // twice that for a real-valued objective.
      out.site[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] =
          2.0 * (-c) * (nu * nu * dp_hat - 2.0 * nu * de_hat);
    }
  }
  out.eta = 1.0 - c * (2.0 * eta * moments.dim - 2.0 * moments.tr + 2.0 * nu);
  out.nu = -c * (2.0 * nu * p_hat - 2.0 * e_hat + 2.0 * eta);
  return out;
}

PretrainResult pretrain_mps(const PauliHamiltonian& h_sys, const Partition& part, int chi_max,
                            const PretrainOptions& opt) {
  if (opt.iterations < 0) throw InputError("pretraining needs iterations >= 0");
  if (!(opt.lr > 0.0) || !(opt.lr_decay > 0.0) || opt.lr_decay > 1.0) {
    throw InputError("pretraining needs lr > 0 and lr_decay in (0, 1]");
  }
  if (!(opt.momentum >= 0.0) || opt.momentum >= 1.0) {
    throw InputError("pretraining needs momentum in [0, 1)");
  }
  const double dim = std::pow(2.0, part.n_sys);
  double eta0 = opt.eta_init;
  if (std::isnan(eta0)) {
    // a0 - sum|a_i| over non-identity terms lower-bounds every eigenvalue, so
    // the penalty minimum over physical omega is exactly zero at this eta.
    eta0 = trace(h_sys) / dim;
    for (const auto& term : h_sys.terms()) {
      bool identity = true;
      for (const auto l : term.string.letters) identity = identity && l == Pauli::I;
      if (!identity) eta0 -= std::abs(term.coeff);
    }
  }
  double nu0 = opt.nu_init;
  if (std::isnan(nu0)) nu0 = trace(h_sys) - dim * eta0;

  PretrainResult res;
  res.mps = random_mps(part.total(), chi_max, opt.seed);
  res.eta = eta0;
  res.nu = nu0;
  double nt = res.nu / dim;  // scaled multiplier coordinate, curvature-matched to eta
  double lr = opt.lr;
  std::vector<std::array<Eigen::MatrixXcd, 2>> vel(static_cast<std::size_t>(res.mps.n));
  for (int k = 0; k < res.mps.n; ++k) {
    for (int p = 0; p < 2; ++p) {
      const auto& a = res.mps.site[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      vel[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] =
          Eigen::MatrixXcd::Zero(a.rows(), a.cols());
    }
  }
  double veta = 0.0;
  double vnt = 0.0;
  for (long long t = 0;; ++t) {
    PretrainGradient g = pretrain_gradient(h_sys, res.mps, part, res.eta, res.nu, opt.c);
    res.trace.rows.push_back({t, res.eta, res.nu, opt.c, g.value.penalty, g.value.f, lr, lr,
                              opt.seed});
    if (!std::isfinite(g.value.f)) {
      res.aborted = true;
      break;
    }
    if (t == opt.iterations) break;
    veta = opt.momentum * veta + g.eta;
    vnt = opt.momentum * vnt + dim * g.nu;
    double sq = veta * veta + vnt * vnt;
    for (int k = 0; k < res.mps.n; ++k) {
      for (int p = 0; p < 2; ++p) {
        auto& v = vel[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
        v = opt.momentum * v + g.site[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
        sq += v.squaredNorm();
      }
    }
    const double scale = sq > 1.0 ? 1.0 / std::sqrt(sq) : 1.0;
    res.eta += lr * scale * veta;
    nt = std::max(0.0, nt + lr * scale * vnt);
    res.nu = dim * nt;
    for (int k = 0; k < res.mps.n; ++k) {
      for (int p = 0; p < 2; ++p) {
        res.mps.site[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] +=
            lr * scale * vel[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)];
      }
    }
    res.mps = canonicalize(std::move(res.mps), 0);
    const double nm =
        std::sqrt(res.mps.site[0][0].squaredNorm() + res.mps.site[0][1].squaredNorm());
    if (!(nm > 0.0)) {
      res.aborted = true;
      break;
    }
    res.mps.site[0][0] /= nm;
    res.mps.site[0][1] /= nm;
    if (static_cast<double>(t + 1) > opt.decay_start * static_cast<double>(opt.iterations)) {
      lr = std::max(opt.lr_floor, lr * opt.lr_decay);
    }
  }
  return res;
}

}  // namespace dualvqe
