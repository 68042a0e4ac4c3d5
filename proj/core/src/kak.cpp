#include "dualvqe/kak.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dualvqe/circuit.hpp"
#include "dualvqe/errors.hpp"

namespace dualvqe {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd sigma(int axis) {
  Eigen::Matrix2cd m;
  switch (axis) {
    case 0: m << cxd(0, 0), cxd(1, 0), cxd(1, 0), cxd(0, 0); break;
    case 1: m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0); break;
    default: m << cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(-1, 0); break;
  }
  return m;
}

// Magic basis: columns are the Bell states (|00>+|11>, i|00>-i|11>, i|01>+i|10>, |01>-|10>)/sqrt(2).
// Conjugation by M makes local unitaries real orthogonal and diagonalizes XX, YY, ZZ.
Eigen::Matrix4cd magic_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd m;
  m << cxd(s, 0), cxd(0, s), cxd(0, 0), cxd(0, 0),
       cxd(0, 0), cxd(0, 0), cxd(0, s), cxd(s, 0),
       cxd(0, 0), cxd(0, 0), cxd(0, s), cxd(-s, 0),
       cxd(s, 0), cxd(0, -s), cxd(0, 0), cxd(0, 0);
  return m;
}

// Diagonal angles of exp(i k.Sigma) in the magic basis.
std::array<double, 4> interaction_angles(double kx, double ky, double kz) {
  return {kx - ky + kz, -kx + ky + kz, kx + ky - kz, -kx - ky - kz};
}

// Orthogonal Q simultaneously diagonalizing commuting real symmetric x and y.
Eigen::Matrix4d simultaneous_diagonalize(const Eigen::Matrix4d& x, const Eigen::Matrix4d& y) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> ex(x);
  Eigen::Matrix4d q = ex.eigenvectors();
  const Eigen::Vector4d vals = ex.eigenvalues();
  int start = 0;
  while (start < 4) {
    int end = start + 1;
    while (end < 4 && vals(end) - vals(start) < 1e-7) ++end;
    if (end - start > 1) {
      const int len = end - start;
      const Eigen::MatrixXd block =
          q.middleCols(start, len).transpose() * y * q.middleCols(start, len);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(block);
      q.middleCols(start, len) = q.middleCols(start, len) * ey.eigenvectors();
    }
    start = end;
  }
  const auto offdiag = [](const Eigen::Matrix4d& d) {
    Eigen::Matrix4d od = d;
    od.diagonal().setZero();
    return od.norm();
  };
  if (offdiag(q.transpose() * x * q) > 1e-6 || offdiag(q.transpose() * y * q) > 1e-6)
    throw NumericError("kak_decompose: simultaneous diagonalization failed");
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

struct KakParts {
  Eigen::Matrix2cd a1, a2, b1, b2;
  std::array<double, 3> k;
};

void shift_axis(KakParts& p, int axis, long m) {
  p.k[static_cast<std::size_t>(axis)] -= static_cast<double>(m) * (kPi / 2.0);
  if (m % 2 != 0) {
    p.a1 = p.a1 * sigma(axis);
    p.a2 = p.a2 * sigma(axis);
  }
}

// Single-qubit Clifford mapping sigma(ax1) <-> sigma(ax2) under conjugation (up to sign).
Eigen::Matrix2cd axis_swap_gate(int ax1, int ax2) {
  const int lo = std::min(ax1, ax2), hi = std::max(ax1, ax2);
  if (lo == 0 && hi == 1) return rotation_matrix(Axis::Z, kPi / 2.0);
  if (lo == 0 && hi == 2) return rotation_matrix(Axis::Y, kPi / 2.0);
  return rotation_matrix(Axis::X, kPi / 2.0);
}

void swap_axes(KakParts& p, int ax1, int ax2) {
  const Eigen::Matrix2cd g = axis_swap_gate(ax1, ax2);
  const Eigen::Matrix2cd gd = g.adjoint();
  p.a1 = p.a1 * gd;
  p.a2 = p.a2 * gd;
  p.b1 = g * p.b1;
  p.b2 = g * p.b2;
  std::swap(p.k[static_cast<std::size_t>(ax1)], p.k[static_cast<std::size_t>(ax2)]);
}

void flip_axes(KakParts& p, int ax1, int ax2) {
  const int third = 3 - ax1 - ax2;
  p.a1 = p.a1 * sigma(third);
  p.b1 = sigma(third) * p.b1;
  p.k[static_cast<std::size_t>(ax1)] = -p.k[static_cast<std::size_t>(ax1)];
  p.k[static_cast<std::size_t>(ax2)] = -p.k[static_cast<std::size_t>(ax2)];
}

void canonicalize(KakParts& p) {
  constexpr double tol = 1e-12;
  for (int ax = 0; ax < 3; ++ax) {
    const double m = std::ceil(p.k[static_cast<std::size_t>(ax)] / (kPi / 2.0) - 0.5);
    shift_axis(p, ax, static_cast<long>(m));
  }
  const auto abs_k = [&](int i) { return std::abs(p.k[static_cast<std::size_t>(i)]); };
  if (abs_k(0) < abs_k(1)) swap_axes(p, 0, 1);
  if (abs_k(1) < abs_k(2)) swap_axes(p, 1, 2);
  if (abs_k(0) < abs_k(1)) swap_axes(p, 0, 1);
  if (p.k[0] < -tol && p.k[1] < -tol) flip_axes(p, 0, 1);
  else if (p.k[0] < -tol) flip_axes(p, 0, 2);
  else if (p.k[1] < -tol) flip_axes(p, 1, 2);
  if (p.k[0] >= kPi / 4.0 - tol && p.k[2] < -tol) {
    flip_axes(p, 1, 2);
    flip_axes(p, 0, 1);
    shift_axis(p, 0, -1);
  }
}

}  // namespace

Eigen::Matrix2cd euler_zyz(double alpha, double beta, double gamma) {
  return rotation_matrix(Axis::Z, alpha) * rotation_matrix(Axis::Y, beta) *
         rotation_matrix(Axis::Z, gamma);
}

std::array<double, 3> euler_angles_zyz(const Eigen::Matrix2cd& u) {
  const cxd det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  if (std::abs(std::abs(det) - 1.0) > 1e-8)
    throw InputError("euler_angles_zyz: matrix is not unitary");
  const Eigen::Matrix2cd v = u / std::sqrt(det);
  const double lower = std::abs(v(1, 0));
  const double upper = std::abs(v(0, 0));
  const double beta = 2.0 * std::atan2(lower, upper);
  double alpha, gamma;
  if (lower < 1e-12) {
    alpha = 2.0 * std::arg(v(1, 1));
    gamma = 0.0;
  } else if (upper < 1e-12) {
    alpha = 2.0 * std::arg(v(1, 0));
    gamma = 0.0;
  } else {
    alpha = std::arg(v(1, 1)) + std::arg(v(1, 0));
    gamma = std::arg(v(1, 1)) - std::arg(v(1, 0));
  }
  return {alpha, beta, gamma};
}

std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> kron_factor(const Eigen::Matrix4cd& g) {
  // Reshuffle to R[(ia,ja),(ib,jb)] = g[(ia,ib),(ja,jb)]; a Kronecker product gives rank one.
  Eigen::Matrix4cd r;
  for (int ia = 0; ia < 2; ++ia)
    for (int ja = 0; ja < 2; ++ja)
      for (int ib = 0; ib < 2; ++ib)
        for (int jb = 0; jb < 2; ++jb)
          r(2 * ia + ja, 2 * ib + jb) = g(2 * ia + ib, 2 * ja + jb);
  Eigen::Index a0 = 0, b0 = 0;
  r.cwiseAbs().maxCoeff(&a0, &b0);
  if (std::abs(r(a0, b0)) < 1e-12) throw NumericError("kron_factor: zero matrix");
  const Eigen::Vector4cd acol = r.col(b0);
  const Eigen::Vector4cd brow = r.row(a0).transpose() / r(a0, b0);
  Eigen::Matrix2cd a, b;
  a << acol(0), acol(1), acol(2), acol(3);
  b << brow(0), brow(1), brow(2), brow(3);
  // Normalize to unitaries; the unimodular remainder is absorbed into a.
  const double na = a.norm() / std::sqrt(2.0);
  const double nb = b.norm() / std::sqrt(2.0);
  if (na < 1e-12 || nb < 1e-12) throw NumericError("kron_factor: degenerate factor");
  a /= na;
  b /= nb;
  Eigen::Matrix4cd ab;
  for (int ia = 0; ia < 2; ++ia)
    for (int ib = 0; ib < 2; ++ib)
      for (int ja = 0; ja < 2; ++ja)
        for (int jb = 0; jb < 2; ++jb)
          ab(2 * ia + ib, 2 * ja + jb) = a(ia, ja) * b(ib, jb);
  const cxd scale = (ab.adjoint() * g).trace() / 4.0;
  if (std::abs(std::abs(scale) - 1.0) > 1e-6 || (ab * scale - g).norm() > 1e-6)
    throw NumericError("kron_factor: input is not a Kronecker product of unitaries");
  a *= scale;
  return {a, b};
}

Eigen::Matrix4cd interaction_unitary(double kx, double ky, double kz) {
  static const Eigen::Matrix4cd m = magic_basis();
  const auto theta = interaction_angles(kx, ky, kz);
  Eigen::Vector4cd d;
  for (int j = 0; j < 4; ++j) d(j) = std::exp(cxd(0.0, theta[static_cast<std::size_t>(j)]));
  return m * d.asDiagonal() * m.adjoint();
}

Eigen::Matrix4cd kak_unitary(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != 15) throw InputError("kak_unitary: expected 15 parameters");
  const Eigen::Matrix2cd a1 = euler_zyz(p(0), p(1), p(2));
  const Eigen::Matrix2cd a2 = euler_zyz(p(3), p(4), p(5));
  const Eigen::Matrix2cd b1 = euler_zyz(p(9), p(10), p(11));
  const Eigen::Matrix2cd b2 = euler_zyz(p(12), p(13), p(14));
  Eigen::Matrix4cd left, right;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      left.block<2, 2>(2 * i, 2 * j) = a1(i, j) * a2;
      right.block<2, 2>(2 * i, 2 * j) = b1(i, j) * b2;
    }
  return left * interaction_unitary(p(6), p(7), p(8)) * right;
}

Eigen::VectorXd kak_decompose(const Eigen::Matrix4cd& u) {
  if ((u.adjoint() * u - Eigen::Matrix4cd::Identity()).norm() > 1e-8)
    throw InputError("kak_decompose: input is not unitary");
  static const Eigen::Matrix4cd m = magic_basis();
  const Eigen::Matrix4cd ut = m.adjoint() * u * m;
  const Eigen::Matrix4cd w = ut.transpose() * ut;
  const Eigen::Matrix4d q =
      simultaneous_diagonalize(w.real(), w.imag());
  const Eigen::Vector4cd lambda = (q.transpose() * w * q).diagonal();
  std::array<double, 4> theta{};
  for (int j = 0; j < 4; ++j) theta[static_cast<std::size_t>(j)] = std::arg(lambda(j)) / 2.0;
  Eigen::Vector4cd d;
  for (int j = 0; j < 4; ++j) d(j) = std::exp(cxd(0.0, theta[static_cast<std::size_t>(j)]));
  Eigen::Matrix4cd cl = ut * q * d.conjugate().asDiagonal();
  if (cl.imag().norm() > 1e-6) throw NumericError("kak_decompose: left factor is not real");
  Eigen::Matrix4d ol = cl.real();
  if (ol.determinant() < 0) {
    ol.col(0) = -ol.col(0);
    theta[0] += kPi;
  }
  const Eigen::Matrix4d orr = q.transpose();

  KakParts parts;
  {
    const Eigen::Matrix4cd l4 = m * ol.cast<cxd>() * m.adjoint();
    const Eigen::Matrix4cd r4 = m * orr.cast<cxd>() * m.adjoint();
    auto [a1, a2] = kron_factor(l4);
    auto [b1, b2] = kron_factor(r4);
    parts.a1 = a1;
    parts.a2 = a2;
    parts.b1 = b1;
    parts.b2 = b2;
  }
  parts.k[0] = (theta[0] - theta[1] + theta[2] - theta[3]) / 4.0;
  parts.k[1] = (-theta[0] + theta[1] + theta[2] - theta[3]) / 4.0;
  parts.k[2] = (theta[0] + theta[1] - theta[2] - theta[3]) / 4.0;
  canonicalize(parts);

  Eigen::VectorXd out(15);
  const auto ea1 = euler_angles_zyz(parts.a1);
  const auto ea2 = euler_angles_zyz(parts.a2);
  const auto eb1 = euler_angles_zyz(parts.b1);
  const auto eb2 = euler_angles_zyz(parts.b2);
  for (int i = 0; i < 3; ++i) {
    out(i) = ea1[static_cast<std::size_t>(i)];
    out(3 + i) = ea2[static_cast<std::size_t>(i)];
    out(6 + i) = parts.k[static_cast<std::size_t>(i)];
    out(9 + i) = eb1[static_cast<std::size_t>(i)];
    out(12 + i) = eb2[static_cast<std::size_t>(i)];
  }
  if (phase_distance(kak_unitary(out), u) > 1e-7)
    throw NumericError("kak_decompose: reconstruction check failed");
  return out;
}

double phase_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("phase_distance: shape mismatch");
  const cxd ip = (b.adjoint() * a).trace();
  // Optimal aligning phase; an orthogonal pair has no preferred phase.
  const cxd phase = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cxd(1.0, 0.0);
  return (a - phase * b).norm();
}

}  // namespace dualvqe
