#pragma once

#include <array>
#include <utility>

#include <Eigen/Dense>

#include "dualvqe/pauli.hpp"

namespace dualvqe {

// Rz(alpha) Ry(beta) Rz(gamma).
Eigen::Matrix2cd euler_zyz(double alpha, double beta, double gamma);

// Angles (alpha, beta, gamma) with euler_zyz reproducing u up to a global phase.
std::array<double, 3> euler_angles_zyz(const Eigen::Matrix2cd& u);

// Factors g = c * (a (x) b) with |c| = 1 absorbed into a.
// Throws NumericError when g is not a Kronecker product.
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> kron_factor(const Eigen::Matrix4cd& g);

// exp(i (kx XX + ky YY + kz ZZ)).
Eigen::Matrix4cd interaction_unitary(double kx, double ky, double kz);

// U = (A1 (x) A2) exp(i (kx XX + ky YY + kz ZZ)) (B1 (x) B2).
// params: A1, A2 Euler zyz triples, (kx, ky, kz), B1, B2 Euler zyz triples.
Eigen::Matrix4cd kak_unitary(const Eigen::Ref<const Eigen::VectorXd>& params15);

// Inverse of kak_unitary up to global phase. The interaction coefficients are
// canonical: kx >= ky >= |kz|, kx, ky in [0, pi/4], and kz >= 0 when kx = pi/4.
Eigen::VectorXd kak_decompose(const Eigen::Matrix4cd& u);

// min over phi of ||a - e^{i phi} b||_F.
double phase_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace dualvqe
