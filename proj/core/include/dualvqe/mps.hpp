#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dualvqe/objective.hpp"
#include "dualvqe/optimizer.hpp"
#include "dualvqe/state.hpp"

namespace dualvqe {

// Open-boundary tensor train with physical dimension 2. site[k][p] maps the
// left bond to the right bond for physical value p; outer bonds have size 1.
// Site 0 is the most significant bit of the densified index.
struct Mps {
  int n = 0;
  std::vector<std::array<Eigen::MatrixXcd, 2>> site;

  Eigen::Index left_bond(int k) const { return site[static_cast<std::size_t>(k)][0].rows(); }
  Eigen::Index right_bond(int k) const { return site[static_cast<std::size_t>(k)][0].cols(); }
  Eigen::Index max_bond() const;
  void check_shapes() const;  // throws InputError on inconsistent bonds
};

// Reference sites are the leading n_ref, the mixed state lives on the
// trailing n_sys. Mirrors the purification register layout.
struct Partition {
  int n_ref = 1;
  int n_sys = 1;

  int total() const { return n_ref + n_sys; }
  void validate(int n) const;
};

// Normal-distributed real entries on the exact bond profile min(chi_max, 2^k, 2^(n-k)),
// gauged to center 0 and normalized.
Mps random_mps(int n, int chi_max, std::uint64_t seed);

double norm(const Mps& m);

// Mixed-canonical gauge: left-isometries before `center`, right-isometries after.
Mps canonicalize(Mps m, int center);

StateVector densify(const Mps& m);  // dense limit applies

cxd mps_overlap(const Mps& a, const Mps& b);            // <a|b>
double mps_fidelity(const Mps& m, const StateVector& psi);  // |<m|psi>|^2

struct TruncationResult {
  Mps mps;        // re-normalized
  double fidelity;  // product of retained singular weight across bonds
};
// Left-to-right sweep of per-bond rank-chi truncations on the
// right-canonical gauge.
TruncationResult truncate(const Mps& m, int chi);

// Contract gate (index 2*p_j + p_{j+1}) into sites (j, j+1) and re-split by
// SVD. Singular values below 1e-14 of the largest are dropped; chi_limit > 0
// additionally caps the new bond. absorb_right places the weights on site j+1.
void apply_two_site(Mps& m, int j, const Eigen::Matrix4cd& gate, int chi_limit = 0,
                    bool absorb_right = true);

// Tr[(I (x) H) |m><m|] for normalized m: the system-register expectation.
double mps_expectation(const PauliHamiltonian& h_sys, const Mps& m, const Partition& part);

// Tr[omega^2] of the reduced state on the system sites via the four-chain
// transfer network; never materializes omega.
double mps_purity(const Mps& m, const Partition& part);

// Binary checkpoint (see README for the exact layout).
void save_mps(const Mps& m, const std::string& path);
Mps load_mps(const std::string& path);

// Gradient of f = eta - c * penalty in real coordinates: entry (i,j) of
// site[k][p] holds d f/d Re(A) + i * d f/d Im(A).
struct PretrainGradient {
  std::vector<std::array<Eigen::MatrixXcd, 2>> site;
  double eta = 0.0;
  double nu = 0.0;
  ObjectiveBreakdown value;
};
PretrainGradient pretrain_gradient(const PauliHamiltonian& h_sys, const Mps& m,
                                   const Partition& part, double eta, double nu, double c);

struct PretrainOptions {
  double c = 30.0;
  long long iterations = 2000;
  double lr = 0.15;
  double momentum = 0.9;
  double lr_decay = 0.996;     // applied once past decay_start * iterations
  double decay_start = 0.5;    // fraction of the run at constant lr
  double lr_floor = 1e-3;
  // NaN selects the certified defaults eta = a0 - sum|a_i| (a Pauli-coefficient
  // lower bound on the spectrum) and nu = Tr[H] - 2^n * eta, which make the
  // penalty exactly attainable from the start.
  double eta_init = std::numeric_limits<double>::quiet_NaN();
  double nu_init = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
};

struct PretrainResult {
  Mps mps;
  double eta = 0.0;
  double nu = 0.0;
  TrainingTrace trace;
  bool aborted = false;
};

// Momentum ascent on (tensors, eta, nu) jointly with one shared rate; the
// joint velocity is clipped to unit norm, nu is driven through the scaled
// coordinate nu / 2^n to balance curvature against eta, and the state is
// re-gauged and re-normalized every iteration.
PretrainResult pretrain_mps(const PauliHamiltonian& h_sys, const Partition& part, int chi_max,
                            const PretrainOptions& opt);

}  // namespace dualvqe
