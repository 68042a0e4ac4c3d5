#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dualvqe/circuit.hpp"
#include "dualvqe/mps.hpp"

namespace dualvqe {

// Staircase of two-qubit unitaries over n qubits: blocks[j] acts on the
// neighbouring pair (j, j+1) with j the more significant qubit. Applying the
// layer to a state runs blocks[0] first, blocks[n-2] last.
struct UnitaryLayer {
  int n = 0;
  std::vector<Eigen::Matrix4cd> blocks;

  // Throws InputError unless there are n-1 blocks, each unitary within 1e-10.
  void check() const;
};

enum class TranslateVariant { d_all, o_all, d_all_o_all };

const char* variant_name(TranslateVariant v);

// layers are stored in construction order: layers.back() is applied to
// |0...0> first and layers.front() last, matching the disentangling order.
struct TranslationResult {
  std::vector<UnitaryLayer> layers;
  double fidelity = 0.0;
  TranslateVariant variant = TranslateVariant::d_all;
  std::vector<double> fidelity_series;  // one entry per recorded iteration
};

// |psi> = layers.front() * ... * layers.back() |0...0> built exactly as an
// MPS (no truncation).
Mps layers_state(const std::vector<UnitaryLayer>& layers, int n);

// |<layers-state | target>|^2 for a normalized target.
double layers_fidelity(const std::vector<UnitaryLayer>& layers, const Mps& target);

// Haar-distributed staircase layers, deterministic in seed.
std::vector<UnitaryLayer> random_layers(int n, int count, std::uint64_t seed);

// Exact one-layer disentangler for a chi <= 2 MPS: the returned staircase L
// satisfies |<0...0| L^dag |m>|^2 = 1 within 1e-9. Bonds above 2 are rejected.
UnitaryLayer chi2_layer(const Mps& m);

// Iterative disentangling: truncate the residual state to chi = 2, convert the
// truncation to a layer, pull the layer out, repeat. Stops after max_layers
// layers or once the recorded fidelity reaches target_fidelity.
TranslationResult analytic_decomposition(const Mps& target, int max_layers,
                                         double target_fidelity);

// Fidelity-network environment of one block: with blocks flattened in
// application order (layers.back() first, blocks[0] before blocks[1] within a
// layer), removing block m leaves a 4x4 tensor F with
// Tr[U_m^dag F] = <layers-state | target>.
Eigen::Matrix4cd environment_tensor(const std::vector<UnitaryLayer>& layers, int m,
                                    const Mps& target);

// Nearest unitary to (1-beta) u + beta polar(f), all projections by SVD with
// singular values discarded. beta in (0, 1].
Eigen::Matrix4cd od_update(const Eigen::Matrix4cd& u, const Eigen::Matrix4cd& f, double beta);

// Block-wise fidelity sweeps: each pass replaces every block in application
// order by its damped environment projection. One iteration = one block
// update; the fidelity after every update is recorded. Stops after `sweeps`
// passes or once the fidelity reaches target_fidelity.
TranslationResult optimizing_decomposition(std::vector<UnitaryLayer> layers, const Mps& target,
                                           long long sweeps, double target_fidelity, double beta);

struct TranslateConfig {
  int layers = 3;
  double target_fidelity = 0.999;
  double beta = 0.2;
  long long od_iterations = 2000;  // total block updates; sweeps = ceil(it / blocks)
  std::uint64_t seed = 0;          // rng for the random-start variant
  bool parallel = true;
};

// Runs the three variants (analytic only; optimizing from a random start;
// analytic warm start refined by optimizing) and returns the best, with every
// variant's final fidelity in variant_fidelity.
struct TranslateReport {
  TranslationResult best;
  std::array<double, 3> variant_fidelity{};  // indexed by TranslateVariant
};
TranslateReport translate(const Mps& target, const TranslateConfig& cfg);

// KAK-decomposes every block into a 15-parameter gate; the circuit prepares
// layers_state(layers) from |0...0> up to a global phase.
struct TranslatedCircuit {
  ParamCircuit circuit;
  Eigen::VectorXd params;
};
TranslatedCircuit layers_to_param_circuit(const std::vector<UnitaryLayer>& layers, int n);

}  // namespace dualvqe
