#include "dualvqe/translate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <random>
#include <utility>

#include "dualvqe/errors.hpp"
#include "dualvqe/kak.hpp"

namespace dualvqe {

namespace {

using cxd = std::complex<double>;
using Eigen::Matrix4cd;
using Eigen::MatrixXcd;

constexpr double kUnitaryTol = 1e-10;
constexpr double kDegenerateSv = 1e-12;

// First entry with magnitude above kDegenerateSv is rotated to be real
// positive; the shared gauge convention for completed/degenerate columns.
void fix_column_phase(Eigen::Ref<Eigen::Vector4cd> col) {
  for (int i = 0; i < 4; ++i) {
    const cxd z = col(i);
    if (std::abs(z) > kDegenerateSv) {
      col *= std::conj(z) / std::abs(z);
      return;
    }
  }
}

Matrix4cd polar_unitary(const Matrix4cd& f) {
  Eigen::JacobiSVD<Matrix4cd> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix4cd u = svd.matrixU();
  Matrix4cd v = svd.matrixV();
  for (int i = 0; i < 4; ++i) {
    if (svd.singularValues()(i) < kDegenerateSv) {
      fix_column_phase(u.col(i));
      fix_column_phase(v.col(i));
    }
  }
  return u * v.adjoint();
}

Mps zero_state(int n) {
  Mps m;
  m.n = n;
  m.site.resize(static_cast<std::size_t>(n));
  for (auto& s : m.site) {
    s[0] = MatrixXcd::Constant(1, 1, cxd(1.0, 0.0));
    s[1] = MatrixXcd::Zero(1, 1);
  }
  return m;
}

cxd zero_amplitude(const Mps& m) {
  MatrixXcd acc = MatrixXcd::Identity(1, 1);
  for (const auto& s : m.site) acc = acc * s[0];
  return acc(0, 0);
}

Mps normalized_copy(const Mps& m) {
  Mps out = canonicalize(m, 0);
  const double nm = std::sqrt(out.site[0][0].squaredNorm() + out.site[0][1].squaredNorm());
  if (!(nm > 0.0)) throw NumericError("translation target has zero norm");
  out.site[0][0] /= nm;
  out.site[0][1] /= nm;
  return out;
}

// Blocks flattened in application order: layers.back() first, j ascending.
int block_count(const std::vector<UnitaryLayer>& layers, int n) {
  return static_cast<int>(layers.size()) * (n - 1);
}

const Matrix4cd& block_at(const std::vector<UnitaryLayer>& layers, int n, int m) {
  const int per = n - 1;
  const std::size_t layer = layers.size() - 1 - static_cast<std::size_t>(m / per);
  return layers[layer].blocks[static_cast<std::size_t>(m % per)];
}

Matrix4cd& block_at(std::vector<UnitaryLayer>& layers, int n, int m) {
  const int per = n - 1;
  const std::size_t layer = layers.size() - 1 - static_cast<std::size_t>(m / per);
  return layers[layer].blocks[static_cast<std::size_t>(m % per)];
}

int block_qubit(int n, int m) { return m % (n - 1); }

void validate_layers(const std::vector<UnitaryLayer>& layers, int n) {
  for (const auto& l : layers) {
    if (l.n != n) throw InputError("layer width does not match the register");
    l.check();
  }
}

// <x| (x) |y> transfer product over sites [lo, hi).
MatrixXcd transfer_range(const Mps& x, const Mps& y, int lo, int hi, MatrixXcd acc) {
  for (int k = lo; k < hi; ++k) {
    const auto& xs = x.site[static_cast<std::size_t>(k)];
    const auto& ys = y.site[static_cast<std::size_t>(k)];
    MatrixXcd next = MatrixXcd::Zero(xs[0].cols(), ys[0].cols());
    for (int p = 0; p < 2; ++p) next += xs[p].adjoint() * acc * ys[p];
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

void UnitaryLayer::check() const {
  if (n < 2) throw InputError("a staircase layer needs at least two qubits");
  if (blocks.size() != static_cast<std::size_t>(n - 1)) {
    throw InputError("a staircase layer over n qubits needs n - 1 blocks");
  }
  for (const auto& b : blocks) {
    if ((b.adjoint() * b - Matrix4cd::Identity()).norm() > kUnitaryTol) {
      throw InputError("staircase block is not unitary");
    }
  }
}

const char* variant_name(TranslateVariant v) {
  switch (v) {
    case TranslateVariant::d_all: return "D_all";
    case TranslateVariant::o_all: return "O_all";
    case TranslateVariant::d_all_o_all: return "D_allO_all";
  }
  throw InputError("unknown translate variant");
}

Mps layers_state(const std::vector<UnitaryLayer>& layers, int n) {
  if (n < 1) throw InputError("layers_state needs n >= 1");
  if (n == 1 && !layers.empty()) throw InputError("staircase layers need n >= 2");
  validate_layers(layers, n);
  Mps m = zero_state(n);
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    for (int j = 0; j + 1 < n; ++j) {
      apply_two_site(m, j, it->blocks[static_cast<std::size_t>(j)], 0, true);
    }
  }
  return m;
}

double layers_fidelity(const std::vector<UnitaryLayer>& layers, const Mps& target) {
  const double nm = norm(target);
  if (!(nm > 0.0)) throw NumericError("translation target has zero norm");
  const cxd a = mps_overlap(layers_state(layers, target.n), target);
  return std::norm(a) / (nm * nm);
}

std::vector<UnitaryLayer> random_layers(int n, int count, std::uint64_t seed) {
  if (n < 2) throw InputError("staircase layers need n >= 2");
  if (count < 0) throw InputError("layer count must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<UnitaryLayer> layers(static_cast<std::size_t>(count));
  for (auto& layer : layers) {
    layer.n = n;
    layer.blocks.resize(static_cast<std::size_t>(n - 1));
    for (auto& b : layer.blocks) {
      Matrix4cd g;
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) g(r, c) = cxd(gauss(rng), gauss(rng));
      }
      const Eigen::HouseholderQR<Matrix4cd> qr(g);
      Matrix4cd q = qr.householderQ();
      const Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int i = 0; i < 4; ++i) {
        const cxd d = r(i, i);
        q.col(i) *= std::abs(d) > 0.0 ? d / std::abs(d) : cxd(1.0, 0.0);
      }
      b = q;
    }
  }
  return layers;
}

UnitaryLayer chi2_layer(const Mps& m) {
  m.check_shapes();
  if (m.n < 2) throw InputError("chi2_layer needs at least two sites");
  if (m.max_bond() > 2) throw InputError("chi2_layer needs every bond <= 2");
  const Mps b = normalized_copy(m);  // sites 1..n-1 right-isometric

  UnitaryLayer layer;
  layer.n = b.n;
  layer.blocks.resize(static_cast<std::size_t>(b.n - 1));
  for (int j = 0; j + 1 < b.n; ++j) {
    const int chi_l = static_cast<int>(b.site[static_cast<std::size_t>(j)][0].rows());
    Matrix4cd u = Matrix4cd::Zero();
    std::vector<int> filled;
    for (int l = 0; l < chi_l; ++l) {
      // Input |l>|0> -> the tensor's (phys, right-bond) column; the last block
      // absorbs the final site so the bond becomes that qubit's state.
      for (int p = 0; p < 2; ++p) {
        const auto& a = b.site[static_cast<std::size_t>(j)][static_cast<std::size_t>(p)];
        if (j + 2 < b.n) {
          for (int r = 0; r < a.cols(); ++r) u(2 * p + r, 2 * l) = a(l, r);
        } else {
          for (int q = 0; q < 2; ++q) {
            const auto& last = b.site[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(q)];
            cxd acc(0.0, 0.0);
            for (int r = 0; r < a.cols(); ++r) acc += a(l, r) * last(r, 0);
            u(2 * p + q, 2 * l) = acc;
          }
        }
      }
      filled.push_back(2 * l);
    }
    for (int col = 0; col < 4; ++col) {
      if (std::find(filled.begin(), filled.end(), col) != filled.end()) continue;
      // Orthonormal completion: best-conditioned canonical candidate, then the
      // first-nonzero-real-positive gauge.
      Eigen::Vector4cd best = Eigen::Vector4cd::Zero();
      double best_norm = -1.0;
      for (int cand = 0; cand < 4; ++cand) {
        Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
        v(cand) = 1.0;
        for (int prev : filled) v -= u.col(prev).dot(v) * u.col(prev);
        const double nv = v.norm();
        if (nv > best_norm) {
          best_norm = nv;
          best = v;
        }
      }
      if (!(best_norm > 1e-8)) throw NumericError("isometry completion failed");
      best /= best_norm;
      fix_column_phase(best);
      u.col(col) = best;
      filled.push_back(col);
    }
    layer.blocks[static_cast<std::size_t>(j)] = u;
  }
  layer.check();
  return layer;
}

TranslationResult analytic_decomposition(const Mps& target, int max_layers,
                                         double target_fidelity) {
  if (max_layers < 0) throw InputError("analytic decomposition needs max_layers >= 0");
  if (!(target_fidelity > 0.0) || target_fidelity > 1.0) {
    throw InputError("target fidelity must lie in (0, 1]");
  }
  Mps psi = normalized_copy(target);
  TranslationResult res;
  res.variant = TranslateVariant::d_all;
  double fid = std::norm(zero_amplitude(psi));
  res.fidelity_series.push_back(fid);
  for (int k = 0; k < max_layers && fid < target_fidelity; ++k) {
    const UnitaryLayer layer = chi2_layer(truncate(psi, 2).mps);
    // Pull the layer out of the residual: psi <- L^dag psi, exactly.
    for (int j = psi.n - 2; j >= 0; --j) {
      apply_two_site(psi, j, layer.blocks[static_cast<std::size_t>(j)].adjoint().eval(), 0,
                     false);
    }
    res.layers.push_back(layer);
    fid = std::norm(zero_amplitude(psi));
    res.fidelity_series.push_back(fid);
  }
  res.fidelity = fid;
  return res;
}

Eigen::Matrix4cd environment_tensor(const std::vector<UnitaryLayer>& layers, int m,
                                    const Mps& target) {
  const int n = target.n;
  validate_layers(layers, n);
  const int total = block_count(layers, n);
  if (m < 0 || m >= total) throw InputError("environment block index out of range");

  Mps x = zero_state(n);
  for (int i = 0; i < m; ++i) {
    apply_two_site(x, block_qubit(n, i), block_at(layers, n, i), 0, true);
  }
  Mps y = normalized_copy(target);
  for (int i = total - 1; i > m; --i) {
    apply_two_site(y, block_qubit(n, i), block_at(layers, n, i).adjoint().eval(), 0, false);
  }

  const int q = block_qubit(n, m);
  const MatrixXcd lenv =
      transfer_range(x, y, 0, q, MatrixXcd::Identity(1, 1));
  MatrixXcd renv = MatrixXcd::Identity(1, 1);
  for (int k = n - 1; k > q + 1; --k) {
    const auto& xs = x.site[static_cast<std::size_t>(k)];
    const auto& ys = y.site[static_cast<std::size_t>(k)];
    MatrixXcd next = MatrixXcd::Zero(xs[0].rows(), ys[0].rows());
    for (int p = 0; p < 2; ++p) next += xs[p].conjugate() * renv * ys[p].transpose();
    renv = std::move(next);
  }

  Matrix4cd f;
  for (int py0 = 0; py0 < 2; ++py0) {
    for (int py1 = 0; py1 < 2; ++py1) {
      const auto& ya = y.site[static_cast<std::size_t>(q)][static_cast<std::size_t>(py0)];
      const auto& yb = y.site[static_cast<std::size_t>(q + 1)][static_cast<std::size_t>(py1)];
      for (int px0 = 0; px0 < 2; ++px0) {
        for (int px1 = 0; px1 < 2; ++px1) {
          const auto& xa = x.site[static_cast<std::size_t>(q)][static_cast<std::size_t>(px0)];
          const auto& xb = x.site[static_cast<std::size_t>(q + 1)][static_cast<std::size_t>(px1)];
          const MatrixXcd left = xa.adjoint() * lenv * ya;          // (bx1, by1)
          const MatrixXcd right = xb.conjugate() * renv * yb.transpose();
          f(2 * py0 + py1, 2 * px0 + px1) = left.cwiseProduct(right).sum();
        }
      }
    }
  }
  return f;
}

Eigen::Matrix4cd od_update(const Eigen::Matrix4cd& u, const Eigen::Matrix4cd& f, double beta) {
  if (!(beta > 0.0) || beta > 1.0) throw InputError("od_update needs beta in (0, 1]");
  if ((u.adjoint() * u - Matrix4cd::Identity()).norm() > kUnitaryTol) {
    throw InputError("od_update needs a unitary block");
  }
  const Matrix4cd u_new = polar_unitary(f);
  return polar_unitary((1.0 - beta) * u + beta * u_new);
}

TranslationResult optimizing_decomposition(std::vector<UnitaryLayer> layers, const Mps& target,
                                           long long sweeps, double target_fidelity,
                                           double beta) {
  if (sweeps < 0) throw InputError("optimizing decomposition needs sweeps >= 0");
  if (!(target_fidelity > 0.0) || target_fidelity > 1.0) {
    throw InputError("target fidelity must lie in (0, 1]");
  }
  if (!(beta > 0.0) || beta > 1.0) throw InputError("learning rate must lie in (0, 1]");
  const int n = target.n;
  validate_layers(layers, n);

  TranslationResult res;
  res.variant = TranslateVariant::o_all;
  double fid = layers_fidelity(layers, target);
  res.fidelity_series.push_back(fid);
  const int total = layers.empty() ? 0 : block_count(layers, n);
  for (long long t = 0; t < sweeps && fid < target_fidelity; ++t) {
    for (int m = 0; m < total; ++m) {
      const Matrix4cd f = environment_tensor(layers, m, target);
      Matrix4cd& u = block_at(layers, n, m);
      u = od_update(u, f, beta);
      // Tr[U^dag F] is the fidelity amplitude of the updated circuit.
      fid = std::norm((u.adjoint() * f).trace());
      res.fidelity_series.push_back(fid);
    }
  }
  res.layers = std::move(layers);
  res.fidelity = fid;
  return res;
}

TranslateReport translate(const Mps& target, const TranslateConfig& cfg) {
  if (cfg.layers < 1) throw InputError("translate needs at least one layer");
  if (cfg.od_iterations < 0) throw InputError("translate needs od_iterations >= 0");
  const int n = target.n;
  if (n < 2) throw InputError("translate needs at least two qubits");
  const int per_pass = cfg.layers * (n - 1);
  const long long sweeps = (cfg.od_iterations + per_pass - 1) / per_pass;

  auto run_d = [&] {
    TranslationResult r = analytic_decomposition(target, cfg.layers, cfg.target_fidelity);
    r.variant = TranslateVariant::d_all;
    return r;
  };
  auto run_o = [&] {
    TranslationResult r =
        optimizing_decomposition(random_layers(n, cfg.layers, cfg.seed), target, sweeps,
                                 cfg.target_fidelity, cfg.beta);
    r.variant = TranslateVariant::o_all;
    return r;
  };
  auto run_do = [&] {
    TranslationResult warm = analytic_decomposition(target, cfg.layers, cfg.target_fidelity);
    TranslationResult r = optimizing_decomposition(std::move(warm.layers), target, sweeps,
                                                   cfg.target_fidelity, cfg.beta);
    r.variant = TranslateVariant::d_all_o_all;
    return r;
  };

  TranslationResult d_res, o_res, do_res;
  if (cfg.parallel) {
    auto fo = std::async(std::launch::async, run_o);
    auto fdo = std::async(std::launch::async, run_do);
    d_res = run_d();
    o_res = fo.get();
    do_res = fdo.get();
  } else {
    d_res = run_d();
    o_res = run_o();
    do_res = run_do();
  }

  TranslateReport rep;
  rep.variant_fidelity = {d_res.fidelity, o_res.fidelity, do_res.fidelity};
  rep.best = std::move(d_res);
  if (o_res.fidelity > rep.best.fidelity) rep.best = std::move(o_res);
  if (do_res.fidelity > rep.best.fidelity) rep.best = std::move(do_res);
  return rep;
}

TranslatedCircuit layers_to_param_circuit(const std::vector<UnitaryLayer>& layers, int n) {
  validate_layers(layers, n);
  TranslatedCircuit out;
  out.circuit = ParamCircuit(n);
  out.params.resize(15 * static_cast<Eigen::Index>(layers.size()) * (n - 1));
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    for (int j = 0; j + 1 < n; ++j) {
      const int p0 = out.circuit.add_kak(j, j + 1);
      out.params.segment(p0, 15) = kak_decompose(it->blocks[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace dualvqe
