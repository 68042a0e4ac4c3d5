#include "dualvqe/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dualvqe/errors.hpp"

namespace dualvqe {

Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& p, double delta, std::mt19937_64& rng) {
  if (delta <= 0.0) throw InputError("spsa_gradient: delta must be positive");
  if (p.size() == 0) throw InputError("spsa_gradient: empty parameter vector");
  Eigen::VectorXd dir(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) dir(i) = (rng() & 1ull) ? 1.0 : -1.0;
  const double fp = f(p + delta * dir);
  const double fm = f(p - delta * dir);
  const double scale = (fp - fm) / (2.0 * delta);
  // Rademacher entries square to one, so dividing by dir_i is multiplying.
  return scale * dir;
}

Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& p, const SpsaConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Eigen::VectorXd g = spsa_gradient(f, p, cfg.delta, rng);
  return cfg.normalize ? normalize_gradient(std::move(g)) : g;
}

Eigen::VectorXd normalize_gradient(Eigen::VectorXd g) {
  const double n = g.norm();
  if (n > 1.0) g /= n;
  return g;
}

double least_squares_slope(const double* y, std::size_t len) {
  if (len < 2) throw InputError("least_squares_slope: need at least two points");
  const double m = static_cast<double>(len);
  const double xbar = (m - 1.0) / 2.0;
  double ybar = 0.0;
  for (std::size_t i = 0; i < len; ++i) ybar += y[i];
  ybar /= m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    num += dx * (y[i] - ybar);
    den += dx * dx;
  }
  return num / den;
}

ScheduleState lr_schedule_basic(ScheduleState s, const std::vector<double>& hist) {
  if (hist.size() < 301) return s;
  const std::size_t last = hist.size() - 1;
  const double v0 = hist[last];
  const double v1 = hist[last - 100];
  const double v2 = hist[last - 200];
  const double v3 = hist[last - 300];
  if (v0 < v1 && v1 < v2 && v2 < v3) {
    s.beta_omega = std::max(s.lr_floor, s.beta_omega / 2.0);
    s.beta_eta_nu = std::max(s.lr_floor, s.beta_eta_nu / 2.0);
  }
  return s;
}

ScheduleState lr_schedule_slope(ScheduleState s, const std::vector<double>& hist) {
  if (hist.size() < 200) return s;
  const double slope = least_squares_slope(hist.data() + hist.size() - 200, 200);
  if (slope < 0.0) {
    s.beta_omega = std::max(0.9 * s.beta_omega, s.beta_min);
    s.beta_eta_nu = std::max(0.9 * s.beta_eta_nu, s.eta_nu_factor * s.beta_min);
  } else if (slope > 0.0) {
    s.beta_omega = std::min(1.05 * s.beta_omega, s.beta_max);
    s.beta_eta_nu = std::min(1.02 * s.beta_eta_nu, s.eta_nu_factor * s.beta_max);
  }
  return s;
}

ScheduleState penalty_schedule(ScheduleState s, const std::vector<double>& hist) {
  if (hist.size() < 200) return s;
  const double slope = least_squares_slope(hist.data() + hist.size() - 200, 200);
  if (slope > s.penalty_slope_threshold)
    s.c = 0.9 * s.c;
  else if (slope >= 0.0)
    s.c = std::min(1.04 * s.c, s.c_max);
  return s;
}

std::vector<double> TrainingTrace::column_f() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.f);
  return v;
}

std::vector<double> TrainingTrace::column_penalty() const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.penalty);
  return v;
}

std::string TrainingTrace::to_csv() const {
  std::string out = kHeader;
  out += '\n';
  char buf[360];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu\n",
                  r.iteration, r.eta, r.nu, r.c, r.penalty, r.f, r.beta_omega, r.beta_eta_nu,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

TrainingTrace TrainingTrace::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw InputError("trace CSV: missing or unexpected header");
  TrainingTrace t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRow r;
    unsigned long long seed = 0;
    const int got = std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%llu", &r.iteration,
                                &r.eta, &r.nu, &r.c, &r.penalty, &r.f, &r.beta_omega,
                                &r.beta_eta_nu, &seed);
    if (got != 9) throw InputError("trace CSV: malformed row at line " + std::to_string(lineno));
    r.seed = seed;
    t.rows.push_back(r);
  }
  return t;
}

TrainingTrace TrainingTrace::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open trace file '" + path + "'");
  return from_csv(f);
}

void TrainingTrace::save(const std::string& path) const {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw InputError("cannot write trace file '" + path + "'");
  f << to_csv();
}

DualTrainOptions DualTrainOptions::basic_defaults() {
  DualTrainOptions o;
  o.schedule = ScheduleKind::basic;
  o.eta_nu_gradient = EtaNuGradientKind::joint_spsa;
  o.adapt_c = false;
  return o;
}

DualTrainOptions DualTrainOptions::slope_defaults() {
  DualTrainOptions o;
  o.schedule = ScheduleKind::slope;
  o.eta_nu_gradient = EtaNuGradientKind::finite_difference;
  o.adapt_c = true;
  o.iterations = 25000;
  return o;
}

Eigen::VectorXd random_angles(int count, std::mt19937_64& rng) {
  Eigen::VectorXd v(count);
  for (int i = 0; i < count; ++i)
    v(i) = 2.0 * std::numbers::pi * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  return v;
}

namespace {

ScheduleState make_schedule_state(const DualTrainOptions& opt, double c_init) {
  ScheduleState s;
  if (opt.schedule == ScheduleKind::basic) {
    s.beta_omega = opt.lr;
    s.beta_eta_nu = opt.lr;
  } else {
    s.beta_omega = opt.beta_omega;
    s.beta_eta_nu = opt.beta_eta_nu;
  }
  s.c = c_init;
  s.lr_floor = opt.lr_floor;
  s.beta_min = opt.beta_min;
  s.beta_max = opt.beta_max;
  s.eta_nu_factor = opt.eta_nu_factor;
  s.c_max = opt.c_max;
  s.penalty_slope_threshold = opt.penalty_slope_threshold;
  return s;
}

}  // namespace

DualTrainResult train_dual_vqe(const PauliHamiltonian& h, const MixedAnsatz& ansatz,
                               const DualPoint& init, const DualTrainOptions& opt, ShotModel shot,
                               std::uint64_t seed) {
  if (opt.iterations < 0) throw InputError("train_dual_vqe: negative iteration count");
  if (init.params.size() != param_count(ansatz))
    throw InputError("train_dual_vqe: expected " + std::to_string(param_count(ansatz)) +
                     " ansatz parameters, got " + std::to_string(init.params.size()));
  if (init.nu < 0.0) throw InputError("train_dual_vqe: initial nu must be >= 0");

  const HamiltonianMoments moments = HamiltonianMoments::of(h);
  std::mt19937_64 rng(seed);

  double eta = init.eta;
  double nu = init.nu;
  Eigen::VectorXd theta = init.params;
  ScheduleState sched = make_schedule_state(opt, init.c);

  DualTrainResult out;
  out.trace.rows.reserve(static_cast<std::size_t>(opt.iterations) + 1);
  std::vector<double> f_hist, p_hist;
  f_hist.reserve(static_cast<std::size_t>(opt.iterations) + 1);
  p_hist.reserve(static_cast<std::size_t>(opt.iterations) + 1);

  const auto eval_f = [&](double e, double n_, const Eigen::VectorXd& th) {
    const double ex = estimate_expectation(h, ansatz, th, shot);
    const double pu = estimate_purity(ansatz, th, shot);
    return penalty_breakdown(moments, e, n_, ex, pu, sched.c);
  };

  for (long long t = 0;; ++t) {
    const ObjectiveBreakdown b = eval_f(eta, nu, theta);
    out.trace.rows.push_back({t, eta, nu, sched.c, b.penalty, b.f, sched.beta_omega,
                              sched.beta_eta_nu, seed});
    f_hist.push_back(b.f);
    p_hist.push_back(b.penalty);
    if (!std::isfinite(b.f)) {
      out.aborted = true;
      break;
    }
    if (t == opt.iterations) break;

    Eigen::VectorXd g;
    if (opt.eta_nu_gradient == EtaNuGradientKind::joint_spsa) {
      Eigen::VectorXd p(theta.size() + 2);
      p(0) = eta;
      p(1) = nu;
      p.tail(theta.size()) = theta;
      const auto fn = [&](const Eigen::VectorXd& v) {
        return eval_f(v(0), v(1), v.tail(v.size() - 2)).f;
      };
      g = spsa_gradient(fn, p, opt.spsa_delta, rng);
    } else {
      // Ansatz gradient by SPSA; eta and nu by central differences on the
      // closed-form penalty, reusing this iteration's estimates (exact in
      // (eta, nu) given them, so consistent under shot noise).
      const auto fn = [&](const Eigen::VectorXd& th) { return eval_f(eta, nu, th).f; };
      const Eigen::VectorXd gt = spsa_gradient(fn, theta, opt.spsa_delta, rng);
      const double hstep = opt.fd_step;
      const auto fd = [&](double ep, double np) {
        return penalty_breakdown(moments, ep, np, b.expect_h, b.purity, sched.c).f;
      };
      g.resize(theta.size() + 2);
      g(0) = (fd(eta + hstep, nu) - fd(eta - hstep, nu)) / (2.0 * hstep);
      g(1) = (fd(eta, nu + hstep) - fd(eta, nu - hstep)) / (2.0 * hstep);
      g.tail(theta.size()) = gt;
    }
    if (opt.normalize) g = normalize_gradient(std::move(g));

    eta += sched.beta_eta_nu * g(0);
    nu = std::max(0.0, nu + sched.beta_eta_nu * g(1));
    theta += sched.beta_omega * g.tail(theta.size());

    const long long done = t + 1;
    if (opt.schedule == ScheduleKind::basic) {
      if (done % 100 == 0) sched = lr_schedule_basic(sched, f_hist);
    } else {
      if (done % 200 == 0) {
        sched = lr_schedule_slope(sched, f_hist);
        if (opt.adapt_c) sched = penalty_schedule(sched, p_hist);
      }
    }
  }

  out.final_point.eta = eta;
  out.final_point.nu = nu;
  out.final_point.params = std::move(theta);
  out.final_point.c = sched.c;
  return out;
}

VqeTrainResult train_vqe(const PauliHamiltonian& h, const ParamCircuit& circuit,
                         const Eigen::VectorXd& theta0, long long iterations, double lr,
                         const SpsaConfig& spsa, ShotModel shot, std::uint64_t seed) {
  if (iterations < 0) throw InputError("train_vqe: negative iteration count");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd theta = theta0;
  VqeTrainResult out;
  out.trace.rows.reserve(static_cast<std::size_t>(iterations) + 1);

  for (long long t = 0;; ++t) {
    const double energy = vqe_objective(h, circuit, theta, shot);
    out.trace.rows.push_back({t, 0.0, 0.0, 0.0, 0.0, energy, lr, 0.0, seed});
    if (!std::isfinite(energy)) {
      out.aborted = true;
      break;
    }
    if (t == iterations) break;
    const auto fn = [&](const Eigen::VectorXd& th) { return vqe_objective(h, circuit, th, shot); };
    Eigen::VectorXd g = spsa_gradient(fn, theta, spsa.delta, rng);
    if (spsa.normalize) g = normalize_gradient(std::move(g));
    theta -= lr * g;
  }

  out.theta = std::move(theta);
  out.energy = out.trace.rows.back().f;
  return out;
}

}  // namespace dualvqe
