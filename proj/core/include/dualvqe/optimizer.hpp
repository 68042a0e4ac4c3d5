#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dualvqe/objective.hpp"

namespace dualvqe {

struct SpsaConfig {
  double delta = 0.05;     // simultaneous perturbation size
  std::uint64_t seed = 0;  // used by the one-shot overload
  bool normalize = true;   // rescale gradients with norm > 1 to unit norm
};

// Two-evaluation simultaneous-perturbation gradient estimate with a
// Rademacher direction drawn from rng.
Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& p, double delta, std::mt19937_64& rng);
Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& p, const SpsaConfig& cfg);

Eigen::VectorXd normalize_gradient(Eigen::VectorXd g);

// Learning rates and penalty weight evolving during training.
struct ScheduleState {
  double beta_omega = 0.1;   // rate for ansatz parameters
  double beta_eta_nu = 0.1;  // rate for eta and nu
  double c = 10.0;

  double lr_floor = 0.01;      // basic schedule: halving floor
  double beta_min = 1e-4;      // slope schedule bounds for beta_omega
  double beta_max = 1e-3;
  double eta_nu_factor = 3.0;  // beta_eta_nu bounds = factor * (beta_min, beta_max)
  double c_max = 40.0;
  double penalty_slope_threshold = 5e-4;
};

// Ordinary least-squares slope of y against 0..len-1.
double least_squares_slope(const double* y, std::size_t len);

// Checked every 100 iterations: if the objective decreased at three
// consecutive checks spanning the past 300 iterations, halve both rates
// (not below lr_floor). History holds one objective value per iteration.
ScheduleState lr_schedule_basic(ScheduleState s, const std::vector<double>& objective_history);

// Checked every 200 iterations: regression slope of the last 200 objective
// values; negative -> shrink rates by 0.9 (floors beta_min / factor*beta_min),
// positive -> grow by 1.05 and 1.02 (caps beta_max / factor*beta_max).
ScheduleState lr_schedule_slope(ScheduleState s, const std::vector<double>& objective_history);

// Checked every 200 iterations on the penalty series: slope above the
// threshold -> c *= 0.9; slope in [0, threshold] -> c = min(1.04 c, c_max).
ScheduleState penalty_schedule(ScheduleState s, const std::vector<double>& penalty_history);

struct TraceRow {
  long long iteration;
  double eta, nu, c, penalty, f, beta_omega, beta_eta_nu;
  std::uint64_t seed;
};

struct TrainingTrace {
  static constexpr const char* kHeader = "iteration,eta,nu,c,penalty,f,beta_omega,beta_eta_nu,seed";

  std::vector<TraceRow> rows;

  std::vector<double> column_f() const;
  std::vector<double> column_penalty() const;
  std::string to_csv() const;
  static TrainingTrace from_csv(std::istream& in);
  static TrainingTrace load(const std::string& path);
  void save(const std::string& path) const;
};

enum class ScheduleKind { basic, slope };
enum class EtaNuGradientKind { joint_spsa, finite_difference };

struct DualTrainOptions {
  ScheduleKind schedule = ScheduleKind::basic;
  long long iterations = 20000;

  double lr = 0.1;  // basic protocol: shared initial rate, halved on stalls
  double lr_floor = 0.01;

  double beta_omega = 3e-3;  // slope protocol initial rates
  double beta_eta_nu = 1e-3;
  double beta_min = 1e-4;
  double beta_max = 1e-3;
  double eta_nu_factor = 3.0;
  double c_max = 40.0;
  double penalty_slope_threshold = 5e-4;
  bool adapt_c = false;  // slope protocol: penalty-driven c control

  double spsa_delta = 0.05;
  bool normalize = true;
  EtaNuGradientKind eta_nu_gradient = EtaNuGradientKind::joint_spsa;
  double fd_step = 1e-6;

  static DualTrainOptions basic_defaults();
  static DualTrainOptions slope_defaults();
};

struct DualTrainResult {
  TrainingTrace trace;
  DualPoint final_point;
  bool aborted = false;  // non-finite objective encountered; trace holds rows so far
};

DualTrainResult train_dual_vqe(const PauliHamiltonian& h, const MixedAnsatz& ansatz,
                               const DualPoint& init, const DualTrainOptions& opt, ShotModel shot,
                               std::uint64_t seed);

struct VqeTrainResult {
  TrainingTrace trace;
  Eigen::VectorXd theta;
  double energy = 0.0;
  bool aborted = false;
};

VqeTrainResult train_vqe(const PauliHamiltonian& h, const ParamCircuit& circuit,
                         const Eigen::VectorXd& theta0, long long iterations, double lr,
                         const SpsaConfig& spsa, ShotModel shot, std::uint64_t seed);

// theta ~ U[0, 2 pi) per entry, the standard cold start for circuit parameters.
Eigen::VectorXd random_angles(int count, std::mt19937_64& rng);

}  // namespace dualvqe
