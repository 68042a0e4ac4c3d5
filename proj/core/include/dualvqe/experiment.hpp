#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "dualvqe/mps.hpp"
#include "dualvqe/optimizer.hpp"
#include "dualvqe/translate.hpp"

namespace dualvqe {

enum class ExperimentKind { vqe, dual_vqe, pretrain, translate, pipeline, oracle };

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& name);  // throws InputError

// Flat key=value run description ('#' comments). Every key has a pinned
// default, so echo() always lists the full effective configuration and
// parse(echo()) round-trips. Unknown and duplicate keys are input errors.
struct RunConfig {
  ExperimentKind kind = ExperimentKind::oracle;

  // Hamiltonian: built-in open-chain transverse-field Ising model when
  // qubits > 0 (couplings = coupling, fields = field), otherwise a text file
  // in the `<coeff> <letters>` format. Exactly one source must be given.
  int qubits = 0;
  double coupling = 1.0;
  double field = 1.0;
  std::string hamiltonian_file;

  // Mixed-state ansatz ("purification" or "convex"); `layers` is the
  // purification / VQE-circuit / convex-unitary depth.
  std::string ansatz = "purification";
  PurificationLayerKind layer_kind = PurificationLayerKind::rotation;
  int layers = 3;
  int born_layers = 2;
  int n_ref = 0;  // purification reference register; 0 selects the system size

  long long shots = 0;  // 0 runs exact expectations
  long long purity_shots = 0;

  long long iterations = 20000;
  ScheduleKind schedule = ScheduleKind::basic;
  double c = 10.0;
  double lr = 0.1;       // dual-VQE basic-schedule start rate
  double vqe_lr = 0.005;  // plain VQE fixed rate
  double spsa_delta = 0.05;
  double beta_omega = 3e-3;   // slope-schedule circuit rate
  double beta_eta_nu = 1e-3;  // slope-schedule eta/nu rate

  int chi_max = 8;
  long long pretrain_iterations = 2000;
  double pretrain_c = 30.0;
  double pretrain_lr = 0.15;

  int translate_layers = 3;
  long long od_iterations = 2000;
  double od_beta = 0.2;
  double target_fidelity = 0.999;
  std::string mps_file;  // translate kind: checkpoint target instead of pretraining

  int appended_layers = 1;  // identity-initialized layers added before quantum training

  std::vector<std::uint64_t> seeds;  // explicit; required for every kind but oracle
  std::string output_dir;            // required for every kind but oracle
  int threads = 0;                   // max seeds in flight; 0 = hardware concurrency

  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::string& path);
  std::string echo() const;  // canonical key=value form, embedded in the manifest
  void validate() const;     // structural checks + referenced files exist
};

// Per-iteration quartiles across one homogeneous trace set; plot-ready.
struct SummarySeries {
  std::vector<long long> iteration;
  std::vector<double> median, q1, q3;

  static constexpr const char* kHeader = "iteration,median,q1,q3";
  std::string to_csv() const;
};

// Linear-interpolation quantile of an unsorted sample (the common "type 7"
// convention: index (n-1)p between order statistics).
double quantile(std::vector<double> values, double p);

struct TraceGroupSummary {
  std::string name;  // vqe | dual | pretrain
  std::vector<std::uint64_t> seeds;
  std::vector<double> finals;  // last f per trace, seed order
  double final_median = std::numeric_limits<double>::quiet_NaN();
  double final_q1 = std::numeric_limits<double>::quiet_NaN();
  double final_q3 = std::numeric_limits<double>::quiet_NaN();
  // |final_median - oracle| / |oracle|; NaN without an oracle value.
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  SummarySeries series;
};

// Quartile series and final-value statistics for one trace set. Traces of
// differing lengths are truncated to the shortest with a note in *warnings.
TraceGroupSummary summarize_traces(const std::string& name,
                                   const std::vector<TrainingTrace>& traces, double oracle_value,
                                   std::vector<std::string>* warnings = nullptr);

struct TranslationOutcome {
  std::uint64_t seed = 0;
  TranslateVariant variant = TranslateVariant::d_all;  // highest-fidelity variant
  double fidelity = 0.0;
  std::array<double, 3> variant_fidelity{};  // indexed by TranslateVariant
};

struct SummaryReport {
  double oracle_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<TraceGroupSummary> groups;  // sorted by name
  std::vector<TranslationOutcome> translations;
  std::vector<std::string> warnings;
  // Medians of the per-seed final values; gap = vqe_final - dual_final.
  double vqe_final = std::numeric_limits<double>::quiet_NaN();
  double dual_final = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();

  const TraceGroupSummary* group(const std::string& name) const;
  std::string to_json() const;
};

// Rebuilds the report from the files in dir (trace_<group>_seed<k>.csv,
// translate_<variant>_seed<k>.csv, manifest_<kind>.json for the oracle value)
// and rewrites summary.json plus one summary_<group>.csv per trace group.
SummaryReport summarize_directory(const std::string& dir);

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericAbort = 3;

struct RunOutcome {
  int exit_code = kExitSuccess;  // numeric aborts flush partial traces and return 3
  std::vector<std::string> files;  // names written under output_dir, this run only
  SummaryReport summary;
  std::string message;  // one-line outcome for the CLI
};

// Executes the configured experiment: one task per seed (fanned out across
// threads), per-seed CSV/checkpoint files, a manifest, and a summary refresh.
// Configuration problems throw InputError; numeric failures return exit 3.
RunOutcome run(const RunConfig& cfg);

}  // namespace dualvqe
