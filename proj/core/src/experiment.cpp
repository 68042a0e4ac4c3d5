#include "dualvqe/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <regex>
#include <sstream>
#include <thread>
#include <utility>

#include "json.hpp"

#include "dualvqe/errors.hpp"
#include "dualvqe/version.hpp"

namespace dualvqe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Auxiliary seed stream (initial angles, shot noise) derived from the run
// seed so it never aliases the optimizer's mt19937_64(seed) stream.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

long long int_value(const std::string& key, const std::string& value) {
  long long v = 0;
  const char* b = value.data();
  const char* e = b + value.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e)
    throw InputError("config key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

double double_value(const std::string& key, const std::string& value) {
  try {
    std::size_t idx = 0;
    const double v = std::stod(value, &idx);
    if (idx == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("config key '" + key + "': expected a number, got '" + value + "'");
}

std::vector<std::uint64_t> seeds_value(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string tok =
        trim(value.substr(start, comma == std::string::npos ? comma : comma - start));
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size())
      throw InputError("config key 'seeds': expected comma-separated nonnegative integers, got '" +
                       value + "'");
    seeds.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

const char* schedule_name(ScheduleKind k) {
  return k == ScheduleKind::basic ? "basic" : "slope";
}

ScheduleKind schedule_value(const std::string& value) {
  if (value == "basic") return ScheduleKind::basic;
  if (value == "slope") return ScheduleKind::slope;
  throw InputError("config key 'schedule': expected basic or slope, got '" + value + "'");
}

const char* layer_kind_name(PurificationLayerKind k) {
  return k == PurificationLayerKind::rotation ? "rotation" : "kak";
}

PurificationLayerKind layer_kind_value(const std::string& value) {
  if (value == "rotation") return PurificationLayerKind::rotation;
  if (value == "kak") return PurificationLayerKind::kak;
  throw InputError("config key 'layer_kind': expected rotation or kak, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

// Every key with its effective value, in the documented order; empty-valued
// optional keys are omitted so parse(echo()) round-trips.
std::vector<std::pair<std::string, std::string>> config_pairs(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto add = [&kv](const char* k, std::string v) { kv.emplace_back(k, std::move(v)); };
  add("kind", experiment_kind_name(c.kind));
  if (c.qubits != 0) add("qubits", std::to_string(c.qubits));
  add("coupling", format_double(c.coupling));
  add("field", format_double(c.field));
  if (!c.hamiltonian_file.empty()) add("hamiltonian", c.hamiltonian_file);
  add("ansatz", c.ansatz);
  add("layer_kind", layer_kind_name(c.layer_kind));
  add("layers", std::to_string(c.layers));
  add("born_layers", std::to_string(c.born_layers));
  add("n_ref", std::to_string(c.n_ref));
  add("shots", std::to_string(c.shots));
  add("purity_shots", std::to_string(c.purity_shots));
  add("iterations", std::to_string(c.iterations));
  add("schedule", schedule_name(c.schedule));
  add("c", format_double(c.c));
  add("lr", format_double(c.lr));
  add("vqe_lr", format_double(c.vqe_lr));
  add("spsa_delta", format_double(c.spsa_delta));
  add("beta_omega", format_double(c.beta_omega));
  add("beta_eta_nu", format_double(c.beta_eta_nu));
  add("chi_max", std::to_string(c.chi_max));
  add("pretrain_iterations", std::to_string(c.pretrain_iterations));
  add("pretrain_c", format_double(c.pretrain_c));
  add("pretrain_lr", format_double(c.pretrain_lr));
  add("translate_layers", std::to_string(c.translate_layers));
  add("od_iterations", std::to_string(c.od_iterations));
  add("od_beta", format_double(c.od_beta));
  add("target_fidelity", format_double(c.target_fidelity));
  if (!c.mps_file.empty()) add("mps_file", c.mps_file);
  add("appended_layers", std::to_string(c.appended_layers));
  if (!c.seeds.empty()) add("seeds", format_seeds(c.seeds));
  if (!c.output_dir.empty()) add("output_dir", c.output_dir);
  add("threads", std::to_string(c.threads));
  return kv;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << body;
}

std::string seed_file(const std::string& stem, std::uint64_t seed, const char* ext) {
  return stem + "_seed" + std::to_string(seed) + "." + ext;
}

const char* variant_stem(TranslateVariant v) {
  switch (v) {
    case TranslateVariant::d_all: return "d_all";
    case TranslateVariant::o_all: return "o_all";
    case TranslateVariant::d_all_o_all: return "d_all_o_all";
  }
  throw InputError("unknown translate variant");
}

std::string fidelity_csv(const std::vector<double>& series) {
  std::string out = "iteration,fidelity\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(i), series[i]);
    out += buf;
  }
  return out;
}

PauliHamiltonian make_hamiltonian(const RunConfig& cfg) {
  if (cfg.qubits != 0) return transverse_field_ising(cfg.qubits, cfg.coupling, cfg.field);
  return load_hamiltonian(cfg.hamiltonian_file);
}

ShotModel make_shot(const RunConfig& cfg, std::uint64_t shot_seed) {
  if (cfg.shots > 0) return ShotModel::sampled(cfg.shots, shot_seed, cfg.purity_shots);
  return ShotModel::exact();
}

ParamCircuit vqe_circuit(int n, int layers, PurificationLayerKind kind) {
  ParamCircuit c(n);
  for (int l = 0; l < layers; ++l) {
    if (kind == PurificationLayerKind::rotation) {
      for (int q = 0; q < n; ++q) c.add_rotation(Axis::Y, q);
      for (int q = 0; q < n; ++q) c.add_rotation(Axis::Z, q);
      for (int q = 0; q + 1 < n; ++q) c.add_cnot(q, q + 1);
    } else {
      for (int q = 0; q + 1 < n; ++q) c.add_kak(q, q + 1);
    }
  }
  return c;
}

MixedAnsatz make_mixed_ansatz(const RunConfig& cfg, int n) {
  if (cfg.ansatz == "purification") {
    const int n_ref = cfg.n_ref > 0 ? cfg.n_ref : n;
    return PurificationAnsatz::make(n_ref, n, cfg.layers, cfg.layer_kind);
  }
  return ConvexCombinationAnsatz::make(n, cfg.born_layers, cfg.layers);
}

DualTrainOptions make_dual_options(const RunConfig& cfg) {
  DualTrainOptions opt = cfg.schedule == ScheduleKind::basic ? DualTrainOptions::basic_defaults()
                                                             : DualTrainOptions::slope_defaults();
  opt.iterations = cfg.iterations;
  opt.lr = cfg.lr;
  opt.spsa_delta = cfg.spsa_delta;
  opt.beta_omega = cfg.beta_omega;
  opt.beta_eta_nu = cfg.beta_eta_nu;
  return opt;
}

struct SeedOutcome {
  std::vector<std::string> files;
  bool aborted = false;
  std::string error;  // nonempty when the seed died on a NumericError
  bool has_translation = false;
  TranslationOutcome translation;
};

void run_vqe_seed(const RunConfig& cfg, const PauliHamiltonian& h, std::uint64_t seed,
                  const fs::path& dir, SeedOutcome& out) {
  const ParamCircuit circ = vqe_circuit(h.num_qubits(), cfg.layers, cfg.layer_kind);
  std::uint64_t aux = seed;
  std::mt19937_64 theta_rng(splitmix64(aux));
  const std::uint64_t shot_seed = splitmix64(aux);
  const Eigen::VectorXd theta0 = random_angles(circ.param_count, theta_rng);
  SpsaConfig spsa;
  spsa.delta = cfg.spsa_delta;
  const VqeTrainResult r = train_vqe(h, circ, theta0, cfg.iterations, cfg.vqe_lr, spsa,
                                     make_shot(cfg, shot_seed), seed);
  const std::string name = seed_file("trace_vqe", seed, "csv");
  r.trace.save((dir / name).string());
  out.files.push_back(name);
  out.aborted = r.aborted;
}

void run_dual_seed(const RunConfig& cfg, const PauliHamiltonian& h, const MixedAnsatz& ansatz,
                   DualPoint init, std::uint64_t seed, const fs::path& dir, SeedOutcome& out) {
  std::uint64_t aux = seed;
  std::mt19937_64 theta_rng(splitmix64(aux));
  const std::uint64_t shot_seed = splitmix64(aux);
  if (init.params.size() == 0) init.params = random_angles(param_count(ansatz), theta_rng);
  const DualTrainResult r =
      train_dual_vqe(h, ansatz, init, make_dual_options(cfg), make_shot(cfg, shot_seed), seed);
  const std::string name = seed_file("trace_dual", seed, "csv");
  r.trace.save((dir / name).string());
  out.files.push_back(name);
  out.aborted = r.aborted;
}

PretrainResult run_pretrain_stage(const RunConfig& cfg, const PauliHamiltonian& h,
                                  std::uint64_t seed, const fs::path& dir, SeedOutcome& out) {
  Partition part;
  part.n_sys = h.num_qubits();
  part.n_ref = cfg.n_ref > 0 ? cfg.n_ref : part.n_sys;
  PretrainOptions opt;
  opt.c = cfg.pretrain_c;
  opt.iterations = cfg.pretrain_iterations;
  opt.lr = cfg.pretrain_lr;
  opt.seed = seed;
  PretrainResult r = pretrain_mps(h, part, cfg.chi_max, opt);
  const std::string trace_name = seed_file("trace_pretrain", seed, "csv");
  r.trace.save((dir / trace_name).string());
  out.files.push_back(trace_name);
  if (!r.aborted) {
    const std::string mps_name = seed_file("mps", seed, "mps");
    save_mps(r.mps, (dir / mps_name).string());
    out.files.push_back(mps_name);
  }
  out.aborted = r.aborted;
  return r;
}

// The three decomposition variants share one analytic pass (it is
// deterministic), matching translate()'s accounting and tie-break exactly.
std::vector<UnitaryLayer> run_translate_stage(const RunConfig& cfg, const Mps& target,
                                              std::uint64_t seed, const fs::path& dir,
                                              SeedOutcome& out) {
  const int n = target.n;
  if (n < 2) throw InputError("translation needs at least two qubits");
  const long long per_pass = static_cast<long long>(cfg.translate_layers) * (n - 1);
  const long long sweeps = (cfg.od_iterations + per_pass - 1) / per_pass;

  TranslationResult d = analytic_decomposition(target, cfg.translate_layers, cfg.target_fidelity);
  d.variant = TranslateVariant::d_all;
  TranslationResult o =
      optimizing_decomposition(random_layers(n, cfg.translate_layers, seed), target, sweeps,
                               cfg.target_fidelity, cfg.od_beta);
  o.variant = TranslateVariant::o_all;
  TranslationResult dod =
      optimizing_decomposition(d.layers, target, sweeps, cfg.target_fidelity, cfg.od_beta);
  dod.variant = TranslateVariant::d_all_o_all;

  for (const TranslationResult* r : {&d, &o, &dod}) {
    const std::string name = seed_file(std::string("translate_") + variant_stem(r->variant), seed,
                                       "csv");
    write_file(dir / name, fidelity_csv(r->fidelity_series));
    out.files.push_back(name);
  }

  const TranslationResult* best = &d;
  if (o.fidelity > best->fidelity) best = &o;
  if (dod.fidelity > best->fidelity) best = &dod;
  out.has_translation = true;
  out.translation.seed = seed;
  out.translation.variant = best->variant;
  out.translation.fidelity = best->fidelity;
  out.translation.variant_fidelity = {d.fidelity, o.fidelity, dod.fidelity};
  return best->layers;
}

void run_pretrain_seed(const RunConfig& cfg, const PauliHamiltonian& h, std::uint64_t seed,
                       const fs::path& dir, SeedOutcome& out) {
  run_pretrain_stage(cfg, h, seed, dir, out);
}

void run_translate_seed(const RunConfig& cfg, const PauliHamiltonian& h, std::uint64_t seed,
                        const fs::path& dir, SeedOutcome& out) {
  Mps target;
  if (!cfg.mps_file.empty()) {
    target = load_mps(cfg.mps_file);
  } else {
    const PretrainResult pre = run_pretrain_stage(cfg, h, seed, dir, out);
    if (pre.aborted) return;
    target = pre.mps;
  }
  run_translate_stage(cfg, target, seed, dir, out);
}

void run_pipeline_seed(const RunConfig& cfg, const PauliHamiltonian& h, std::uint64_t seed,
                       const fs::path& dir, SeedOutcome& out) {
  const PretrainResult pre = run_pretrain_stage(cfg, h, seed, dir, out);
  if (pre.aborted) return;
  const std::vector<UnitaryLayer> best = run_translate_stage(cfg, pre.mps, seed, dir, out);

  const int total = pre.mps.n;
  const TranslatedCircuit tc = layers_to_param_circuit(best, total);
  PurificationAnsatz pa;
  pa.n_sys = h.num_qubits();
  pa.n_ref = total - pa.n_sys;
  pa.layers = static_cast<int>(best.size()) + cfg.appended_layers;
  pa.kind = PurificationLayerKind::kak;
  pa.circuit = tc.circuit;
  // Appended layers start as identities: every gate block is a KAK gate at
  // parameter zero, so only the pretrained portion shapes the initial state.
  for (int l = 0; l < cfg.appended_layers; ++l)
    for (int q = 0; q + 1 < total; ++q) pa.circuit.add_kak(q, q + 1);

  DualPoint init;
  init.eta = pre.eta;
  init.nu = pre.nu;
  init.c = cfg.c;
  init.params = Eigen::VectorXd::Zero(pa.circuit.param_count);
  init.params.head(tc.params.size()) = tc.params;
  run_dual_seed(cfg, h, pa, init, seed, dir, out);
}

SeedOutcome run_seed(const RunConfig& cfg, const PauliHamiltonian& h, std::uint64_t seed,
                     const fs::path& dir) {
  SeedOutcome out;
  try {
    switch (cfg.kind) {
      case ExperimentKind::vqe: run_vqe_seed(cfg, h, seed, dir, out); break;
      case ExperimentKind::dual_vqe:
        run_dual_seed(cfg, h, make_mixed_ansatz(cfg, h.num_qubits()), DualPoint{0.0, 1.0, {}, cfg.c},
                      seed, dir, out);
        break;
      case ExperimentKind::pretrain: run_pretrain_seed(cfg, h, seed, dir, out); break;
      case ExperimentKind::translate: run_translate_seed(cfg, h, seed, dir, out); break;
      case ExperimentKind::pipeline: run_pipeline_seed(cfg, h, seed, dir, out); break;
      case ExperimentKind::oracle: break;
    }
  } catch (const NumericError& e) {
    out.error = e.what();
  }
  return out;
}

json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

void write_manifest(const RunConfig& cfg, double oracle, const fs::path& dir, RunOutcome& out) {
  json m;
  m["version"] = kVersion;
  m["kind"] = experiment_kind_name(cfg.kind);
  m["oracle"] = json_number(oracle);
  json echo = json::object();
  for (const auto& [k, v] : config_pairs(cfg)) echo[k] = v;
  m["config"] = echo;
  const std::string name = std::string("manifest_") + experiment_kind_name(cfg.kind) + ".json";
  write_file(dir / name, m.dump(2) + "\n");
  out.files.push_back(name);
}

double last_series_value(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || line != "iteration,fidelity")
    throw InputError("fidelity CSV '" + path.string() + "': missing or unexpected header");
  double last = kNan;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    long long it = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%lld,%lf", &it, &v) != 2)
      throw InputError("fidelity CSV '" + path.string() + "': malformed row '" + line + "'");
    last = v;
  }
  return last;
}

std::string compose_message(const RunConfig& cfg, const SummaryReport& rep) {
  std::string msg = experiment_kind_name(cfg.kind);
  msg += ": " + std::to_string(cfg.seeds.size()) + (cfg.seeds.size() == 1 ? " seed" : " seeds");
  const char* group = nullptr;
  switch (cfg.kind) {
    case ExperimentKind::vqe: group = "vqe"; break;
    case ExperimentKind::dual_vqe:
    case ExperimentKind::pipeline: group = "dual"; break;
    case ExperimentKind::pretrain: group = "pretrain"; break;
    default: break;
  }
  char buf[96];
  if (group != nullptr) {
    if (const TraceGroupSummary* g = rep.group(group)) {
      std::snprintf(buf, sizeof(buf), ", final median f = %.6g", g->final_median);
      msg += buf;
      if (std::isfinite(g->relative_error)) {
        std::snprintf(buf, sizeof(buf), " (relative error %.3g%% vs oracle %.6g)",
                      100.0 * g->relative_error, rep.oracle_value);
        msg += buf;
      }
    }
  }
  if (!rep.translations.empty()) {
    std::vector<double> fids;
    fids.reserve(rep.translations.size());
    for (const TranslationOutcome& t : rep.translations) fids.push_back(t.fidelity);
    std::snprintf(buf, sizeof(buf), ", median translation fidelity = %.6g",
                  quantile(std::move(fids), 0.5));
    msg += buf;
  }
  return msg;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::vqe: return "vqe";
    case ExperimentKind::dual_vqe: return "dual-vqe";
    case ExperimentKind::pretrain: return "pretrain";
    case ExperimentKind::translate: return "translate";
    case ExperimentKind::pipeline: return "pipeline";
    case ExperimentKind::oracle: return "oracle";
  }
  throw InputError("unknown experiment kind");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "vqe") return ExperimentKind::vqe;
  if (name == "dual-vqe") return ExperimentKind::dual_vqe;
  if (name == "pretrain") return ExperimentKind::pretrain;
  if (name == "translate") return ExperimentKind::translate;
  if (name == "pipeline") return ExperimentKind::pipeline;
  if (name == "oracle") return ExperimentKind::oracle;
  throw InputError("unknown experiment kind '" + name +
                   "' (expected vqe, dual-vqe, pretrain, translate, pipeline, or oracle)");
}

RunConfig RunConfig::parse(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw InputError("config line " + std::to_string(lineno) + ": missing key");
    if (!kv.emplace(key, value).second) throw InputError("duplicate config key '" + key + "'");
  }
  if (kv.find("kind") == kv.end()) throw InputError("config needs a 'kind' key");

  RunConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "kind") c.kind = experiment_kind_from_name(value);
    else if (key == "qubits") c.qubits = static_cast<int>(int_value(key, value));
    else if (key == "coupling") c.coupling = double_value(key, value);
    else if (key == "field") c.field = double_value(key, value);
    else if (key == "hamiltonian") c.hamiltonian_file = value;
    else if (key == "ansatz") c.ansatz = value;
    else if (key == "layer_kind") c.layer_kind = layer_kind_value(value);
    else if (key == "layers") c.layers = static_cast<int>(int_value(key, value));
    else if (key == "born_layers") c.born_layers = static_cast<int>(int_value(key, value));
    else if (key == "n_ref") c.n_ref = static_cast<int>(int_value(key, value));
    else if (key == "shots") c.shots = int_value(key, value);
    else if (key == "purity_shots") c.purity_shots = int_value(key, value);
    else if (key == "iterations") c.iterations = int_value(key, value);
    else if (key == "schedule") c.schedule = schedule_value(value);
    else if (key == "c") c.c = double_value(key, value);
    else if (key == "lr") c.lr = double_value(key, value);
    else if (key == "vqe_lr") c.vqe_lr = double_value(key, value);
    else if (key == "spsa_delta") c.spsa_delta = double_value(key, value);
    else if (key == "beta_omega") c.beta_omega = double_value(key, value);
    else if (key == "beta_eta_nu") c.beta_eta_nu = double_value(key, value);
    else if (key == "chi_max") c.chi_max = static_cast<int>(int_value(key, value));
    else if (key == "pretrain_iterations") c.pretrain_iterations = int_value(key, value);
    else if (key == "pretrain_c") c.pretrain_c = double_value(key, value);
    else if (key == "pretrain_lr") c.pretrain_lr = double_value(key, value);
    else if (key == "translate_layers") c.translate_layers = static_cast<int>(int_value(key, value));
    else if (key == "od_iterations") c.od_iterations = int_value(key, value);
    else if (key == "od_beta") c.od_beta = double_value(key, value);
    else if (key == "target_fidelity") c.target_fidelity = double_value(key, value);
    else if (key == "mps_file") c.mps_file = value;
    else if (key == "appended_layers") c.appended_layers = static_cast<int>(int_value(key, value));
    else if (key == "seeds") c.seeds = seeds_value(value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "threads") c.threads = static_cast<int>(int_value(key, value));
    else throw InputError("unknown config key '" + key + "'");
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config file '" + path + "'");
  return parse(f);
}

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : config_pairs(*this)) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

void RunConfig::validate() const {
  const bool builtin = qubits != 0;
  if (builtin == !hamiltonian_file.empty())
    throw InputError("config needs exactly one Hamiltonian source ('qubits' or 'hamiltonian')");
  if (builtin && qubits < 1) throw InputError("config key 'qubits': needs a positive count");
  if (!hamiltonian_file.empty() && !fs::exists(hamiltonian_file))
    throw InputError("hamiltonian file '" + hamiltonian_file + "' does not exist");
  if (!mps_file.empty() && !fs::exists(mps_file))
    throw InputError("mps file '" + mps_file + "' does not exist");
  if (ansatz != "purification" && ansatz != "convex")
    throw InputError("config key 'ansatz': expected purification or convex, got '" + ansatz + "'");

  const auto require = [](bool ok, const char* msg) {
    if (!ok) throw InputError(msg);
  };
  require(layers >= 1, "config key 'layers': needs at least 1");
  require(born_layers >= 1, "config key 'born_layers': needs at least 1");
  require(n_ref >= 0, "config key 'n_ref': needs a nonnegative count");
  require(shots >= 0, "config key 'shots': needs a nonnegative count");
  require(purity_shots >= 0, "config key 'purity_shots': needs a nonnegative count");
  require(iterations >= 0, "config key 'iterations': needs a nonnegative count");
  require(c > 0.0, "config key 'c': needs a positive weight");
  require(lr > 0.0, "config key 'lr': needs a positive rate");
  require(vqe_lr > 0.0, "config key 'vqe_lr': needs a positive rate");
  require(spsa_delta > 0.0, "config key 'spsa_delta': needs a positive perturbation");
  require(beta_omega > 0.0, "config key 'beta_omega': needs a positive rate");
  require(beta_eta_nu > 0.0, "config key 'beta_eta_nu': needs a positive rate");
  require(chi_max >= 1, "config key 'chi_max': needs at least 1");
  require(pretrain_iterations >= 0, "config key 'pretrain_iterations': needs a nonnegative count");
  require(pretrain_c > 0.0, "config key 'pretrain_c': needs a positive weight");
  require(pretrain_lr > 0.0, "config key 'pretrain_lr': needs a positive rate");
  require(translate_layers >= 1, "config key 'translate_layers': needs at least 1");
  require(od_iterations >= 0, "config key 'od_iterations': needs a nonnegative count");
  require(od_beta > 0.0 && od_beta <= 1.0, "config key 'od_beta': needs a rate in (0, 1]");
  require(target_fidelity > 0.0 && target_fidelity <= 1.0,
          "config key 'target_fidelity': needs a value in (0, 1]");
  require(appended_layers >= 0, "config key 'appended_layers': needs a nonnegative count");
  require(threads >= 0, "config key 'threads': needs a nonnegative count");

  if (kind == ExperimentKind::oracle) return;
  if (seeds.empty()) throw InputError("config needs explicit seeds");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InputError("config key 'seeds': duplicate seed");
  if (output_dir.empty()) throw InputError("config needs an output_dir");
  const bool pretrains = kind == ExperimentKind::pretrain || kind == ExperimentKind::translate ||
                         kind == ExperimentKind::pipeline;
  if (pretrains && ansatz != "purification")
    throw InputError("pretraining stages require the purification ansatz");
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile needs p in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::string SummarySeries::to_csv() const {
  std::string out = kHeader;
  out += '\n';
  char buf[140];
  for (std::size_t i = 0; i < iteration.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g\n", iteration[i], median[i], q1[i],
                  q3[i]);
    out += buf;
  }
  return out;
}

TraceGroupSummary summarize_traces(const std::string& name,
                                   const std::vector<TrainingTrace>& traces, double oracle_value,
                                   std::vector<std::string>* warnings) {
  if (traces.empty()) throw InputError("summarize needs at least one trace");
  std::size_t len = traces.front().rows.size();
  bool ragged = false;
  for (const TrainingTrace& t : traces) {
    if (t.rows.empty()) throw InputError("summarize: trace without rows");
    ragged = ragged || t.rows.size() != traces.front().rows.size();
    len = std::min(len, t.rows.size());
  }
  if (ragged && warnings != nullptr)
    warnings->push_back(name + " traces differ in length; series truncated to " +
                        std::to_string(len) + " rows");

  TraceGroupSummary g;
  g.name = name;
  g.series.iteration.reserve(len);
  g.series.median.reserve(len);
  g.series.q1.reserve(len);
  g.series.q3.reserve(len);
  std::vector<double> sample(traces.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t k = 0; k < traces.size(); ++k) sample[k] = traces[k].rows[i].f;
    g.series.iteration.push_back(traces.front().rows[i].iteration);
    g.series.median.push_back(quantile(sample, 0.5));
    g.series.q1.push_back(quantile(sample, 0.25));
    g.series.q3.push_back(quantile(sample, 0.75));
  }
  for (const TrainingTrace& t : traces) {
    g.seeds.push_back(t.rows.front().seed);
    g.finals.push_back(t.rows.back().f);
  }
  g.final_median = quantile(g.finals, 0.5);
  g.final_q1 = quantile(g.finals, 0.25);
  g.final_q3 = quantile(g.finals, 0.75);
  if (std::isfinite(oracle_value) && oracle_value != 0.0)
    g.relative_error = std::abs(g.final_median - oracle_value) / std::abs(oracle_value);
  return g;
}

const TraceGroupSummary* SummaryReport::group(const std::string& name) const {
  for (const TraceGroupSummary& g : groups)
    if (g.name == name) return &g;
  return nullptr;
}

std::string SummaryReport::to_json() const {
  json j;
  j["oracle"] = json_number(oracle_value);
  j["vqe_final"] = json_number(vqe_final);
  j["dual_final"] = json_number(dual_final);
  j["gap"] = json_number(gap);
  json gs = json::object();
  for (const TraceGroupSummary& g : groups) {
    json e;
    e["seeds"] = g.seeds;
    e["finals"] = g.finals;
    e["final_median"] = json_number(g.final_median);
    e["final_q1"] = json_number(g.final_q1);
    e["final_q3"] = json_number(g.final_q3);
    e["relative_error"] = json_number(g.relative_error);
    gs[g.name] = std::move(e);
  }
  j["groups"] = std::move(gs);
  json ts = json::array();
  for (const TranslationOutcome& t : translations) {
    json e;
    e["seed"] = t.seed;
    e["variant"] = variant_name(t.variant);
    e["fidelity"] = t.fidelity;
    e["d_all"] = t.variant_fidelity[0];
    e["o_all"] = t.variant_fidelity[1];
    e["d_all_o_all"] = t.variant_fidelity[2];
    ts.push_back(std::move(e));
  }
  j["translations"] = std::move(ts);
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

SummaryReport summarize_directory(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw InputError("'" + dir + "' is not a directory");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());

  SummaryReport rep;

  static const std::regex manifest_re("manifest_.*\\.json");
  bool have_oracle = false;
  for (const std::string& name : names) {
    if (!std::regex_match(name, manifest_re)) continue;
    std::ifstream f(root / name);
    json m;
    try {
      m = json::parse(f);
    } catch (const json::exception& e) {
      throw InputError("manifest '" + name + "': " + e.what());
    }
    if (!m.contains("oracle") || !m["oracle"].is_number()) continue;
    const double v = m["oracle"].get<double>();
    if (!have_oracle) {
      rep.oracle_value = v;
      have_oracle = true;
    } else if (v != rep.oracle_value) {
      rep.warnings.push_back("manifests disagree on the oracle value; keeping the first");
    }
  }

  static const std::regex trace_re("trace_([a-z]+)_seed([0-9]+)\\.csv");
  std::map<std::string, std::vector<std::pair<std::uint64_t, std::string>>> trace_groups;
  std::smatch m;
  for (const std::string& name : names)
    if (std::regex_match(name, m, trace_re))
      trace_groups[m[1].str()].emplace_back(std::stoull(m[2].str()), name);
  for (auto& [group, files] : trace_groups) {
    std::sort(files.begin(), files.end());
    std::vector<TrainingTrace> traces;
    traces.reserve(files.size());
    for (const auto& file : files) traces.push_back(TrainingTrace::load((root / file.second).string()));
    rep.groups.push_back(summarize_traces(group, traces, rep.oracle_value, &rep.warnings));
  }

  static const std::regex series_re("translate_(d_all_o_all|d_all|o_all)_seed([0-9]+)\\.csv");
  std::map<std::uint64_t, std::array<double, 3>> finals;
  for (const std::string& name : names) {
    if (!std::regex_match(name, m, series_re)) continue;
    const std::string variant = m[1].str();
    const std::size_t idx = variant == "d_all" ? 0 : variant == "o_all" ? 1 : 2;
    auto it = finals.try_emplace(std::stoull(m[2].str()), std::array<double, 3>{kNan, kNan, kNan})
                  .first;
    it->second[idx] = last_series_value(root / name);
  }
  for (const auto& [seed, fids] : finals) {
    if (!(std::isfinite(fids[0]) && std::isfinite(fids[1]) && std::isfinite(fids[2]))) {
      rep.warnings.push_back("incomplete translation series for seed " + std::to_string(seed));
      continue;
    }
    TranslationOutcome t;
    t.seed = seed;
    t.variant_fidelity = fids;
    t.variant = TranslateVariant::d_all;
    t.fidelity = fids[0];
    if (fids[1] > t.fidelity) {
      t.variant = TranslateVariant::o_all;
      t.fidelity = fids[1];
    }
    if (fids[2] > t.fidelity) {
      t.variant = TranslateVariant::d_all_o_all;
      t.fidelity = fids[2];
    }
    rep.translations.push_back(t);
  }

  if (const TraceGroupSummary* g = rep.group("vqe")) rep.vqe_final = g->final_median;
  if (const TraceGroupSummary* g = rep.group("dual")) rep.dual_final = g->final_median;
  rep.gap = rep.vqe_final - rep.dual_final;

  for (const TraceGroupSummary& g : rep.groups)
    write_file(root / ("summary_" + g.name + ".csv"), g.series.to_csv());
  write_file(root / "summary.json", rep.to_json());
  return rep;
}

RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  const PauliHamiltonian h = make_hamiltonian(cfg);
  double oracle = kNan;
  if (cfg.kind == ExperimentKind::oracle || h.num_qubits() <= kMaxDenseQubits)
    oracle = min_eigenvalue(h);

  RunOutcome out;
  out.summary.oracle_value = oracle;
  if (cfg.kind == ExperimentKind::oracle) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "lambda_min = %.7f", oracle);
    out.message = buf;
    if (!cfg.output_dir.empty()) {
      fs::create_directories(cfg.output_dir);
      write_manifest(cfg, oracle, cfg.output_dir, out);
    }
    return out;
  }

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_manifest(cfg, oracle, dir, out);

  const std::size_t limit =
      cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<SeedOutcome> results(cfg.seeds.size());
  for (std::size_t start = 0; start < cfg.seeds.size(); start += limit) {
    const std::size_t stop = std::min(start + limit, cfg.seeds.size());
    std::vector<std::future<SeedOutcome>> batch;
    batch.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i)
      batch.push_back(std::async(std::launch::async, [&cfg, &h, &dir, seed = cfg.seeds[i]] {
        return run_seed(cfg, h, seed, dir);
      }));
    for (std::size_t i = start; i < stop; ++i) results[i] = batch[i - start].get();
  }

  std::string failure;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.files.insert(out.files.end(), results[i].files.begin(), results[i].files.end());
    if (failure.empty() && (results[i].aborted || !results[i].error.empty())) {
      failure = "seed " + std::to_string(cfg.seeds[i]);
      if (!results[i].error.empty()) failure += ": " + results[i].error;
    }
  }
  if (!failure.empty()) {
    out.exit_code = kExitNumericAbort;
    out.message = std::string(experiment_kind_name(cfg.kind)) + ": numeric abort at " + failure +
                  "; partial traces kept";
    return out;
  }

  out.summary = summarize_directory(cfg.output_dir);
  for (const TraceGroupSummary& g : out.summary.groups)
    out.files.push_back("summary_" + g.name + ".csv");
  out.files.push_back("summary.json");
  out.message = compose_message(cfg, out.summary);
  return out;
}

}  // namespace dualvqe
