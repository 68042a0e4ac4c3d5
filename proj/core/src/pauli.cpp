#include "dualvqe/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dualvqe/errors.hpp"

namespace dualvqe {

char pauli_letter(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  throw InputError("invalid Pauli digit");
}

Pauli pauli_from_letter(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default:
      throw InputError(std::string("invalid Pauli letter '") + c + "' (expected I, X, Y or Z)");
  }
}

PauliString PauliString::identity(int n) {
  if (n < 1) throw InputError("Pauli string needs at least one qubit");
  PauliString s;
  s.letters.assign(static_cast<std::size_t>(n), Pauli::I);
  return s;
}

PauliString PauliString::parse(const std::string& text) {
  if (text.empty()) throw InputError("empty Pauli string");
  PauliString s;
  s.letters.reserve(text.size());
  for (char c : text) s.letters.push_back(pauli_from_letter(c));
  return s;
}

bool PauliString::is_identity() const {
  return std::all_of(letters.begin(), letters.end(), [](Pauli p) { return p == Pauli::I; });
}

std::string PauliString::str() const {
  std::string out;
  out.reserve(letters.size());
  for (Pauli p : letters) out.push_back(pauli_letter(p));
  return out;
}

PauliAction pauli_action(const PauliString& s, std::uint64_t index) {
  const int n = s.size();
  std::uint64_t target = index;
  cxd phase(1.0, 0.0);
  for (int q = 0; q < n; ++q) {
    const std::uint64_t mask = 1ull << (n - 1 - q);
    const bool bit = (index & mask) != 0;
    switch (s.letters[static_cast<std::size_t>(q)]) {
      case Pauli::I:
        break;
      case Pauli::X:
        target ^= mask;
        break;
      case Pauli::Y:
        target ^= mask;
        phase *= bit ? cxd(0.0, -1.0) : cxd(0.0, 1.0);
        break;
      case Pauli::Z:
        if (bit) phase = -phase;
        break;
    }
  }
  return {target, phase};
}

PauliHamiltonian::PauliHamiltonian(int n, std::vector<PauliTerm> terms) : n_(n) {
  if (n < 1) throw InputError("Hamiltonian needs at least one qubit");
  std::map<PauliString, double> merged;
  for (const auto& t : terms) {
    if (t.string.size() != n)
      throw InputError("Pauli string '" + t.string.str() + "' has length " +
                       std::to_string(t.string.size()) + ", expected " + std::to_string(n));
    if (!std::isfinite(t.coeff)) throw InputError("non-finite coefficient in Hamiltonian");
    merged[t.string] += t.coeff;
  }
  terms_.reserve(merged.size());
  for (auto& [s, c] : merged) {
    if (c == 0.0) continue;
    terms_.push_back({c, s});
  }
}

double PauliHamiltonian::identity_coefficient() const {
  for (const auto& t : terms_)
    if (t.string.is_identity()) return t.coeff;
  return 0.0;
}

double PauliHamiltonian::coefficient_norm_sq() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * t.coeff;
  return s;
}

PauliHamiltonian transverse_field_ising(int n, const std::vector<double>& couplings,
                                        const std::vector<double>& fields) {
  if (n < 1) throw InputError("transverse_field_ising: n must be >= 1");
  if (static_cast<int>(couplings.size()) != std::max(0, n - 1))
    throw InputError("transverse_field_ising: expected " + std::to_string(n - 1) + " couplings");
  if (static_cast<int>(fields.size()) != n)
    throw InputError("transverse_field_ising: expected " + std::to_string(n) + " fields");
  std::vector<PauliTerm> terms;
  for (int i = 0; i + 1 < n; ++i) {
    PauliString s = PauliString::identity(n);
    s.letters[static_cast<std::size_t>(i)] = Pauli::Z;
    s.letters[static_cast<std::size_t>(i + 1)] = Pauli::Z;
    terms.push_back({couplings[static_cast<std::size_t>(i)], s});
  }
  for (int i = 0; i < n; ++i) {
    PauliString s = PauliString::identity(n);
    s.letters[static_cast<std::size_t>(i)] = Pauli::X;
    terms.push_back({fields[static_cast<std::size_t>(i)], s});
  }
  return PauliHamiltonian(n, std::move(terms));
}

PauliHamiltonian transverse_field_ising(int n, double coupling, double field) {
  return transverse_field_ising(n, std::vector<double>(static_cast<std::size_t>(std::max(0, n - 1)), coupling),
                                std::vector<double>(static_cast<std::size_t>(n), field));
}

double trace(const PauliHamiltonian& h) {
  return std::ldexp(h.identity_coefficient(), h.num_qubits());
}

double trace_squared(const PauliHamiltonian& h) {
  return std::ldexp(h.coefficient_norm_sq(), h.num_qubits());
}

Eigen::MatrixXcd to_dense(const PauliHamiltonian& h) {
  const int n = h.num_qubits();
  if (n > kMaxDenseQubits)
    throw ResourceError("to_dense: " + std::to_string(n) + " qubits exceeds the dense limit of " +
                        std::to_string(kMaxDenseQubits));
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
      const PauliAction a = pauli_action(t.string, col);
      out(static_cast<Eigen::Index>(a.target), static_cast<Eigen::Index>(col)) += t.coeff * a.phase;
    }
  }
  return out;
}

double min_eigenvalue(const PauliHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues()(0);
}

PauliHamiltonian prepend_identities(const PauliHamiltonian& h, int k) {
  if (k < 0) throw InputError("prepend_identities: k must be >= 0");
  if (k == 0) return h;
  std::vector<PauliTerm> terms;
  terms.reserve(h.terms().size());
  for (const auto& t : h.terms()) {
    PauliString s = PauliString::identity(h.num_qubits() + k);
    std::copy(t.string.letters.begin(), t.string.letters.end(), s.letters.begin() + k);
    terms.push_back({t.coeff, std::move(s)});
  }
  return PauliHamiltonian(h.num_qubits() + k, std::move(terms));
}

PauliHamiltonian parse_hamiltonian(std::istream& in) {
  std::vector<PauliTerm> terms;
  int n = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double coeff;
    std::string word;
    if (!(ls >> coeff)) {
      std::istringstream probe(line);
      std::string any;
      if (probe >> any)
        throw InputError("line " + std::to_string(lineno) + ": expected '<coeff> <letters>'");
      continue;  // blank or comment-only line
    }
    if (!(ls >> word))
      throw InputError("line " + std::to_string(lineno) + ": missing Pauli letters");
    std::string extra;
    if (ls >> extra)
      throw InputError("line " + std::to_string(lineno) + ": unexpected trailing '" + extra + "'");
    PauliString s = PauliString::parse(word);
    if (n < 0) n = s.size();
    if (s.size() != n)
      throw InputError("line " + std::to_string(lineno) + ": string length " +
                       std::to_string(s.size()) + " differs from earlier length " + std::to_string(n));
    terms.push_back({coeff, std::move(s)});
  }
  if (n < 0) throw InputError("no Hamiltonian terms found");
  return PauliHamiltonian(n, std::move(terms));
}

PauliHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open Hamiltonian file '" + path + "'");
  return parse_hamiltonian(f);
}

std::string format_hamiltonian(const PauliHamiltonian& h) {
  std::string out;
  char buf[64];
  for (const auto& t : h.terms()) {
    std::snprintf(buf, sizeof(buf), "%.17g", t.coeff);
    out += buf;
    out += ' ';
    out += t.string.str();
    out += '\n';
  }
  return out;
}

void save_hamiltonian(const PauliHamiltonian& h, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw InputError("cannot write Hamiltonian file '" + path + "'");
  f << format_hamiltonian(h);
}

}  // namespace dualvqe
