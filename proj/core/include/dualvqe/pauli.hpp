#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dualvqe {

using cxd = std::complex<double>;

// Densifying beyond this many qubits is refused (ResourceError).
inline constexpr int kMaxDenseQubits = 12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_letter(Pauli p);
Pauli pauli_from_letter(char c);

// Tensor product of single-qubit Paulis, one base-4 digit per qubit.
// Qubit 0 is the leftmost factor and the most significant bit of basis indices.
struct PauliString {
  std::vector<Pauli> letters;

  static PauliString identity(int n);
  static PauliString parse(const std::string& text);

  int size() const { return static_cast<int>(letters.size()); }
  bool is_identity() const;
  std::string str() const;

  bool operator==(const PauliString&) const = default;
  bool operator<(const PauliString& other) const { return letters < other.letters; }
};

// sigma |index> = phase |target> for a computational basis state.
struct PauliAction {
  std::uint64_t target;
  cxd phase;
};
PauliAction pauli_action(const PauliString& s, std::uint64_t index);

struct PauliTerm {
  double coeff;
  PauliString string;
};

// Real linear combination of Pauli strings on a fixed register.
// Terms are merged on construction; exact-zero coefficients are dropped.
class PauliHamiltonian {
 public:
  PauliHamiltonian(int n, std::vector<PauliTerm> terms);

  int num_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  // Coefficient of the all-identity string (0 if absent).
  double identity_coefficient() const;
  // Sum of squared coefficients over all terms.
  double coefficient_norm_sq() const;

 private:
  int n_;
  std::vector<PauliTerm> terms_;
};

// Open-chain transverse-field Ising model:
// sum_i couplings[i] Z_i Z_{i+1} + sum_i fields[i] X_i.
PauliHamiltonian transverse_field_ising(int n, const std::vector<double>& couplings,
                                        const std::vector<double>& fields);
PauliHamiltonian transverse_field_ising(int n, double coupling, double field);

double trace(const PauliHamiltonian& h);          // 2^n * identity coefficient
double trace_squared(const PauliHamiltonian& h);  // Tr[H^2] = 2^n * sum of coeff^2

Eigen::MatrixXcd to_dense(const PauliHamiltonian& h);
double min_eigenvalue(const PauliHamiltonian& h);

// Same operator acting on the last qubits of a register enlarged by k on the left.
PauliHamiltonian prepend_identities(const PauliHamiltonian& h, int k);

// Text format: one `<coeff> <letters>` pair per line, `#` starts a comment.
PauliHamiltonian parse_hamiltonian(std::istream& in);
PauliHamiltonian load_hamiltonian(const std::string& path);
std::string format_hamiltonian(const PauliHamiltonian& h);
void save_hamiltonian(const PauliHamiltonian& h, const std::string& path);

}  // namespace dualvqe
