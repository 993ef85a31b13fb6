#pragma once

// Dense state-vector and density-matrix primitives for small qubit systems.
//
// Qubit 0 is the most significant bit of a computational-basis index: for an
// n-qubit register, qubit q occupies bit (n - 1 - q).

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "veriphoton/random.hpp"

namespace veriphoton {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 14;

inline constexpr double kExactTol = 1e-12;
inline constexpr double kEigenTol = 1e-9;
inline constexpr double kPsdClip = 1e-10;

/// Raised on malformed inputs: bad dimensions, indices, or broken invariants.
class QuantumError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class StateVector {
  public:
    /// Validates length 2^n and unit norm to kExactTol.
    explicit StateVector(std::vector<Complex> amplitudes);

    /// Rescales to unit norm; rejects the zero vector.
    static StateVector normalized(std::vector<Complex> amplitudes);
    static StateVector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Complex> amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }
    double norm_squared() const;
    CVector to_eigen() const;

  private:
    struct Unchecked {};
    StateVector(std::vector<Complex> amplitudes, Unchecked);

    int n_qubits_ = 0;
    std::vector<Complex> amps_;

    friend struct StateAccess;
};

class DensityMatrix {
  public:
    /// Validates Hermiticity and unit trace to kExactTol. Eigenvalues in
    /// [-kPsdClip, 0) are clipped to zero and the trace renormalized; more
    /// negative eigenvalues are rejected.
    explicit DensityMatrix(CMatrix entries);

    static DensityMatrix from_pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    /// Number of qubits when dim is a power of two; throws otherwise.
    int n_qubits() const;
    const CMatrix& matrix() const { return rho_; }

  private:
    CMatrix rho_;
};

enum class GateKind { I, X, Y, Z, H, S, Sdg, CZ, Custom };

struct GateSpec {
    GateKind kind = GateKind::I;
    std::vector<int> targets;
    CMatrix custom;  // only used when kind == Custom

    static GateSpec single(GateKind kind, int target);
    static GateSpec cz(int a, int b);
    static GateSpec make_custom(CMatrix unitary, std::vector<int> targets);

    /// 2^k x 2^k matrix on the k targets, first target most significant.
    CMatrix matrix() const;
};

/// Single-qubit matrices.
CMatrix pauli_i();
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix hadamard();
CMatrix phase_s();

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Embeds a single-qubit operator on qubit q of an n-qubit register.
CMatrix embed(const CMatrix& op, int qubit, int n_qubits);

StateVector apply_gate(const StateVector& state, const GateSpec& gate);

/// Projection of `qubits` onto a bra (2^k entries, first listed qubit most
/// significant). The remaining qubits keep their relative order.
struct Collapse {
    double probability = 0.0;
    std::optional<StateVector> state;  // empty when probability underflows
};
Collapse collapse(const StateVector& state, std::span<const int> qubits,
                  std::span<const Complex> bra);

/// Bell basis |phi_wz> = (Z^z X^w (x) I)(|00> + |11>)/sqrt(2); Z^z X^w acts
/// on the first qubit of the pair. Index of (w, z) is 2w + z.
std::array<Complex, 4> bell_vector(int w, int z);
std::array<double, 4> bell_probabilities(const StateVector& state, int first,
                                         int second);

struct BellResult {
    int w = 0;
    int z = 0;
    StateVector post;  // remaining qubits (a 0-qubit state when none remain)
};
BellResult bell_measure(const StateVector& state, int first, int second,
                        Rng& rng);

double expectation(const StateVector& state, const CMatrix& observable);
double expectation(const DensityMatrix& rho, const CMatrix& observable);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double matrix_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Traces out every qubit not in `keep`; kept qubits retain their order.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

/// Haar-like random pure state from normalized complex Gaussians.
StateVector random_state(int n_qubits, Rng& rng);
/// Random density matrix A A^dag / Tr with A of shape dim x rank.
DensityMatrix random_density_matrix(std::size_t dim, std::size_t rank, Rng& rng);

double gaussian(Rng& rng);

}  // namespace veriphoton
