#pragma once

// Two-local XX+YY Hamiltonians
//
//   H = sum_{i<j} (p_ij / 2) [ (I + c_ij X_i X_j)/2 + (I + c_ij Y_i Y_j)/2 ]
//
// with p_ij >= 0 summing to one and c_ij = +-1, so 0 <= H <= I.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "veriphoton/qcore.hpp"

namespace veriphoton {

struct HamiltonianTerm {
    int i = 0;
    int j = 1;
    double p = 0.0;
    int c = 1;

    bool operator==(const HamiltonianTerm&) const = default;
};

class LocalHamiltonian {
  public:
    /// Validates 0 <= i < j < N, distinct pairs, p >= 0, c = +-1 and
    /// sum p = 1 to kExactTol.
    LocalHamiltonian(int n_qubits, std::vector<HamiltonianTerm> terms);

    int n_qubits() const { return n_qubits_; }
    const std::vector<HamiltonianTerm>& terms() const { return terms_; }

    /// Matrix-free H|v>.
    std::vector<Complex> apply(std::span<const Complex> v) const;

    /// Tr[H] / 2^N, the energy of the maximally mixed state.
    double mean_energy() const;

  private:
    int n_qubits_;
    std::vector<HamiltonianTerm> terms_;
};

inline constexpr int kMaxHamiltonianQubits = 12;

CMatrix dense_matrix(const LocalHamiltonian& h);

double energy(const LocalHamiltonian& h, const StateVector& state);
double energy(const LocalHamiltonian& h, const DensityMatrix& rho);

struct GroundState {
    double energy = 0.0;
    StateVector state;
};
GroundState ground_energy(const LocalHamiltonian& h);

/// Full ascending spectrum, used for instance synthesis and tests.
Eigen::VectorXd spectrum(const LocalHamiltonian& h);

/// Draws (i, j) with probability p_ij; returns the index into terms().
std::size_t sample_term_index(const LocalHamiltonian& h, Rng& rng);
std::pair<int, int> sample_term(const LocalHamiltonian& h, Rng& rng);

struct InstanceSpec {
    LocalHamiltonian hamiltonian;
    double a = 0.0;
    double b = 0.0;
    double f = 1.0;
    std::optional<StateVector> witness;

    /// Checks 1 >= b - a >= 1/f, f >= 1 and <eta|H|eta> <= a + 1e-9.
    void validate() const;
};

/// Random {p, c} over all pairs, witness = exact ground state, a = E0,
/// b = a + min(gap_target, 1, lambda_max - E0), f = 1 / (b - a).
InstanceSpec synth_instance(int n_qubits, std::uint64_t seed, double gap_target);

/// Instance document: {"n", "terms": [{"i","j","p","c"}], "a", "b", "f",
/// "witness": [[re, im], ...]}. Rejects sum p off by more than 1e-9.
InstanceSpec instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const InstanceSpec& inst);

}  // namespace veriphoton
