#pragma once

// Qubit-channel verification round: the verifier sends
// |psi_V> = (x)_k S^{h_k} H |s_k>, the prover answers with Bell outcomes
// (w, z), and the verifier tests one sampled Hamiltonian term.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "veriphoton/hamiltonian.hpp"
#include "veriphoton/qcore.hpp"

namespace veriphoton {

using Bits = std::vector<std::uint8_t>;

struct VerifierSecret {
    Bits h;
    Bits s;

    int size() const { return static_cast<int>(h.size()); }
    static VerifierSecret random(int n, Rng& rng);
};

struct BellOutcomes {
    Bits w;
    Bits z;

    int size() const { return static_cast<int>(w.size()); }
    bool operator==(const BellOutcomes&) const = default;
};

/// Outcome (w, z) packed as an index: w bits (qubit 0 most significant)
/// above z bits.
std::size_t outcome_index(const BellOutcomes& out);
BellOutcomes outcome_from_index(std::size_t index, int n);

enum class Branch { AutoAccept, ParityAccept, ParityReject, ThresholdReject };
std::string_view to_string(Branch branch);

struct Verdict {
    bool accepted = false;
    Branch branch = Branch::ParityReject;
    std::optional<std::pair<int, int>> sampled_pair;
};

/// Single-qubit CPTP map given by Kraus operators.
class QubitChannel {
  public:
    enum class Kind { Identity, Depolarizing, Replace };

    static QubitChannel identity();
    /// rho -> (1 - p) rho + p I/2.
    static QubitChannel depolarizing(double p);
    /// rho -> sigma for every input.
    static QubitChannel replace(const DensityMatrix& sigma);

    Kind kind() const { return kind_; }
    double strength() const { return strength_; }
    const std::optional<DensityMatrix>& replacement() const { return replacement_; }
    const std::vector<CMatrix>& kraus() const { return kraus_; }

    CMatrix apply(const CMatrix& rho) const;
    /// Heisenberg-picture action on an operator of qubit `qubit` of n.
    CMatrix adjoint_on(const CMatrix& op, int qubit, int n_qubits) const;
    /// Draws one Kraus branch for a pure input.
    StateVector sample(const StateVector& qubit, Rng& rng) const;

  private:
    QubitChannel(Kind kind, double strength, std::optional<DensityMatrix> replacement,
                 std::vector<CMatrix> kraus);

    Kind kind_;
    double strength_;
    std::optional<DensityMatrix> replacement_;
    std::vector<CMatrix> kraus_;
};

/// Honest teleportation of `witness`, optionally after a per-qubit channel
/// on the received qubits (the honest prover has no channels).
struct TeleportPovm {
    StateVector witness;
    std::vector<QubitChannel> channels;  // empty, or one per qubit
};

/// Ignores the received state and reports uniformly random (w, z).
struct RandomOutcomePovm {
    int n_qubits = 2;
};

/// Measures each received qubit in X, Y or Z and reports a fixed (w, z)
/// pair per outcome bit.
struct ProductMeasurePovm {
    struct Qubit {
        char basis = 'X';
        std::array<std::pair<int, int>, 2> report{{{0, 0}, {0, 1}}};
    };
    std::vector<Qubit> qubits;
};

/// Always reports the same (w, z).
struct ConstantOutcomePovm {
    BellOutcomes outcome;
};

using PovmFamily =
    std::variant<TeleportPovm, RandomOutcomePovm, ProductMeasurePovm, ConstantOutcomePovm>;

class ProverPovm {
  public:
    explicit ProverPovm(PovmFamily family);

    static ProverPovm honest(const StateVector& witness);

    int n_qubits() const { return n_qubits_; }
    const PovmFamily& family() const { return family_; }
    std::string_view name() const;

    /// Distribution over outcome_index for a received product state, by
    /// forward simulation (Born rule on the joint state).
    std::vector<double> outcome_distribution(std::span<const StateVector> received) const;

    /// Visits every POVM element Pi_wz as a 2^N x 2^N operator.
    void for_each_element(
        const std::function<void(std::size_t index, const CMatrix& element)>& visit) const;

    BellOutcomes sample(std::span<const StateVector> received, Rng& rng) const;

  private:
    PovmFamily family_;
    int n_qubits_;
};

/// (x)_k S^{h_k} H |s_k>, one single-qubit state per position.
std::vector<StateVector> verifier_qubits(const VerifierSecret& secret);
StateVector prepare_verifier_state(const VerifierSecret& secret);

/// Bell-measures qubit k of eta against qubit k of psi_v for every k.
BellOutcomes honest_prover(const StateVector& psi_v, const StateVector& eta, Rng& rng);

/// s'_k = s_k xor z_k xor (h_k and w_k).
Bits s_prime(const VerifierSecret& secret, const BellOutcomes& out);

/// Deterministic verdict for an already sampled term.
Verdict decide(const VerifierSecret& secret, const BellOutcomes& out,
               const HamiltonianTerm& term);

/// Samples (i, j) with probability p_ij from `rng`, then decides.
Verdict verdict(const VerifierSecret& secret, const BellOutcomes& out,
                const LocalHamiltonian& h, Rng& rng);

/// Probability of acceptance averaged over the sampled term.
double acceptance_given(const VerifierSecret& secret, const BellOutcomes& out,
                        const LocalHamiltonian& h);

/// 1 - <eta|H|eta>/2.
double exact_pacc_honest(const InstanceSpec& inst);

/// (1/2^N) sum_wz (X^w Z^z) Pi_wz (Z^z X^w). Throws when the elements do not
/// sum to the identity within 1e-10.
DensityMatrix twirled_state(const ProverPovm& povm);

/// 1/2 + Tr[rho_twirl (I - H)]/2 evaluated from the explicit POVM elements.
double exact_pacc_povm(const LocalHamiltonian& h, const ProverPovm& povm);

/// Tr[rho_twirl H], the energy an adversary effectively presents.
double effective_energy(const LocalHamiltonian& h, const ProverPovm& povm);

inline constexpr int kBruteForceMaxQubits = 3;

/// Exact enumeration over all secrets (h, s) and outcomes (w, z).
double brute_force_pacc(const LocalHamiltonian& h, const ProverPovm& povm);
double brute_force_pacc(const InstanceSpec& inst, const ProverPovm& povm);

struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t accepts = 0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double half_width = 0.0;  // 99% normal-approximation interval
};

McEstimate make_estimate(std::uint64_t accepts, std::uint64_t trials);

/// One Protocol-1 round on the stream of `rng`: draws h then s (one bit per
/// qubit each), lets the prover answer, then samples the term.
struct P1Round {
    VerifierSecret secret;
    BellOutcomes outcomes;
    Verdict verdict;
};
P1Round run_protocol1_round(const LocalHamiltonian& h, const ProverPovm& povm, Rng& rng);

/// Trial t runs on Rng(derive_seed(seed, t)). Results do not depend on the
/// thread count.
McEstimate monte_carlo_pacc(const LocalHamiltonian& h, const ProverPovm& povm,
                            std::uint64_t trials, std::uint64_t seed, int threads = 0);

}  // namespace veriphoton
