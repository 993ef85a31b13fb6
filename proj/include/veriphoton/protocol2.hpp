#pragma once

// Protocol 1 driven by coherent light: each of the N verifier qubits is
// produced by one pulse batch, a QND report, the vacuum threshold test and
// an I1DC chain.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "veriphoton/hamiltonian.hpp"
#include "veriphoton/i1dc.hpp"
#include "veriphoton/photonics.hpp"
#include "veriphoton/protocol1.hpp"

namespace veriphoton {

struct HonestAdversary {};

/// Honest photonics, teleports `state` instead of the witness.
struct WrongWitnessAdversary {
    StateVector state;
};

struct RandomOutcomesAdversary {};

/// Forges vacuum reports to hide pulses whose angle it cannot learn (n <= 1)
/// and keeps multi-photon pulses, whose angles it reads off.
///   Greedy: hides min(m0 + m1, floor(threshold)) pulses, vacuums first.
///   AllOrNothing: always reports all n <= 1 pulses as vacuum.
/// When every repetition is fully hidden it knows (h, s) and answers with the
/// best classical outcome; otherwise it teleports `fallback`, and a repetition
/// whose declared survivors include a vacuum gets a maximally mixed qubit.
struct VacuumForgeAdversary {
    enum class Strategy { Greedy, AllOrNothing };
    Strategy strategy = Strategy::Greedy;
    StateVector fallback;
};

/// Replaces every verifier qubit by `rho` before an honest Bell measurement.
struct FixedStateReplaceAdversary {
    DensityMatrix rho;
};

/// Depolarizes every verifier qubit with strength p before an honest Bell
/// measurement.
struct SinglePhotonChannelAdversary {
    double p = 0.0;
};

using AdversarySpec =
    std::variant<HonestAdversary, WrongWitnessAdversary, RandomOutcomesAdversary,
                 VacuumForgeAdversary, FixedStateReplaceAdversary, SinglePhotonChannelAdversary>;

std::string adversary_name(const AdversarySpec& adversary);

struct RunConfig {
    InstanceSpec instance;
    int m = 75;
    double alpha = 1.0;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    AdversarySpec adversary = HonestAdversary{};

    int n_qubits() const { return instance.hamiltonian.n_qubits(); }
    /// Pulse parameters, adversary sizes and parameter ranges.
    void validate() const;
};

struct RepetitionRecord {
    std::vector<Pulse> pulses;          // actual angles and photon counts
    std::vector<int> reported;          // counts sent to the verifier
    PhotonStats actual;
    int m0_reported = 0;
    bool threshold_pass = false;
    std::optional<I1dcTranscript> i1dc;  // absent after a threshold failure
};

struct RoundTranscript {
    std::vector<RepetitionRecord> repetitions;
    std::optional<VerifierSecret> secret;
    std::optional<BellOutcomes> outcomes;
    Verdict verdict;
    /// Some repetition had m0 + m1 <= threshold.
    bool case_i = false;
};

/// Repetition j (1-based) draws from derive_seed(seed, trial, j); the
/// Protocol-1 exchange draws from derive_seed(seed, trial, 0).
RoundTranscript run_round(const RunConfig& config, std::uint64_t trial);

nlohmann::json round_to_json(const RoundTranscript& round, bool with_pulses);

/// The Protocol-1 measurement an adversary applies once the verifier qubits
/// are in place. VacuumForge yields its fallback teleportation.
ProverPovm induced_povm(const RunConfig& config);

/// Energy presented to the energy test by the adversary: min over the
/// Protocol-1 behaviours it can end up using outside case (i).
double effective_adversary_energy(const RunConfig& config);

struct P2Estimate {
    McEstimate mc;
    double bound = 0.0;          // completeness floor for Honest, soundness ceiling otherwise
    bool bound_ok = false;
    double b_eff = 0.0;
    /// Exact end-to-end value when the adversary leaves photonics honest.
    std::optional<double> exact;
    std::uint64_t case_i = 0;
    std::uint64_t case_i_accepts = 0;
    std::uint64_t threshold_rejects = 0;
};

/// Runs config.trials rounds (at least 1000). Counts are aggregated exactly,
/// so the result does not depend on `threads`.
P2Estimate estimate_pacc(const RunConfig& config, int threads = 0,
                         std::vector<RoundTranscript>* transcripts = nullptr);

struct RecommendedParams {
    double alpha = 1.0;
    int m = 8;
};
RecommendedParams recommended_params(int n_qubits, double f);

double gap_lower_bound(int n_qubits, double f);

/// honest - adversary >= gap_lower_bound - (half widths combined).
bool distinguish(const McEstimate& honest, const McEstimate& adversary, int n_qubits, double f);

}  // namespace veriphoton
