#pragma once

// Interlaced 1D cluster computation: photons |+_sigma_l> are chained by
// CZ(H (x) I) and X measurements until one qubit |+_phi> remains.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "veriphoton/photonics.hpp"
#include "veriphoton/qcore.hpp"

namespace veriphoton {

struct I1dcTranscript {
    std::vector<std::uint8_t> outcomes;  // o_1 .. o_{L-1}
    Angle4 phi;
    int survivor_count = 0;
};

/// phi = sum_{l<L} (-1)^{o_l + ... + o_{L-1}} sigma_l + sigma_L (mod 4).
Angle4 phi_from_outcomes(std::span<const Angle4> angles, std::span<const std::uint8_t> outcomes);

using PhiFunction = std::function<Angle4(std::span<const Angle4>, std::span<const std::uint8_t>)>;

/// Uniform outcomes drawn from `rng`, phi by the formula.
I1dcTranscript run_symbolic(std::span<const Angle4> angles, Rng& rng);

inline constexpr int kMaxI1dcStatevector = 12;

struct I1dcBranch {
    std::vector<std::uint8_t> outcomes;
    double probability = 0.0;
    StateVector final_state;
};

/// Enumerates all 2^{L-1} outcome branches with exact probabilities.
std::vector<I1dcBranch> run_statevector_exhaustive(std::span<const Angle4> angles);

/// One branch sampled with Born probabilities.
I1dcBranch run_statevector_sampled(std::span<const Angle4> angles, Rng& rng);

/// (|0> + e^{i phi}|1>)/sqrt(2).
StateVector plus_state(Angle4 phi);

/// The Angle4 whose |+_phi> matches `qubit` up to global phase with
/// fidelity above 1 - tol, if any.
std::optional<Angle4> angle_of(const StateVector& qubit, double tol = 1e-10);

/// 0 -> (0,0), 2 -> (0,1), 1 -> (1,0), 3 -> (1,1).
std::pair<int, int> phi_to_hs(Angle4 phi);

nlohmann::json transcript_to_json(const I1dcTranscript& t);

}  // namespace veriphoton
