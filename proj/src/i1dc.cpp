#include "veriphoton/i1dc.hpp"

#include <cmath>
#include <numbers>

namespace veriphoton {

namespace {

void check_chain(std::span<const Angle4> angles) {
    if (angles.size() < 2) throw QuantumError("I1DC needs at least two photons");
    if (angles.size() > kMaxI1dcStatevector) {
        throw QuantumError("statevector I1DC supports at most " +
                           std::to_string(kMaxI1dcStatevector) + " photons");
    }
}

StateVector initial_chain(std::span<const Angle4> angles) {
    StateVector state = plus_state(angles[0]);
    for (std::size_t l = 1; l < angles.size(); ++l) state = tensor(state, plus_state(angles[l]));
    return state;
}

// H on the front photon, CZ with its neighbour; the front photon is then
// ready for its X measurement.
StateVector entangle_front(const StateVector& state) {
    StateVector s = apply_gate(state, GateSpec::single(GateKind::H, 0));
    return apply_gate(s, GateSpec::cz(0, 1));
}

const std::array<std::array<Complex, 2>, 2>& x_bras() {
    static const std::array<std::array<Complex, 2>, 2> bras{{
        {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2},
        {1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2},
    }};
    return bras;
}

void expand(const StateVector& state, std::vector<std::uint8_t>& outcomes, double probability,
            std::vector<I1dcBranch>& out) {
    if (state.n_qubits() == 1) {
        out.push_back(I1dcBranch{outcomes, probability, state});
        return;
    }
    const StateVector ready = entangle_front(state);
    const int front[] = {0};
    for (std::uint8_t o = 0; o < 2; ++o) {
        Collapse c = collapse(ready, front, x_bras()[o]);
        if (!c.state) continue;
        outcomes.push_back(o);
        expand(*c.state, outcomes, probability * c.probability, out);
        outcomes.pop_back();
    }
}

}  // namespace

Angle4 phi_from_outcomes(std::span<const Angle4> angles, std::span<const std::uint8_t> outcomes) {
    if (angles.empty()) throw QuantumError("phi needs at least one angle");
    if (outcomes.size() + 1 != angles.size()) {
        throw QuantumError("I1DC needs L-1 outcomes for L angles");
    }
    const std::size_t last = angles.size() - 1;
    Angle4 phi = angles[last];
    int suffix = 0;
    for (std::size_t l = last; l-- > 0;) {
        suffix ^= outcomes[l] & 1;
        phi = phi + (suffix ? -angles[l] : angles[l]);
    }
    return phi;
}

I1dcTranscript run_symbolic(std::span<const Angle4> angles, Rng& rng) {
    if (angles.size() < 2) throw QuantumError("I1DC needs at least two photons");
    I1dcTranscript t;
    t.survivor_count = static_cast<int>(angles.size());
    t.outcomes.resize(angles.size() - 1);
    for (auto& o : t.outcomes) o = static_cast<std::uint8_t>(random_bit(rng));
    t.phi = phi_from_outcomes(angles, t.outcomes);
    return t;
}

std::vector<I1dcBranch> run_statevector_exhaustive(std::span<const Angle4> angles) {
    check_chain(angles);
    std::vector<I1dcBranch> out;
    std::vector<std::uint8_t> outcomes;
    expand(initial_chain(angles), outcomes, 1.0, out);
    return out;
}

I1dcBranch run_statevector_sampled(std::span<const Angle4> angles, Rng& rng) {
    check_chain(angles);
    StateVector state = initial_chain(angles);
    I1dcBranch branch{{}, 1.0, state};
    const int front[] = {0};
    while (state.n_qubits() > 1) {
        const StateVector ready = entangle_front(state);
        Collapse zero = collapse(ready, front, x_bras()[0]);
        const std::uint8_t o = uniform01(rng) < zero.probability ? 0 : 1;
        Collapse chosen = o == 0 ? std::move(zero) : collapse(ready, front, x_bras()[1]);
        branch.outcomes.push_back(o);
        branch.probability *= chosen.probability;
        state = std::move(*chosen.state);
    }
    branch.final_state = state;
    return branch;
}

StateVector plus_state(Angle4 phi) {
    static constexpr std::array<Complex, 4> phases{Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                                   Complex(0, -1)};
    const double a = 1.0 / std::numbers::sqrt2;
    return StateVector::normalized({a, a * phases[static_cast<std::size_t>(phi.value())]});
}

std::optional<Angle4> angle_of(const StateVector& qubit, double tol) {
    if (qubit.n_qubits() != 1) throw QuantumError("angle_of expects a single qubit");
    for (int v = 0; v < 4; ++v) {
        const StateVector ref = plus_state(Angle4(v));
        const double f = std::norm(std::conj(ref[0]) * qubit[0] + std::conj(ref[1]) * qubit[1]);
        if (f > 1.0 - tol) return Angle4(v);
    }
    return std::nullopt;
}

std::pair<int, int> phi_to_hs(Angle4 phi) {
    switch (phi.value()) {
        case 0: return {0, 0};
        case 1: return {1, 0};
        case 2: return {0, 1};
        default: return {1, 1};
    }
}

nlohmann::json transcript_to_json(const I1dcTranscript& t) {
    nlohmann::json o = nlohmann::json::array();
    for (auto b : t.outcomes) o.push_back(static_cast<int>(b));
    return {{"o", o}, {"phi", t.phi.value()}, {"L", t.survivor_count}};
}

}  // namespace veriphoton
